"""Extended intersection cohomology IH^k_j(X, B) of a two-strata space.

Two engines are provided:

* :func:`ih_closed_form` (engine A) covers the extreme perversities, where the
  groups are absolute or relative cohomology of ``Mbar``, and the sphere-fibre
  case where ``X`` is a manifold and the answer is ``H^k(X)``.
* :func:`ih_extended` (engine B) runs the row-truncated Leray spectral sequence
  of ``dM -> B`` to get ``IH_j(N(B), B)`` and splices it with ``H(Mbar)`` along
  a Mayer-Vietoris sequence.

Data convention for engine B: the restriction matrices ``r_k : H^k(Mbar) ->
H^k(dM)`` are written in a basis of ``H^k(dM)`` adapted to the Leray
filtration, i.e. the coordinates are grouped into blocks ``E_inf^{p,k-p}`` in
order of increasing base degree ``p``. Then the filtration piece ``F^s H^k``
is spanned by the trailing blocks ``p >= s``. The image of
``IH^k_j(N(B), B)`` in ``H^k(dM)`` is ``F^{k-c+1}``, where ``c = ell - 1 - j``
is the number of surviving rows, so no extra edge-map data is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional

from .exactlin import RatMatrix, nullspace, rank, solve, span_dim
from .topo import Perversity, StratumProfile, pair_cohomology


class IntersectionError(ValueError):
    pass


class InsufficientData(IntersectionError):
    pass


class EngineInapplicable(IntersectionError):
    pass


class InconsistentData(IntersectionError):
    pass


@dataclass(frozen=True)
class LerayData:
    """E_2 page ``e2[p][q] = dim H^p(B; H^q(F))`` plus page differentials.

    ``differentials[(r, p, q)]`` is the matrix of ``d_r : E_r^{p,q} ->
    E_r^{p+r, q-r+1}`` in page coordinates; absent entries are zero. Page
    coordinates for ``r >= 3`` follow :func:`_next_page`.
    """

    b: int
    f: int
    e2: tuple[tuple[int, ...], ...]
    differentials: Mapping[tuple[int, int, int], RatMatrix] = field(default_factory=dict)
    abutment_check: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "e2", tuple(tuple(int(x) for x in row) for row in self.e2))
        object.__setattr__(self, "differentials", dict(self.differentials))
        if self.abutment_check is not None:
            object.__setattr__(self, "abutment_check", tuple(int(x) for x in self.abutment_check))
        if len(self.e2) != self.b + 1 or any(len(row) != self.f + 1 for row in self.e2):
            raise IntersectionError(f"e2 grid must be {self.b + 1} x {self.f + 1} (p x q)")
        if any(x < 0 for row in self.e2 for x in row):
            raise IntersectionError("negative E_2 entry")
        for (r, p, q) in self.differentials:
            if r < 2:
                raise IntersectionError(f"differential d_{r} at ({p},{q}): pages start at r = 2")
        full = einf(self)
        if self.abutment_check is not None:
            tot = totals(full, self.b + self.f + 1)
            if tuple(tot) != tuple(self.abutment_check):
                raise IntersectionError(
                    f"spectral sequence abuts to {tot}, abutment_check says {list(self.abutment_check)}"
                )

    @property
    def n(self) -> int:
        return self.b + self.f + 1

    def __hash__(self):
        return hash((self.b, self.f, self.e2, tuple(sorted(self.differentials.items()))))


def product_leray(betti_B, betti_F) -> LerayData:
    """Leray data of a fibration with trivial monodromy and zero differentials."""
    e2 = tuple(tuple(bp * fq for fq in betti_F) for bp in betti_B)
    return LerayData(len(betti_B) - 1, len(betti_F) - 1, e2)


def default_leray(p: StratumProfile) -> LerayData:
    """Künneth E_2 with zero differentials; must reproduce ``betti_dM``."""
    l = product_leray(p.betti_B, p.betti_F)
    if totals(einf(l), p.n) != list(p.betti_dM):
        raise InsufficientData(
            "no Leray data given and the Künneth guess does not abut to betti_dM; "
            "supply the E_2 page and differentials"
        )
    return l


def totals(page: Mapping[tuple[int, int], int], length: int) -> list[int]:
    out = [0] * length
    for (p, q), d in page.items():
        if d:
            out[p + q] += d
    return out


def _next_page(out_m: Optional[RatMatrix], in_m: Optional[RatMatrix], dim: int) -> int:
    """Dimension of ker(out) / im(in) at one position.

    Coordinates on the next page: the kernel basis from :func:`nullspace`
    (one vector per free column), modulo the image, with the quotient
    represented by the kernel coordinates that are not pivots of the image's
    row echelon form.
    """
    if out_m is None or out_m.is_zero():
        zdim = dim
        z = None
    else:
        z = nullspace(out_m)
        zdim = z.cols
    if in_m is None or in_m.is_zero():
        return zdim
    if out_m is not None and not (out_m @ in_m).is_zero():
        raise IntersectionError("d_r o d_r != 0")
    img = in_m if z is None else solve(z, in_m)
    return zdim - rank(img)


def _run(l: LerayData, rows: int) -> tuple[dict, dict]:
    """Run the sequence keeping rows ``q < rows``.

    Returns the E_inf dims and, for the truncated run, the set of positions
    that differ from the untruncated sequence (``dirty``).
    """
    b, f = l.b, l.f
    dims = {(p, q): l.e2[p][q] for p in range(b + 1) for q in range(min(rows, f + 1))}
    truncated = rows <= f
    full_dims = {(p, q): l.e2[p][q] for p in range(b + 1) for q in range(f + 1)}
    dirty: set[tuple[int, int]] = set()
    last_r = min(f + 1, b)
    for r in range(2, last_r + 1):
        out: dict[tuple[int, int], Optional[RatMatrix]] = {}
        full_out: dict[tuple[int, int], Optional[RatMatrix]] = {}
        for (p, q), d in full_dims.items():
            tgt = (p + r, q - r + 1)
            m = l.differentials.get((r, p, q))
            if tgt not in full_dims:
                if m is not None and not m.is_zero():
                    raise IntersectionError(f"d_{r} at ({p},{q}) leaves the first quadrant")
                full_out[(p, q)] = None
                continue
            if m is not None and m.shape != (full_dims[tgt], d):
                raise IntersectionError(
                    f"d_{r} at ({p},{q}): shape {m.shape}, page expects {(full_dims[tgt], d)}"
                )
            full_out[(p, q)] = m
        for (p, q), d in dims.items():
            tgt = (p + r, q - r + 1)
            m = full_out.get((p, q))
            if tgt not in dims or m is None or m.is_zero():
                out[(p, q)] = None
                continue
            if (p, q) in dirty or tgt in dirty:
                raise InsufficientData(
                    f"truncated d_{r} at ({p},{q}) is not determined by the untruncated page data"
                )
            out[(p, q)] = m
        new_dirty = set(dirty)
        if truncated:
            for (p, q), m in full_out.items():
                tgt = (p + r, q - r + 1)
                if q >= rows and tgt in dims and m is not None and not m.is_zero():
                    new_dirty.add(tgt)
        full_new = {}
        for pos, d in full_dims.items():
            src = (pos[0] - r, pos[1] + r - 1)
            full_new[pos] = _next_page(full_out.get(pos), full_out.get(src), d)
        new = {}
        for pos, d in dims.items():
            src = (pos[0] - r, pos[1] + r - 1)
            new[pos] = _next_page(out.get(pos), out.get(src) if src in dims else None, d)
        dims, full_dims, dirty = new, full_new, new_dirty
    return dims, dirty


@lru_cache(maxsize=512)
def _einf_cached(l: LerayData, rows: int):
    dims, dirty = _run(l, rows)
    return tuple(sorted(dims.items())), frozenset(dirty)


def einf(l: LerayData, rows: Optional[int] = None) -> dict[tuple[int, int], int]:
    rows = l.f + 1 if rows is None else max(0, min(rows, l.f + 1))
    return dict(_einf_cached(l, rows)[0])


def truncated_leray(l: LerayData, ell: int, j: Perversity) -> list[int]:
    """dims of IH^k_j(N(B), B), k = 0..n-1: rows q >= ell-1-j are discarded."""
    if ell != l.f + 1:
        raise IntersectionError(f"ell = {ell} but the fibre has dimension {l.f}")
    return totals(einf(l, ell - 1 - j), l.n)


def filtration_dims(l: LerayData, k: int, s: int) -> int:
    """dim F^s H^k(dM) = sum of E_inf^{p,k-p} over p >= s."""
    full = einf(l)
    return sum(d for (p, q), d in full.items() if p + q == k and p >= s)


@dataclass(frozen=True)
class IHTable:
    j: Perversity
    dims: tuple[int, ...]
    engine: str


def _check_leray(p: StratumProfile, l: LerayData) -> None:
    if (l.b, l.f) != (p.b, p.f):
        raise InconsistentData(f"Leray data has (b,f) = {(l.b, l.f)}, profile {(p.b, p.f)}")
    tot = totals(einf(l), p.n)
    if tot != list(p.betti_dM):
        raise InconsistentData(f"Leray sequence abuts to {tot}, betti_dM = {list(p.betti_dM)}")
    if p.betti_F[0] == 1 and tuple(row[0] for row in l.e2) != p.betti_B:
        raise InconsistentData("E_2 row q = 0 must equal betti_B for a connected fibre")


def _rows_kept(p: StratumProfile, j: int) -> int:
    return max(0, min(p.ell - 1 - j, p.f + 1))


def _splice_block(p: StratumProfile, l: LerayData, j: int, k: int) -> tuple[int, int, int]:
    """(dim A^k + dim N^k, rank, dim C^k) for phi_k : H^k(Mbar) + IH^k_j(N) -> H^k(dM)."""
    n = p.n
    if k < 0 or k > n:
        return 0, 0, 0
    if k == n:
        return p.betti_M[n], 0, 0
    c = _rows_kept(p, j)
    nk = totals(einf(l, c), n)[k]
    fdim = filtration_dims(l, k, k - c + 1)
    cdim = p.betti_dM[k]
    r = p.restriction[k]
    incl = RatMatrix.from_rows(
        [[int(i == cdim - fdim + t) for t in range(fdim)] for i in range(cdim)], fdim
    ) if cdim else RatMatrix.zeros(0, fdim)
    rk = span_dim(r, incl)
    return p.betti_M[k] + nk, rk, cdim


def _require_matrices(p: StratumProfile) -> None:
    if not p.has_matrices:
        raise InsufficientData(
            "insufficient data for Engine B: restriction matrices are required, "
            "ranks alone do not determine the Mayer-Vietoris maps"
        )


def ih_extended(p: StratumProfile, l: Optional[LerayData], j: Perversity) -> IHTable:
    """Engine B: Mayer-Vietoris splice with the truncated Leray sequence."""
    _require_matrices(p)
    l = default_leray(p) if l is None else l
    _check_leray(p, l)
    dims = []
    coker_prev = 0
    for k in range(p.n + 1):
        src, rk, cdim = _splice_block(p, l, j, k)
        dims.append(src - rk + coker_prev)
        coker_prev = cdim - rk
    pinned = min(p.ell - 1 - j, p.n + 1)
    for k in range(max(pinned, 0)):
        if dims[k] != p.betti_M[k]:
            raise InconsistentData(
                f"IH^{k}_{j} = {dims[k]} but degrees below ell-1-j must give H^{k}(M) = {p.betti_M[k]}"
            )
    return IHTable(j, tuple(dims), "SpectralSequence")


def _euler_block(p: StratumProfile, l: Optional[LerayData], k: int) -> int:
    """dim E_inf^{k,0} for a sphere bundle: cokernel of the Euler class into H^k(B)."""
    if k > p.b or k < 0:
        return 0
    base = p.betti_B[k]
    s = k - p.f - 1
    if l is None or s < 0:
        return base
    m = l.differentials.get((p.f + 1, s, p.f))
    return base - (rank(m) if m is not None else 0)


def _delta_rank(p: StratumProfile, l: Optional[LerayData], k: int) -> int:
    """rank of H^k(B) -> H^{k+1}(X, B) in the long exact sequence of (X, B)."""
    if k < 0 or k >= p.n:
        return 0
    blk = _euler_block(p, l, k)
    r = p.restriction[k]
    cdim = p.betti_dM[k]
    incl = RatMatrix.from_rows(
        [[int(i == cdim - blk + t) for t in range(blk)] for i in range(cdim)], blk
    ) if cdim else RatMatrix.zeros(0, blk)
    return span_dim(r, incl) - rank(r)


def engine_a_applicable(p: StratumProfile, j: Perversity) -> bool:
    if j <= -1 or j >= p.ell - 1:
        return True
    return p.fibre_is_sphere() and p.has_matrices


def ih_closed_form(p: StratumProfile, j: Perversity, k: int,
                   l: Optional[LerayData] = None) -> int:
    """Engine A: absolute, relative, or (sphere fibre) manifold cohomology of X."""
    if not 0 <= k <= p.n:
        return 0
    if j <= -1:
        return p.betti_M[k]
    pc = pair_cohomology(p)
    if j >= p.ell - 1:
        return pc.betti_rel[k]
    if not p.fibre_is_sphere():
        raise EngineInapplicable(
            f"Engine A inapplicable: j = {j} lies in 0..ell-2 and the fibre is not a sphere"
        )
    _require_matrices(p)
    base = p.betti_B[k] if k <= p.b else 0
    return pc.betti_rel[k] - _delta_rank(p, l, k - 1) + base - _delta_rank(p, l, k)


def ih_closed_form_table(p: StratumProfile, j: Perversity,
                         l: Optional[LerayData] = None) -> IHTable:
    return IHTable(j, tuple(ih_closed_form(p, j, k, l) for k in range(p.n + 1)), "ClosedForm")


def duality_defect(p: StratumProfile, l: Optional[LerayData], j: Perversity) -> int:
    """sum_k |IH^k_j - IH^{n-k}_{ell-2-j}|; zero for honest input."""
    a = ih_extended(p, l, j).dims
    b = ih_extended(p, l, p.ell - 2 - j).dims
    return sum(abs(a[k] - b[p.n - k]) for k in range(p.n + 1))


def _injective_edge(p: StratumProfile, l: LerayData, j: int) -> bool:
    c = _rows_kept(p, j)
    nk = totals(einf(l, c), p.n)
    return all(nk[k] == filtration_dims(l, k, k - c + 1) for k in range(p.n))


def natural_map_rank(p: StratumProfile, l: Optional[LerayData], j: Perversity, k: int,
                     natural_maps: Optional[Mapping[tuple[int, int], RatMatrix]] = None,
                     ) -> tuple[int, str]:
    """Rank of the natural map IH^k_j -> IH^k_{j-1}, with the route used.

    Routes, in order: a supplied matrix; identical truncations; image of
    relative in absolute cohomology; the sphere-fibre long exact sequence;
    the Mayer-Vietoris model when both edge maps are injective.
    """
    if natural_maps and (j, k) in natural_maps:
        return rank(natural_maps[(j, k)]), "supplied-map"
    ell = p.ell
    lo, hi = j - 1, j
    if not 0 <= k <= p.n:
        return 0, "out-of-range"
    if hi <= -1:
        return p.betti_M[k], "absolute"
    if lo >= ell - 1:
        return pair_cohomology(p).betti_rel[k], "relative"
    if hi >= ell - 1 and lo <= -1:
        return pair_cohomology(p).image_ranks[k], "relative->absolute"
    l_eff = l
    if l_eff is None and p.has_matrices:
        l_eff = default_leray(p)
    if l_eff is not None:
        row = _rows_kept(p, hi)
        if row == _rows_kept(p, lo) or (row <= p.f and all(l_eff.e2[q][row] == 0 for q in range(p.b + 1))):
            return _dim(p, l_eff, hi, k), "identical-truncation"
    if p.fibre_is_sphere() and p.has_matrices:
        if hi >= ell - 1:
            # H(X, B) -> H(X)
            return pair_cohomology(p).betti_rel[k] - _delta_rank(p, l_eff, k - 1), "sphere:rel->X"
        if lo <= -1:
            # H(X) -> H(X - B)
            blk = _euler_block(p, l_eff, k) if k < p.n else 0
            if k >= p.n:
                return p.betti_M[k], "sphere:X->abs"
            r = p.restriction[k]
            cdim = p.betti_dM[k]
            incl = RatMatrix.from_rows(
                [[int(i == cdim - blk + t) for t in range(blk)] for i in range(cdim)], blk
            ) if cdim else RatMatrix.zeros(0, blk)
            return p.betti_M[k] + blk - span_dim(r, incl), "sphere:X->abs"
        return _dim(p, l_eff, hi, k), "sphere:X->X"
    if p.has_matrices and l_eff is not None:
        _check_leray(p, l_eff)
        if _injective_edge(p, l_eff, hi) and _injective_edge(p, l_eff, lo):
            src, rk, _ = _splice_block(p, l_eff, hi, k)
            _, rk_prev, cdim_prev = _splice_block(p, l_eff, lo, k - 1)
            return (src - rk) + (cdim_prev - rk_prev), "mayer-vietoris"
    raise InsufficientData(
        f"rank of IH^{k}_{hi} -> IH^{k}_{lo} needs the natural map as input for this profile"
    )


def _dim(p: StratumProfile, l: Optional[LerayData], j: int, k: int) -> int:
    if p.has_matrices:
        return ih_extended(p, l, j).dims[k]
    return ih_closed_form(p, j, k, l)


class IHQuery:
    """Cached access to IH tables for one profile; picks whichever engine applies."""

    def __init__(self, profile: StratumProfile, leray: Optional[LerayData] = None,
                 natural_maps: Optional[Mapping[tuple[int, int], RatMatrix]] = None):
        self.profile = profile
        self.leray = leray
        self.natural_maps = dict(natural_maps or {})
        self._tables: dict[int, IHTable] = {}

    def table(self, j: Perversity) -> IHTable:
        if j not in self._tables:
            p = self.profile
            if p.has_matrices:
                self._tables[j] = ih_extended(p, self.leray, j)
            elif engine_a_applicable(p, j):
                self._tables[j] = ih_closed_form_table(p, j, self.leray)
            else:
                raise InsufficientData(
                    f"IH_{j} needs restriction matrices (Engine B) for this profile"
                )
        return self._tables[j]

    def dim(self, j: Perversity, k: int) -> int:
        return self.table(j).dims[k]

    def natural_rank(self, j: Perversity, k: int) -> tuple[int, str]:
        return natural_map_rank(self.profile, self.leray, j, k, self.natural_maps)
