"""Topological input for a manifold whose boundary is a fibration F -> dM -> B.

``M`` is the interior of the compact manifold with boundary ``Mbar``; ``X``
is obtained from ``Mbar`` by collapsing the fibres of the boundary, leaving
one singular stratum ``B`` of codimension ``ell = f + 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .exactlin import RatMatrix, rank


class ProfileError(ValueError):
    pass


class MetricClass(str, enum.Enum):
    B = "B"
    SCATTERING = "Scattering"
    FIBRED_CUSP = "FibredCusp"
    FIBRED_BOUNDARY = "FibredBoundary"

    @property
    def needs_trivial_fibre(self) -> bool:
        return self in (MetricClass.B, MetricClass.SCATTERING)

    @classmethod
    def parse(cls, text: str) -> "MetricClass":
        aliases = {
            "b": cls.B, "scattering": cls.SCATTERING, "sc": cls.SCATTERING,
            "fibredcusp": cls.FIBRED_CUSP, "fc": cls.FIBRED_CUSP,
            "fibredboundary": cls.FIBRED_BOUNDARY, "fb": cls.FIBRED_BOUNDARY,
        }
        key = text.replace("_", "").replace("-", "").replace(" ", "").lower()
        try:
            return aliases[key]
        except KeyError:
            raise ProfileError(f"unknown metric class {text!r}") from None


# A perversity here is just its value j at the single singular stratum; any
# integer is allowed.
Perversity = int


def _poincare_symmetric(v: Sequence[int]) -> bool:
    return all(v[k] == v[len(v) - 1 - k] for k in range(len(v)))


@dataclass(frozen=True)
class StratumProfile:
    n: int
    b: int
    f: int
    betti_M: tuple[int, ...]
    betti_dM: tuple[int, ...]
    betti_B: tuple[int, ...]
    betti_F: tuple[int, ...]
    restriction: Optional[tuple[RatMatrix, ...]] = None
    restriction_ranks: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        for name in ("betti_M", "betti_dM", "betti_B", "betti_F"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        if self.restriction is not None:
            object.__setattr__(self, "restriction", tuple(self.restriction))
        if self.restriction_ranks is not None:
            object.__setattr__(self, "restriction_ranks", tuple(int(x) for x in self.restriction_ranks))
        self.validate()

    @property
    def ell(self) -> int:
        """Codimension of the singular stratum of ``X``."""
        return self.f + 1

    def validate(self) -> None:
        n, b, f = self.n, self.b, self.f
        if min(n, b, f) < 0:
            raise ProfileError("dimensions must be nonnegative")
        if n != b + f + 1:
            raise ProfileError(f"fibration dimensions violate n = b + f + 1 ({n} != {b}+{f}+1)")
        checks = [("betti_M", n + 1), ("betti_dM", n), ("betti_B", b + 1), ("betti_F", f + 1)]
        for name, length in checks:
            v = getattr(self, name)
            if len(v) != length:
                raise ProfileError(f"{name}: expected {length} entries, got {len(v)}")
            if any(x < 0 for x in v):
                raise ProfileError(f"{name}: negative Betti number")
        if self.betti_M[0] < 1:
            raise ProfileError("betti_M[0] must be >= 1")
        if self.betti_F[0] < 1 or self.betti_F[0] != self.betti_F[f]:
            raise ProfileError("betti_F: need betti_F[0] = betti_F[f] >= 1 (closed oriented fibre)")
        if self.betti_B[0] != 1:
            raise ProfileError("betti_B[0] must be 1 (connected base)")
        if f == 0 and self.betti_B != self.betti_dM:
            raise ProfileError("f = 0 means B = dM, but betti_B != betti_dM")
        # B may be non-orientable (its rational Betti numbers need not be
        # symmetric); the closed orientable total space dM must be.
        if not _poincare_symmetric(self.betti_dM):
            raise ProfileError("betti_dM violates Poincare symmetry")
        if self.restriction is not None:
            if len(self.restriction) != n:
                raise ProfileError(f"restriction: expected {n} matrices (degrees 0..n-1)")
            for k, r in enumerate(self.restriction):
                want = (self.betti_dM[k], self.betti_M[k])
                if r.shape != want:
                    raise ProfileError(f"restriction[{k}]: shape {r.shape}, expected {want}")
            ranks = tuple(rank(r) for r in self.restriction)
            if self.restriction_ranks is not None and ranks != self.restriction_ranks:
                raise ProfileError("restriction_ranks disagree with the restriction matrices")
        if self.restriction_ranks is not None:
            if len(self.restriction_ranks) != n:
                raise ProfileError(f"restriction_ranks: expected {n} entries")
            for k, rk in enumerate(self.restriction_ranks):
                if not 0 <= rk <= min(self.betti_M[k], self.betti_dM[k]):
                    raise ProfileError(f"restriction_ranks[{k}] = {rk} out of range")

    @property
    def has_matrices(self) -> bool:
        return self.restriction is not None

    def restriction_rank_vector(self) -> tuple[int, ...]:
        if self.restriction is not None:
            return tuple(rank(r) for r in self.restriction)
        if self.restriction_ranks is not None:
            return self.restriction_ranks
        raise ProfileError("profile carries neither restriction matrices nor restriction ranks")

    def fibre_is_sphere(self) -> bool:
        """True when F is a rational homology sphere of positive dimension."""
        if self.f == 0:
            return False
        return self.betti_F == (1,) + (0,) * (self.f - 1) + (1,)


@dataclass(frozen=True)
class PairCohomology:
    betti_rel: tuple[int, ...]
    image_ranks: tuple[int, ...]


def relative_betti(betti_M: Sequence[int], betti_dM: Sequence[int],
                   ranks: Sequence[int]) -> PairCohomology:
    """Chase the long exact sequence of the pair (Mbar, dM).

    ``ranks[k]`` is the rank of restriction in degree k; degrees past the end of
    ``ranks`` or ``betti_dM`` count as zero.
    """
    n = len(betti_M) - 1

    def dm(k):
        return betti_dM[k] if 0 <= k < len(betti_dM) else 0

    def rk(k):
        return ranks[k] if 0 <= k < len(ranks) else 0

    rel, img = [], []
    for k in range(n + 1):
        ker_k = betti_M[k] - rk(k)
        coker_prev = dm(k - 1) - rk(k - 1)
        rel.append(coker_prev + ker_k)
        img.append(ker_k)
    return PairCohomology(tuple(rel), tuple(img))


def pair_cohomology(p: StratumProfile) -> PairCohomology:
    return relative_betti(p.betti_M, p.betti_dM, p.restriction_rank_vector())


def middle_perversities(f: int) -> tuple[Perversity, Perversity]:
    """(lower middle, upper middle) values at the stratum of codimension f + 1."""
    if f < 0:
        raise ProfileError("fibre dimension must be >= 0")
    if f % 2:
        return ((f - 1) // 2, (f - 1) // 2)
    return (f // 2, f // 2 - 1)


def is_witt(p: StratumProfile) -> bool:
    if p.f % 2:
        return True
    return p.betti_F[p.f // 2] == 0
