"""Dimensions of L^2 harmonic forms for the four metric classes, plus signatures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactlin import RatMatrix, inertia, signature, to_fraction
from .intersection import IHQuery
from .topo import MetricClass, Perversity, StratumProfile, is_witt, middle_perversities, pair_cohomology


class HodgeError(ValueError):
    pass


class NonFredholmWeight(HodgeError):
    pass


@dataclass(frozen=True)
class HodgeTable:
    dims: tuple[int, ...]
    case_tags: tuple[str, ...]
    metric: MetricClass


def _fc_perversity(a: Fraction, f: int) -> Perversity:
    for k in range(f + 1):
        if k - 1 + a - Fraction(f, 2) == 0:
            raise NonFredholmWeight(
                f"non-Fredholm weight a = {a}: hits the excluded value f/2 + 1 - {k}"
            )
    return math.floor(a + Fraction(f, 2))


def weight_to_perversity(a, k: int, p: StratumProfile, m: MetricClass) -> Perversity:
    """Perversity j with WH^k(M, a) = IH^k_j(X, B).

    Fibred cusp: j = floor(a + f/2). Fibred boundary weights are first moved to
    the conformally related cusp weight n/2 - k + a. B and scattering metrics
    are the f = 0 cases of these two.
    """
    a = to_fraction(a)
    if m in (MetricClass.FIBRED_CUSP, MetricClass.B):
        return _fc_perversity(a, p.f)
    return _fc_perversity(Fraction(p.n, 2) - k + a, p.f)


def _natural(ih: IHQuery, j: int, k: int, label: str) -> tuple[int, str]:
    r, route = ih.natural_rank(j, k)
    return r, f"{label}/rank IH_{j}->IH_{j - 1} ({route})"


def hodge_dims(p: StratumProfile, m: MetricClass, ih: Optional[IHQuery] = None) -> HodgeTable:
    m = MetricClass(m)
    if m.needs_trivial_fibre and p.f != 0:
        raise HodgeError(f"{m.value} metrics have trivial fibre, got f = {p.f}")
    ih = IHQuery(p) if ih is None else ih
    n = p.n
    dims: list[int] = []
    tags: list[str] = []
    if m is MetricClass.B:
        img = pair_cohomology(p).image_ranks
        dims = list(img)
        tags = ["b/image rel->abs"] * (n + 1)
    elif m is MetricClass.SCATTERING:
        pc = pair_cohomology(p)
        for k in range(n + 1):
            if 2 * k < n:
                dims.append(pc.betti_rel[k])
                tags.append("scattering/k<n/2 relative")
            elif 2 * k == n:
                dims.append(pc.image_ranks[k])
                tags.append("scattering/k=n/2 image rel->abs")
            else:
                dims.append(p.betti_M[k])
                tags.append("scattering/k>n/2 absolute")
    elif m is MetricClass.FIBRED_CUSP:
        lo, hi = middle_perversities(p.f)
        witt = p.f > 0 and is_witt(p)
        for k in range(n + 1):
            if lo == hi or witt:
                dims.append(ih.dim(lo, k))
                tags.append(f"fc/{'Witt' if lo != hi else 'f odd'} IH_{lo}")
            else:
                r, tag = _natural(ih, lo, k, "fc/non-Witt")
                dims.append(r)
                tags.append(tag)
    else:
        b, f = p.b, p.f
        for k in range(n + 1):
            if b % 2 == 0:
                j = f + b // 2 - k
                dims.append(ih.dim(j, k))
                tags.append(f"fb/b-even/j=f+b/2-k={j}")
            else:
                j = f + (b + 1) // 2 - k
                r, tag = _natural(ih, j, k, "fb/b-odd")
                dims.append(r)
                tags.append(tag)
    if any(d < 0 for d in dims):
        raise HodgeError(f"negative dimension in {dims}")
    return HodgeTable(tuple(dims), tuple(tags), m)


@dataclass(frozen=True)
class PairingInput:
    """Middle-degree intersection forms, supplied externally.

    ``matrix`` lives on the image of lower- in upper-middle IH (equivalently on
    the L^2 harmonic forms); ``rel_matrix`` on the image of relative in
    absolute cohomology.
    """

    matrix: RatMatrix
    rel_matrix: Optional[RatMatrix] = None

    def __post_init__(self):
        for name in ("matrix", "rel_matrix"):
            mat = getattr(self, name)
            if mat is not None and not mat.is_symmetric():
                raise HodgeError(f"pairing {name} must be symmetric")


def l2_signature(pair: PairingInput, expected_size: Optional[int] = None) -> int:
    if expected_size is not None and pair.matrix.rows != expected_size:
        raise HodgeError(
            f"pairing matrix is {pair.matrix.rows}x{pair.matrix.rows}, middle L^2 dimension is {expected_size}"
        )
    return signature(pair.matrix)


def tau_invariant(pair: PairingInput) -> int:
    if pair.rel_matrix is None:
        raise HodgeError("tau needs both pairing matrices")
    return signature(pair.matrix) - signature(pair.rel_matrix)


@dataclass(frozen=True)
class HyperkahlerReport:
    checks: tuple[tuple[str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def hyperkahler_checks(t: HodgeTable, sig: int, is_hk: bool, quaternionic_k: int,
                       rel_matrix: Optional[RatMatrix] = None) -> HyperkahlerReport:
    """Property checks for complete hyperkähler metrics of real dimension 4k."""
    if not is_hk:
        return HyperkahlerReport(())
    k = quaternionic_k
    mid = 2 * k
    checks = [
        ("dimension is 4k", len(t.dims) - 1 == 4 * k),
        ("concentrated in degree 2k", all(d == 0 for i, d in enumerate(t.dims) if i != mid)),
        ("sum dims = |signature|", sum(t.dims) == abs(sig)),
        ("signature sign matches parity of k", sig >= 0 if k % 2 == 0 else sig <= 0),
    ]
    if rel_matrix is not None:
        it = inertia(rel_matrix)
        checks.append(("relative pairing semidefinite", it.n_plus == 0 or it.n_minus == 0))
    return HyperkahlerReport(tuple(checks))
