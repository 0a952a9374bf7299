"""Indicial roots of the Hodge-de Rham operator at a fibred end.

Roots have the form ``c ± sqrt(D)`` with rational ``c, D``, so they are kept
as exact quadratic surds and compared by squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Sequence

from .exactlin import to_fraction
from .topo import MetricClass


class IndicialError(ValueError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree; returns (s, d)."""
    s, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1
    return s, d * m


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign1(u: Fraction, v: Fraction, d: int) -> int:
    """sign of u + v*sqrt(d)."""
    if v == 0 or d == 0:
        return _sign(u)
    su, sv = _sign(u), _sign(v)
    if su == 0 or su == sv:
        return sv
    return su * _sign(u * u - v * v * d)


@total_ordering
@dataclass(frozen=True)
class Surd:
    """``a + b*sqrt(d)`` with ``d`` a squarefree positive integer (or b = 0)."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.d)
        if d < 0:
            raise IndicialError("negative radicand")
        if b == 0 or d == 0:
            b, d = Fraction(0), 1
        elif d == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def sqrt(cls, x) -> "Surd":
        x = to_fraction(x)
        if x < 0:
            raise IndicialError(f"sqrt of negative {x}")
        # sqrt(p/q) = sqrt(p*q)/q
        s, d = _squarefree_split(x.numerator * x.denominator)
        return cls(Fraction(0), Fraction(s, x.denominator), d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __neg__(self) -> "Surd":
        return Surd(-self.a, -self.b, self.d)

    def __add__(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.b == 0:
                return Surd(self.a + other.a, self.b, self.d)
            if self.b == 0 or self.d == other.d:
                return Surd(self.a + other.a, self.b + other.b, other.d)
            raise IndicialError("sum of surds with different radicands")
        return Surd(self.a + to_fraction(other), self.b, self.d)

    __radd__ = __add__

    def __sub__(self, other) -> "Surd":
        return self + (-other if isinstance(other, Surd) else -to_fraction(other))

    def _cmp(self, other) -> int:
        o = other if isinstance(other, Surd) else Surd(to_fraction(other))
        u = self.a - o.a
        if self.b == 0 or o.b == 0 or self.d == o.d:
            v = self.b - o.b
            return _sign1(u, v, self.d if self.b else o.d)
        # u + b1 sqrt(d1) - b2 sqrt(d2): compare A = u + b1 sqrt(d1) with B = b2 sqrt(d2)
        sa = _sign1(u, self.b, self.d)
        sb = _sign(o.b)
        if sa != sb:
            return (sa > sb) - (sa < sb)
        # same sign: compare A^2 with B^2 = b2^2 d2
        diff = _sign1(u * u + self.b * self.b * self.d - o.b * o.b * o.d, 2 * u * self.b, self.d)
        return sa * diff

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        rad = f"sqrt({self.d})"
        coef = "" if abs(self.b) == 1 else f"{abs(self.b)}*"
        if self.a == 0:
            return f"{'-' if self.b < 0 else ''}{coef}{rad}"
        return f"{self.a} {'-' if self.b < 0 else '+'} {coef}{rad}"


@dataclass(frozen=True)
class SpectrumEntry:
    lambda_sq: Fraction
    degree: int
    multiplicity: int = 1


@dataclass(frozen=True)
class BaseSpectrum:
    eigenvalues: tuple[SpectrumEntry, ...] = ()
    b: Optional[int] = None

    def __post_init__(self):
        entries = []
        for e in self.eigenvalues:
            if not isinstance(e, SpectrumEntry):
                e = SpectrumEntry(*e)
            e = SpectrumEntry(to_fraction(e.lambda_sq), int(e.degree), int(e.multiplicity))
            if e.lambda_sq < 0:
                raise IndicialError(f"negative eigenvalue {e.lambda_sq}")
            if e.degree < 0 or (self.b is not None and e.degree > self.b):
                raise IndicialError(f"form degree {e.degree} out of range")
            if e.multiplicity < 1:
                raise IndicialError("multiplicity must be >= 1")
            entries.append(e)
        object.__setattr__(self, "eigenvalues", tuple(entries))
        if self.b is not None and entries:
            zero_degrees = {e.degree for e in entries if e.lambda_sq == 0}
            if not {0, self.b} <= zero_degrees:
                raise IndicialError("a connected oriented base has harmonic forms in degrees 0 and b")


@dataclass(frozen=True)
class IndicialRoot:
    gamma: Surd
    source: str
    multiplicity: int


@dataclass(frozen=True)
class IndicialReport:
    roots: tuple[IndicialRoot, ...]
    fredholm_gaps: tuple[tuple[Optional[Surd], Optional[Surd]], ...]
    critical: Optional[Fraction] = None
    warnings: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default=())

    def real_parts(self) -> list[Surd]:
        return [r.gamma for r in self.roots]


def _collect(raw: list[tuple[Surd, str, int]], critical, notes=()) -> IndicialReport:
    merged: dict[Surd, list] = {}
    for g, src, mult in raw:
        slot = merged.setdefault(g, [set(), 0])
        slot[0].add(src)
        slot[1] += mult
    ordered = sorted(merged)
    roots = tuple(IndicialRoot(g, ",".join(sorted(merged[g][0])), merged[g][1]) for g in ordered)
    bounds: list[Optional[Surd]] = [None, *ordered, None]
    gaps = tuple((bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1))
    warnings = []
    for i, g in enumerate(ordered):
        for h in ordered[i + 1:]:
            diff = h - g if h.d == g.d or g.b == 0 or h.b == 0 else None
            if diff is not None and diff.b == 0 and diff.a.denominator == 1:
                warnings.append(f"roots {g} and {h} differ by an integer: expansions may carry log terms")
    return IndicialReport(roots, gaps, critical, tuple(warnings), tuple(notes))


def b_indicial(spec: BaseSpectrum) -> IndicialReport:
    raw = []
    for e in spec.eigenvalues:
        lam = Surd.sqrt(e.lambda_sq)
        if e.lambda_sq == 0:
            # ±0 is one root, not a double one
            raw.append((lam, f"lambda=0,deg{e.degree}", e.multiplicity))
        else:
            raw.append((lam, f"+lambda,deg{e.degree}", e.multiplicity))
            raw.append((-lam, f"-lambda,deg{e.degree}", e.multiplicity))
    return _collect(raw, Fraction(0))


def _quadratic_roots(spec: BaseSpectrum, centre: Fraction, shift, tag: str) -> list:
    raw = []
    for e in spec.eigenvalues:
        disc = (shift(e.degree)) ** 2 + e.lambda_sq
        root = Surd.sqrt(disc)
        src = f"{tag},deg{e.degree},lambda^2={e.lambda_sq}"
        if disc == 0:
            raw.append((Surd(centre), src, 2 * e.multiplicity))
        else:
            raw.append((root + centre, src, e.multiplicity))
            raw.append((-root + centre, src, e.multiplicity))
    return raw


_LIMITATION = ("closed/coclosed roots only; coupled solutions near the middle degree "
               "are not enumerated")


def scattering_indicial(spec: BaseSpectrum, n: int) -> IndicialReport:
    """Roots of gamma^2 - n gamma + k(n-k) - lambda^2 = 0 for each (lambda^2, k)."""
    if n < 2:
        raise IndicialError("scattering roots need n >= 2")
    half = Fraction(n, 2)
    raw = _quadratic_roots(spec, half, lambda k: half - k, "scattering")
    return _collect(raw, half - 1, (_LIMITATION,))


def fibred_cusp_indicial(spec: BaseSpectrum, f: int) -> IndicialReport:
    """Model roots -f/2 ± sqrt((f/2 - k)^2 + lambda^2) for fibre-degree k data."""
    half = Fraction(f, 2)
    raw = _quadratic_roots(spec, -half, lambda k: half - k, "fibred-cusp")
    return _collect(raw, -half, (_LIMITATION,))


def critical_weight(m: MetricClass, b: int, f: int) -> Fraction:
    m = MetricClass(m)
    if m is MetricClass.FIBRED_BOUNDARY:
        return Fraction(b - 1, 2)
    if m is MetricClass.FIBRED_CUSP:
        return Fraction(-f, 2)
    if m is MetricClass.SCATTERING:
        return Fraction(b + f + 1, 2) - 1
    return Fraction(0)


def indicial_for(m: MetricClass, spec: BaseSpectrum, n: int, b: int, f: int) -> IndicialReport:
    m = MetricClass(m)
    if m is MetricClass.B:
        return b_indicial(spec)
    if m is MetricClass.SCATTERING:
        return scattering_indicial(spec, n)
    if m is MetricClass.FIBRED_CUSP:
        return fibred_cusp_indicial(spec, f)
    rep = scattering_indicial(spec, b + 1)
    return IndicialReport(rep.roots, rep.fredholm_gaps, critical_weight(m, b, f), rep.warnings, rep.notes)


def is_fredholm(report: IndicialReport, a) -> bool:
    a = a if isinstance(a, Surd) else Surd(to_fraction(a))
    return all(r.gamma != a for r in report.roots)


def parse_spectrum(entries: Sequence, b: Optional[int] = None) -> BaseSpectrum:
    return BaseSpectrum(tuple(SpectrumEntry(*e) if not isinstance(e, SpectrumEntry) else e for e in entries), b)
