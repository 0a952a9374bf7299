"""Multi-Taub-NUT metrics from monopole data and their L^2 harmonic 2-forms.

Conventions:

* ``V = 1 + sum_i 2m/|x - p_i|`` and ``g = V dx.dx + V^{-1} (dtheta + alpha)^2``.
* ``alpha_i`` solves ``d alpha_i = *dV_i`` in flat R^3. The "lower" gauge has
  its Dirac string on the half-line below ``p_i``, the "upper" gauge above.
* ``theta`` has period ``8 pi m`` so that the metric closes up smoothly at
  every monopole.
* Two-forms are stored as six coordinate components in the order
  ``(12, 13, 23, 1t, 2t, 3t)``, with ``t = theta`` as the fourth coordinate.
* Orientation ``dx1 dx2 dx3 dtheta``; with it the forms ``Omega_i`` are
  anti-self-dual (``ASD_SIGN``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cubature

ASD_SIGN = -1
PAIRS = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))


class GHError(ValueError):
    pass


class SingularPoint(GHError):
    pass


class ChartError(GHError):
    pass


class GramDivergence(GHError):
    pass


@dataclass(frozen=True)
class MonopoleConfig:
    m: float
    points: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "m", float(self.m))
        if not self.m > 0:
            raise GHError("mass m must be positive")
        if not pts:
            raise GHError("need at least one monopole")
        if any(len(p) != 3 for p in pts):
            raise GHError("monopole points live in R^3")
        if len(set(pts)) != len(pts):
            raise GHError("monopole points must be distinct")

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def theta_period(self) -> float:
        return 8 * math.pi * self.m

    @property
    def on_axis(self) -> bool:
        return all(p[0] == 0 and p[1] == 0 for p in self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)


@dataclass(frozen=True)
class Potential:
    V: float
    gradV: np.ndarray
    V_i: np.ndarray
    gradV_i: np.ndarray


def _rel(c: MonopoleConfig, x) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(x, dtype=float)[None, :] - c.array()
    r = np.linalg.norm(d, axis=1)
    if np.any(r < 1e-12):
        raise SingularPoint(f"point {tuple(x)} is a monopole")
    return d, r


def potential(c: MonopoleConfig, x) -> Potential:
    d, r = _rel(c, x)
    vi = 2 * c.m / r
    gi = -2 * c.m * d / r[:, None] ** 3
    return Potential(1 + vi.sum(), gi.sum(axis=0), vi, gi)


def _alpha_terms(c: MonopoleConfig, x, gauge: str, eps_string: float) -> np.ndarray:
    d, r = _rel(c, x)
    rho = np.hypot(d[:, 0], d[:, 1])
    if gauge == "lower":
        bad = (rho < eps_string) & (d[:, 2] < 0)
        denom = r * (r + d[:, 2])
        sign = -1.0
    elif gauge == "upper":
        bad = (rho < eps_string) & (d[:, 2] > 0)
        denom = r * (r - d[:, 2])
        sign = 1.0
    else:
        raise GHError(f"unknown gauge {gauge!r}")
    if np.any(bad):
        raise ChartError(f"point {tuple(x)} is within {eps_string} of a Dirac string ({gauge} gauge)")
    out = np.zeros((c.k, 3))
    out[:, 0] = -d[:, 1]
    out[:, 1] = d[:, 0]
    return sign * 2 * c.m * out / denom[:, None]


def alpha_at(c: MonopoleConfig, x, gauge: str = "lower", eps_string: float = 1e-3) -> np.ndarray:
    """Cartesian components of alpha = sum_i alpha_i."""
    return _alpha_terms(c, x, gauge, eps_string).sum(axis=0)


def alpha_term(c: MonopoleConfig, i: int, x, gauge: str = "lower", eps_string: float = 1e-3) -> np.ndarray:
    """alpha_i alone, so each monopole can use its own string gauge."""
    return _alpha_terms(c, x, gauge, eps_string)[i]


def metric_at(c: MonopoleConfig, x, theta: float = 0.0, gauge: str = "lower",
              eps_string: float = 1e-3) -> np.ndarray:
    # theta is a cyclic coordinate; it only enters as a chart point label
    del theta
    V = potential(c, x).V
    a = alpha_at(c, x, gauge, eps_string)
    g = np.zeros((4, 4))
    g[:3, :3] = V * np.eye(3) + np.outer(a, a) / V
    g[:3, 3] = g[3, :3] = a / V
    g[3, 3] = 1 / V
    return g


def _a_vectors(V, gradV, V_i, gradV_i):
    return gradV_i - (V_i / V)[..., None] * gradV[..., None, :]


def omega_at(c: MonopoleConfig, i: int, x, theta: float = 0.0, gauge: str = "lower",
             eps_string: float = 1e-3) -> np.ndarray:
    """Omega_i = d(alpha_i - (V_i/V)(dtheta + alpha)) in closed form."""
    del theta
    if not 0 <= i < c.k:
        raise GHError(f"monopole index {i} out of range")
    pot = potential(c, x)
    alpha = alpha_at(c, x, gauge, eps_string)
    a = _a_vectors(pot.V, pot.gradV, pot.V_i, pot.gradV_i)[i]
    bvec = -a / pot.V
    out = np.empty(6)
    # *_3 a_i plus the dx-dx part of B ^ alpha
    out[0] = a[2] + bvec[0] * alpha[1] - bvec[1] * alpha[0]
    out[1] = -a[1] + bvec[0] * alpha[2] - bvec[2] * alpha[0]
    out[2] = a[0] + bvec[1] * alpha[2] - bvec[2] * alpha[1]
    out[3:] = bvec
    return out


def to_matrix(w: np.ndarray) -> np.ndarray:
    F = np.zeros((4, 4))
    for val, (a, b) in zip(w, PAIRS):
        F[a, b] = val
        F[b, a] = -val
    return F


def from_matrix(F: np.ndarray) -> np.ndarray:
    return np.array([F[a, b] for a, b in PAIRS])


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for s, t in itertools.combinations(perm, 2) if s > t)
        eps[perm] = -1.0 if inv % 2 else 1.0
    return eps


_EPS = _levi_civita()


def hodge_star(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(*F)_cd = 1/2 sqrt(det g) eps_abcd F^ab, orientation (x1, x2, x3, theta)."""
    F = to_matrix(w)
    gi = np.linalg.inv(g)
    up = gi @ F @ gi.T
    star = 0.5 * math.sqrt(np.linalg.det(g)) * np.einsum("abcd,ab->cd", _EPS, up)
    return from_matrix(star)


def to_frame(w: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Components in the gauge-invariant coframe (dx1, dx2, dx3, dtheta + alpha)."""
    out = w.copy()
    t = w[3:]
    out[0] = w[0] - (t[0] * alpha[1] - t[1] * alpha[0])
    out[1] = w[1] - (t[0] * alpha[2] - t[2] * alpha[0])
    out[2] = w[2] - (t[1] * alpha[2] - t[2] * alpha[1])
    return out


def exterior_derivative_fd(form: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-4) -> np.ndarray:
    """Central-difference d of a theta-independent 2-form; components (123, 12t, 13t, 23t)."""
    x = np.asarray(x, dtype=float)
    grads = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        grads.append((form(x + e) - form(x - e)) / (2 * h))
    dF = [to_matrix(gr) for gr in grads] + [np.zeros((4, 4))]
    out = []
    for a, b, cc in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        out.append(dF[a][b, cc] + dF[b][cc, a] + dF[cc][a, b])
    return np.array(out)


def curl_fd(field_fn: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-4) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    J = np.empty((3, 3))
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        J[:, a] = (field_fn(x + e) - field_fn(x - e)) / (2 * h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def sample_points(c: MonopoleConfig, count: int, rng: np.random.Generator,
                  min_dist: float = 1.0, min_rho: float = 0.5, box: float = 6.0) -> np.ndarray:
    """Points at least ``min_dist`` from every monopole and ``min_rho`` from every
    vertical line through one, so both string gauges are valid there."""
    pts = c.array()
    out = []
    while len(out) < count:
        x = rng.uniform(-box, box, size=3)
        d = x[None, :] - pts
        if np.all(np.linalg.norm(d, axis=1) >= min_dist) and np.all(np.hypot(d[:, 0], d[:, 1]) >= min_rho):
            out.append(x)
    return np.array(out)


# ---------------------------------------------------------------- L^2 Gram


@dataclass(frozen=True)
class QuadratureSpec:
    cutoffs: tuple[float, ...] = (10.0, 20.0, 40.0)
    rtol: float = 1e-6
    atol: float = 1e-12
    max_subdivisions: int = 20000

    def __post_init__(self):
        cs = tuple(float(r) for r in self.cutoffs)
        if len(cs) < 2 or any(b <= a for a, b in zip(cs, cs[1:])) or cs[0] <= 0:
            raise GHError("cutoffs must be a strictly increasing positive schedule")
        object.__setattr__(self, "cutoffs", cs)


@dataclass(frozen=True)
class GramResult:
    matrix: np.ndarray
    partials: tuple[np.ndarray, ...]
    increments: tuple[float, ...]
    cauchy_decreasing: bool
    extrapolated: np.ndarray
    tail_bound: float
    quad_error: float


def _density_fn(c: MonopoleConfig) -> Callable[[np.ndarray], np.ndarray]:
    """<Omega_i, Omega_j>_g sqrt(det g), integrated over theta; shape (N, k, k)."""
    pts = c.array()
    period = c.theta_period

    def density(X: np.ndarray) -> np.ndarray:
        d = X[:, None, :] - pts[None, :, :]
        r = np.linalg.norm(d, axis=2)
        r = np.maximum(r, 1e-300)
        vi = 2 * c.m / r
        gi = -2 * c.m * d / r[..., None] ** 3
        V = 1 + vi.sum(axis=1)
        gV = gi.sum(axis=1)
        a = gi - (vi / V[:, None])[..., None] * gV[:, None, :]
        return period * 2 * np.einsum("nia,nja->nij", a, a) / V[:, None, None]

    return density


def _bump(X: np.ndarray, centre: np.ndarray, radius: float) -> np.ndarray:
    """Polynomial cutoff in t = |x - centre|^2 / radius^2, equal to 1 at the centre
    and 0 for t >= 1.

    1 - bump vanishes like t^4 at the centre, which is enough to smooth out the
    1/r behaviour of the density there; at t = 1 it is C^3.
    """
    t = np.clip(np.sum((X - centre) ** 2, axis=1) / radius ** 2, 0.0, 1.0)
    return 1 - t ** 4 * (35 - 84 * t + 70 * t * t - 20 * t ** 3)


def _cubature(f, lo, hi, k: int, spec: QuadratureSpec, label: str):
    res = cubature(f, lo, hi, rtol=spec.rtol, atol=spec.atol, max_subdivisions=spec.max_subdivisions)
    if res.status != "converged":
        raise GramDivergence(f"{label} did not converge to rtol {spec.rtol}")
    est = np.asarray(res.estimate).reshape(k, k)
    return 0.5 * (est + est.T), float(np.max(res.error))


def _spherical(r, th, ph, centre):
    # polar angle rather than cos(theta): keeps the integrand analytic at the poles
    st = np.sin(th)
    return np.stack([r * st * np.cos(ph), r * st * np.sin(ph), r * np.cos(th)], axis=1) + centre


def _shell_integral(density, k: int, r0: float, r1: float, spec: QuadratureSpec,
                    axisymmetric: bool, patches=()):
    """Integral over r0 <= |x| <= r1.

    ``patches`` are (centre, radius) balls inside the shell where the density
    is singular. A smooth partition of unity hands each ball to spherical
    coordinates centred on it, leaving a smooth remainder for the global chart.
    """
    origin = np.zeros(3)

    def remainder(X):
        w = np.ones(len(X))
        for centre, rad in patches:
            w -= _bump(X, centre, rad)
        return w[:, None, None] * density(X)

    label = f"shell [{r0}, {r1}]"
    if axisymmetric:
        def f(u):
            X = _spherical(u[:, 0], u[:, 1], np.zeros(len(u)), origin)
            return (2 * np.pi * u[:, 0] ** 2 * np.sin(u[:, 1]))[:, None, None] * density(X)
        return _cubature(f, [r0, 0.0], [r1, np.pi], k, spec, label)

    def f(u):
        X = _spherical(u[:, 0], u[:, 1], u[:, 2], origin)
        return (u[:, 0] ** 2 * np.sin(u[:, 1]))[:, None, None] * remainder(X)
    est, err = _cubature(f, [r0, 0.0, 0.0], [r1, np.pi, 2 * np.pi], k, spec, label)
    for centre, rad in patches:
        def g(u, centre=centre, rad=rad):
            X = _spherical(u[:, 0], u[:, 1], u[:, 2], centre)
            return (u[:, 0] ** 2 * np.sin(u[:, 1]) * _bump(X, centre, rad))[:, None, None] * density(X)
        e2, r2 = _cubature(g, [0.0, 0.0, 0.0], [rad, np.pi, 2 * np.pi], k, spec, f"patch at {centre}")
        est, err = est + e2, err + r2
    return est, err


def _patches(centres: np.ndarray, cutoffs: Sequence[float]) -> list[tuple[np.ndarray, float]]:
    if len(centres) == 0:
        return []
    sep = min((np.linalg.norm(a - b) for a, b in itertools.combinations(centres, 2)), default=np.inf)
    norms = np.linalg.norm(centres, axis=1)
    # balls must be disjoint and sit inside one shell
    edges = [0.0, *cutoffs]
    room = min(min(abs(n - e) for e in edges[1:]) for n in norms)
    rad = min(0.45 * sep, 0.9 * room, 1.0)
    if any(n < rad for n in norms):
        # a centre near the origin: the global chart would cut its ball
        rad = min(rad, 0.9 * min(n for n in norms if n > 0)) if any(norms > 0) else rad
    return [(c, rad) for c in centres]


def gram_of(density: Callable[[np.ndarray], np.ndarray], k: int, spec: QuadratureSpec = QuadratureSpec(),
            axisymmetric: bool = False, strict: bool = True,
            singular_points: Optional[np.ndarray] = None) -> GramResult:
    """Shell-by-shell integral of a (N, k, k) pointwise density over balls |x| <= R."""
    shells = [0.0, *spec.cutoffs]
    sing = np.zeros((0, 3)) if singular_points is None or axisymmetric else np.asarray(singular_points, float)
    # the origin is the pole of the global chart and needs no patch
    sing = sing[np.linalg.norm(sing, axis=1) > 0] if len(sing) else sing
    patches = _patches(sing, spec.cutoffs)
    pieces, err = [], 0.0
    # shells are summed in fixed order, so the result does not depend on scheduling
    for r0, r1 in zip(shells, shells[1:]):
        inside = [(c, rad) for c, rad in patches if r0 <= np.linalg.norm(c) < r1]
        est, e = _shell_integral(density, k, r0, r1, spec, axisymmetric, inside)
        pieces.append(est)
        err += e
    partials = tuple(np.cumsum(pieces, axis=0))
    increments = tuple(float(np.linalg.norm(p)) for p in pieces[1:])
    scale = max(float(np.linalg.norm(partials[-1])), 1e-300)
    decreasing = all(b < a for a, b in zip(increments, increments[1:])) or increments[-1] <= 1e-12 * scale
    if strict and not decreasing:
        raise GramDivergence(f"tail increments {increments} are not Cauchy-decreasing")
    # the mass beyond R behaves like A/R + B/R^2; with one increment only A is fitted
    rp, rl = spec.cutoffs[-2], spec.cutoffs[-1]
    tail1 = pieces[-1] * (rp / (rl - rp))
    if len(spec.cutoffs) >= 3:
        r0 = spec.cutoffs[-3]
        rows = np.array([[1 / r0 - 1 / rp, 1 / r0**2 - 1 / rp**2],
                         [1 / rp - 1 / rl, 1 / rp**2 - 1 / rl**2]])
        A, B = np.tensordot(np.linalg.inv(rows), np.stack([pieces[-2], pieces[-1]]), axes=1)
        tail = A / rl + B / rl**2
    else:
        tail = tail1
    bound = float(np.linalg.norm(tail - tail1)) if len(spec.cutoffs) >= 3 else float(np.linalg.norm(tail))
    return GramResult(partials[-1], partials, increments, decreasing, partials[-1] + tail, bound, err)


def l2_gram(c: MonopoleConfig, spec: QuadratureSpec = QuadratureSpec(), strict: bool = True) -> GramResult:
    return gram_of(_density_fn(c), c.k, spec, axisymmetric=c.on_axis, strict=strict,
                   singular_points=c.array())


def taub_nut_gram_exact(m: float, R: Optional[float] = None) -> float:
    """G_11 for a single monopole: 8 pi m * 32 pi m^2 * int_0^R r/(r+2m)^3 dr."""
    cc = 2 * m
    if R is None:
        radial = 1 / (2 * cc)
    else:
        radial = 1 / (2 * cc) - (1 / (R + cc) - cc / (2 * (R + cc) ** 2))
    return 8 * math.pi * m * 32 * math.pi * m * m * radial


# ------------------------------------------------------------ verification


@dataclass
class GHReport:
    config: MonopoleConfig
    sigma: int
    det_rel_err: float
    duality_residual: float
    closed_residual: float
    coclosed_residual: float
    curl_residual: float
    gauge_diff: float
    gram: Optional[GramResult]
    gram_eigenvalues: Optional[np.ndarray]
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def measure_sigma(c: MonopoleConfig, x=(1.3, 0.7, 0.4)) -> int:
    """Sign s with *Omega_1 = s Omega_1 at one point."""
    g = metric_at(c, x)
    w = omega_at(c, 0, x)
    s = hodge_star(g, w)
    return 1 if np.linalg.norm(s - w) < np.linalg.norm(s + w) else -1


def verify_config(c: MonopoleConfig, n_points: int = 100, seed: int = 0, h: float = 1e-4,
                  spec: Optional[QuadratureSpec] = QuadratureSpec()) -> GHReport:
    rng = np.random.default_rng(seed)
    xs = sample_points(c, n_points, rng)
    det_err = dual = closed = coclosed = curl = gauge = 0.0
    for x in xs:
        pot = potential(c, x)
        g = metric_at(c, x)
        det_err = max(det_err, abs(np.linalg.det(g) - pot.V ** 2) / pot.V ** 2)
        for i, zi in enumerate(c.array()[:, 2]):
            # the string on the far side of p_i keeps the difference stencil smooth
            side = "lower" if x[2] >= zi else "upper"
            err = curl_fd(lambda y: alpha_term(c, i, y, side), x, h) - pot.gradV_i[i]
            curl = max(curl, float(np.max(np.abs(err))))
        alpha_l = alpha_at(c, x, "lower")
        alpha_u = alpha_at(c, x, "upper")
        for i in range(c.k):
            w = omega_at(c, i, x)
            dual = max(dual, np.linalg.norm(hodge_star(g, w) - ASD_SIGN * w) / np.linalg.norm(w))
            closed = max(closed, float(np.max(np.abs(
                exterior_derivative_fd(lambda y: omega_at(c, i, y), x, h)))))
            coclosed = max(coclosed, float(np.max(np.abs(exterior_derivative_fd(
                lambda y: hodge_star(metric_at(c, y), omega_at(c, i, y)), x, h)))))
            wl = to_frame(w, alpha_l)
            wu = to_frame(omega_at(c, i, x, gauge="upper"), alpha_u)
            gauge = max(gauge, float(np.max(np.abs(wl - wu))) / max(float(np.max(np.abs(wl))), 1e-300))
    gram = eig = None
    if spec is not None:
        gram = l2_gram(c, spec, strict=False)
        eig = np.linalg.eigvalsh(gram.matrix)
    rep = GHReport(c, measure_sigma(c), det_err, dual, closed, coclosed, curl, gauge, gram, eig)
    rep.checks += [
        ("det g = V^2", det_err < 1e-12, f"{det_err:.2e}"),
        ("d alpha = *dV", curl < 1e-6, f"{curl:.2e}"),
        ("anti-self-dual", dual < 1e-10, f"{dual:.2e}"),
        ("closed", closed < 1e-6, f"{closed:.2e}"),
        ("coclosed", coclosed < 1e-5, f"{coclosed:.2e}"),
        ("gauge independent", gauge < 1e-10, f"{gauge:.2e}"),
        ("sigma frozen", rep.sigma == ASD_SIGN, str(rep.sigma)),
    ]
    if gram is not None:
        ratio = float(eig[0] / eig[-1]) if eig[-1] > 0 else 0.0
        rank = int(np.sum(eig > 1e-8 * eig[-1]))
        rep.checks += [
            ("gram symmetric", bool(np.allclose(gram.matrix, gram.matrix.T, rtol=0, atol=1e-12)), ""),
            ("gram positive definite", ratio > 1e-8, f"min/max {ratio:.2e}"),
            ("gram rank = k", rank == c.k, f"{rank}"),
            ("tail Cauchy-decreasing", gram.cauchy_decreasing,
             " > ".join(f"{v:.3e}" for v in gram.increments)),
        ]
    rep.checks = [(name, bool(ok), detail) for name, ok, detail in rep.checks]
    return rep


def pointwise_density(forms: Sequence[Callable[[np.ndarray], np.ndarray]], c: MonopoleConfig):
    """Generic (slow) density from arbitrary 2-form callables, using the metric."""
    period = c.theta_period

    def density(X: np.ndarray) -> np.ndarray:
        out = np.zeros((len(X), len(forms), len(forms)))
        for n, x in enumerate(X):
            g = metric_at(c, x, eps_string=0.0) if not _near_string(c, x) else metric_at(c, x, gauge="upper")
            gi = np.linalg.inv(g)
            vol = math.sqrt(np.linalg.det(g))
            Fs = [to_matrix(fn(x)) for fn in forms]
            for i, Fi in enumerate(Fs):
                for j, Fj in enumerate(Fs):
                    out[n, i, j] = 0.5 * np.einsum("ab,cd,ac,bd->", Fi, Fj, gi, gi) * vol * period
        return out

    return density


def _near_string(c: MonopoleConfig, x) -> bool:
    d = np.asarray(x)[None, :] - c.array()
    return bool(np.any((np.hypot(d[:, 0], d[:, 1]) < 1e-6) & (d[:, 2] <= 0)))
