"""JSON manifests: one space, its metric class and everything needed to run it.

Schema (``schema_version`` "1")::

    {
      "schema_version": "1",
      "name": str, "provenance": str, "tags": [str],
      "metric": "B" | "Scattering" | "FibredCusp" | "FibredBoundary",
      "profile": {"n", "b", "f", "betti_M", "betti_dM", "betti_B", "betti_F",
                  "restriction": [matrix] | null, "restriction_ranks": [int] | null},
      "leray": {"e2": [[int]], "differentials": [{"r", "p", "q", "matrix"}],
                "abutment_check": [int] | null} | null,
      "natural_maps": [{"j", "k", "matrix"}],
      "pairing": {"matrix": matrix, "rel_matrix": matrix | null} | null,
      "hyperkahler": {"quaternionic_k": int} | null,
      "monopoles": {"m": float, "points": [[float, float, float]],
                    "sample_points": int, "seed": int,
                    "cutoffs": [float], "rtol": float} | null,
      "spectrum": {"b": int | null, "eigenvalues": [[rational, int, int]]} | null,
      "expected": {"dims": [int], "signature": int | null, "tau": int | null} | null
    }

A matrix is ``{"shape": [rows, cols], "data": [["p/q", ...], ...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .exactlin import ExactLinError, RatMatrix
from .gibbons_hawking import GHError, MonopoleConfig, QuadratureSpec
from .hodge import HodgeError, PairingInput
from .indicial import BaseSpectrum, IndicialError, SpectrumEntry
from .intersection import IntersectionError, LerayData
from .topo import MetricClass, ProfileError, StratumProfile

SCHEMA_VERSION = "1"


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class NumericsSpec:
    config: MonopoleConfig
    sample_points: int = 100
    seed: int = 0
    quadrature: QuadratureSpec = QuadratureSpec()


@dataclass(frozen=True)
class Expected:
    dims: tuple[int, ...]
    signature: Optional[int] = None
    tau: Optional[int] = None


@dataclass(frozen=True)
class Manifest:
    name: str
    metric: MetricClass
    profile: StratumProfile
    leray: Optional[LerayData] = None
    natural_maps: dict = field(default_factory=dict)
    pairing: Optional[PairingInput] = None
    quaternionic_k: Optional[int] = None
    monopoles: Optional[NumericsSpec] = None
    spectrum: Optional[BaseSpectrum] = None
    expected: Optional[Expected] = None
    provenance: str = ""
    tags: tuple[str, ...] = ()
    schema_version: str = SCHEMA_VERSION

    @property
    def is_hyperkahler(self) -> bool:
        return self.quaternionic_k is not None


def _fmt(x: Fraction) -> str:
    return str(x)


def matrix_to_json(m: RatMatrix) -> dict:
    return {"shape": [m.rows, m.cols], "data": [[_fmt(x) for x in row] for row in m.row_lists()]}


def matrix_from_json(obj: Any, path: str) -> RatMatrix:
    try:
        rows, cols = obj["shape"]
        data = obj["data"]
        if len(data) != rows:
            raise ManifestError(f"{path}: shape says {rows} rows, data has {len(data)}")
        if rows == 0:
            return RatMatrix.zeros(0, cols)
        for row in data:
            for x in row:
                if not isinstance(x, (str, int)) or isinstance(x, bool):
                    raise ManifestError(f"{path}: rational entries must be strings 'p/q' or integers, got {x!r}")
        m = RatMatrix.from_rows(data, cols)
    except ManifestError:
        raise
    except (KeyError, TypeError, ValueError, ExactLinError) as exc:
        raise ManifestError(f"{path}: bad matrix ({exc})") from exc
    return m


def _ints(v: Any, path: str) -> tuple[int, ...]:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ManifestError(f"{path}: expected a list of integers")
    return tuple(v)


def _section(doc: dict, key: str, path: str = "") -> Any:
    try:
        return doc[key]
    except KeyError:
        raise ManifestError(f"{path}{key}: missing required field") from None


def _profile(obj: dict) -> StratumProfile:
    restriction = obj.get("restriction")
    if restriction is not None:
        restriction = tuple(matrix_from_json(m, f"profile.restriction[{k}]") for k, m in enumerate(restriction))
    ranks = obj.get("restriction_ranks")
    if ranks is not None:
        ranks = _ints(ranks, "profile.restriction_ranks")
    try:
        return StratumProfile(
            n=_section(obj, "n", "profile."), b=_section(obj, "b", "profile."), f=_section(obj, "f", "profile."),
            betti_M=_ints(_section(obj, "betti_M", "profile."), "profile.betti_M"),
            betti_dM=_ints(_section(obj, "betti_dM", "profile."), "profile.betti_dM"),
            betti_B=_ints(_section(obj, "betti_B", "profile."), "profile.betti_B"),
            betti_F=_ints(_section(obj, "betti_F", "profile."), "profile.betti_F"),
            restriction=restriction, restriction_ranks=ranks,
        )
    except ProfileError as exc:
        raise ManifestError(f"profile: {exc}") from exc


def _leray(obj: Optional[dict], profile: StratumProfile) -> Optional[LerayData]:
    if obj is None:
        return None
    diffs = {}
    for i, d in enumerate(obj.get("differentials", [])):
        key = (d["r"], d["p"], d["q"])
        if key in diffs:
            raise ManifestError(f"leray.differentials[{i}]: duplicate d_{key[0]} at ({key[1]},{key[2]})")
        diffs[key] = matrix_from_json(d["matrix"], f"leray.differentials[{i}].matrix")
    check = obj.get("abutment_check")
    try:
        return LerayData(profile.b, profile.f, tuple(_ints(row, "leray.e2") for row in obj["e2"]),
                         diffs, _ints(check, "leray.abutment_check") if check is not None else None)
    except IntersectionError as exc:
        raise ManifestError(f"leray: {exc}") from exc


def load_manifest(text: str) -> Manifest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ManifestError("top level must be an object")
    try:
        return _load(doc)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ManifestError(f"missing or malformed field: {exc!r}") from exc


def _load(doc: dict) -> Manifest:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ManifestError(f"schema_version: unsupported value {version!r} (expected {SCHEMA_VERSION!r})")
    try:
        metric = MetricClass.parse(_section(doc, "metric"))
    except ProfileError as exc:
        raise ManifestError(f"metric: {exc}") from exc
    profile = _profile(_section(doc, "profile"))
    if metric.needs_trivial_fibre and profile.f != 0:
        raise ManifestError(f"metric: {metric.value} requires f = 0")
    leray = _leray(doc.get("leray"), profile)
    natural = {}
    for i, e in enumerate(doc.get("natural_maps") or []):
        natural[(e["j"], e["k"])] = matrix_from_json(e["matrix"], f"natural_maps[{i}].matrix")
    pairing = None
    if doc.get("pairing") is not None:
        p = doc["pairing"]
        rel = p.get("rel_matrix")
        try:
            pairing = PairingInput(matrix_from_json(p["matrix"], "pairing.matrix"),
                                   matrix_from_json(rel, "pairing.rel_matrix") if rel is not None else None)
        except HodgeError as exc:
            raise ManifestError(f"pairing: {exc}") from exc
    hk = doc.get("hyperkahler")
    qk = None
    if hk is not None:
        qk = hk.get("quaternionic_k")
        if not isinstance(qk, int) or qk < 1 or 4 * qk != profile.n:
            raise ManifestError(f"hyperkahler.quaternionic_k: need 4k = n = {profile.n}, got {qk!r}")
    numerics = None
    if doc.get("monopoles") is not None:
        mo = doc["monopoles"]
        try:
            cfg = MonopoleConfig(mo["m"], tuple(tuple(p) for p in mo["points"]))
            quad = QuadratureSpec(tuple(mo.get("cutoffs", (10.0, 20.0, 40.0))), mo.get("rtol", 1e-6))
        except (GHError, KeyError, TypeError) as exc:
            raise ManifestError(f"monopoles: {exc}") from exc
        numerics = NumericsSpec(cfg, mo.get("sample_points", 100), mo.get("seed", 0), quad)
    spectrum = None
    if doc.get("spectrum") is not None:
        sp = doc["spectrum"]
        try:
            spectrum = BaseSpectrum(tuple(SpectrumEntry(*e) for e in sp.get("eigenvalues", [])), sp.get("b"))
        except (IndicialError, ExactLinError, TypeError) as exc:
            raise ManifestError(f"spectrum: {exc}") from exc
    expected = None
    if doc.get("expected") is not None:
        ex = doc["expected"]
        dims = _ints(_section(ex, "dims", "expected."), "expected.dims")
        if len(dims) != profile.n + 1:
            raise ManifestError(f"expected.dims: need {profile.n + 1} entries")
        expected = Expected(dims, ex.get("signature"), ex.get("tau"))
    return Manifest(
        name=doc.get("name", ""), metric=metric, profile=profile, leray=leray, natural_maps=natural,
        pairing=pairing, quaternionic_k=qk, monopoles=numerics, spectrum=spectrum, expected=expected,
        provenance=doc.get("provenance", ""), tags=tuple(doc.get("tags", ())), schema_version=version,
    )


def manifest_to_json(m: Manifest) -> dict:
    p = m.profile
    doc: dict[str, Any] = {
        "schema_version": m.schema_version,
        "name": m.name,
        "provenance": m.provenance,
        "tags": list(m.tags),
        "metric": m.metric.value,
        "profile": {
            "n": p.n, "b": p.b, "f": p.f,
            "betti_M": list(p.betti_M), "betti_dM": list(p.betti_dM),
            "betti_B": list(p.betti_B), "betti_F": list(p.betti_F),
            "restriction": [matrix_to_json(r) for r in p.restriction] if p.restriction is not None else None,
            "restriction_ranks": list(p.restriction_ranks) if p.restriction_ranks is not None else None,
        },
        "leray": None,
        "natural_maps": [
            {"j": j, "k": k, "matrix": matrix_to_json(mat)} for (j, k), mat in sorted(m.natural_maps.items())
        ],
        "pairing": None,
        "hyperkahler": {"quaternionic_k": m.quaternionic_k} if m.quaternionic_k is not None else None,
        "monopoles": None,
        "spectrum": None,
        "expected": None,
    }
    if m.leray is not None:
        doc["leray"] = {
            "e2": [list(row) for row in m.leray.e2],
            "differentials": [
                {"r": r, "p": pp, "q": q, "matrix": matrix_to_json(mat)}
                for (r, pp, q), mat in sorted(m.leray.differentials.items())
            ],
            "abutment_check": list(m.leray.abutment_check) if m.leray.abutment_check is not None else None,
        }
    if m.pairing is not None:
        doc["pairing"] = {
            "matrix": matrix_to_json(m.pairing.matrix),
            "rel_matrix": matrix_to_json(m.pairing.rel_matrix) if m.pairing.rel_matrix is not None else None,
        }
    if m.monopoles is not None:
        mo = m.monopoles
        doc["monopoles"] = {
            "m": mo.config.m, "points": [list(pt) for pt in mo.config.points],
            "sample_points": mo.sample_points, "seed": mo.seed,
            "cutoffs": list(mo.quadrature.cutoffs), "rtol": mo.quadrature.rtol,
        }
    if m.spectrum is not None:
        doc["spectrum"] = {
            "b": m.spectrum.b,
            "eigenvalues": [[_fmt(e.lambda_sq), e.degree, e.multiplicity] for e in m.spectrum.eigenvalues],
        }
    if m.expected is not None:
        doc["expected"] = {"dims": list(m.expected.dims), "signature": m.expected.signature,
                           "tau": m.expected.tau}
    return doc


def emit_manifest(m: Manifest) -> str:
    return json.dumps(manifest_to_json(m), indent=1) + "\n"
