"""Shipped example spaces and the regression runner.

The Python builders below are the source the JSON files under
``data/catalog`` are generated from (``scripts/make_catalog.py``); the JSON is
what ``catalog run`` loads. Betti data are those of the named
compactifications, fed in as inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .exactlin import ExactLinError, RatMatrix, cartan_matrix
from .gibbons_hawking import GHError, MonopoleConfig, verify_config
from .hodge import (HodgeError, HodgeTable, PairingInput, hodge_dims, hyperkahler_checks, l2_signature,
                    tau_invariant)
from .indicial import BaseSpectrum, SpectrumEntry
from .intersection import (IHQuery, IntersectionError, LerayData, duality_defect, engine_a_applicable,
                           ih_closed_form_table, ih_extended, product_leray)
from .manifest import Expected, Manifest, ManifestError, NumericsSpec, emit_manifest, load_manifest
from .topo import MetricClass, ProfileError, StratumProfile, pair_cohomology

ENGINE_ERRORS = (IntersectionError, HodgeError, ProfileError, ExactLinError, GHError, ManifestError)


def _m(rows) -> RatMatrix:
    return RatMatrix.from_rows(rows)


def _z(r: int, c: int) -> RatMatrix:
    return RatMatrix.zeros(r, c)


def _neg_cartan(kind: str, r: int, affine: bool = False) -> RatMatrix:
    if r == 0:
        return _z(0, 0)
    return -cartan_matrix(kind, r, affine)


def _restrictions(betti_M, betti_dM, given: dict[int, RatMatrix]) -> tuple[RatMatrix, ...]:
    return tuple(given.get(k, _z(betti_dM[k], betti_M[k])) for k in range(len(betti_dM)))


def _column_leray(betti) -> LerayData:
    return LerayData(len(betti) - 1, 0, tuple((x,) for x in betti))


def _axis_points(k: int, spacing: float = 3.0) -> tuple[tuple[float, float, float], ...]:
    return tuple((0.0, 0.0, spacing * (i - (k - 1) / 2)) for i in range(k))


def _ale_a(k: int) -> Manifest:
    dM = (1, 0, 0, 1)
    bM = (1, 0, k - 1, 0, 0)
    prof = StratumProfile(4, 3, 0, bM, dM, dM, (1,), _restrictions(bM, dM, {0: _m([[1]])}))
    form = _neg_cartan("A", k - 1)
    return Manifest(
        name=f"ale_A{k}", metric=MetricClass.SCATTERING, profile=prof, leray=_column_leray(dM),
        pairing=PairingInput(form, form), quaternionic_k=1,
        expected=Expected((0, 0, k - 1, 0, 0), -(k - 1), 0),
        provenance=f"ALE space C^2/Z_{k}: link S^3/Z_{k}, exceptional curves with intersection form -A_{k - 1}",
        tags=("ale", "hyperkahler", "toric_hk:A-type"),
    )


def _s2_circle_bundle(euler: int) -> LerayData:
    diffs = {(2, 0, 1): _m([[euler]])} if euler else {}
    return LerayData(2, 1, ((1, 1), (0, 0), (1, 1)), diffs)


def _alf(name: str, k: int, h2: int, euler: int, rel: RatMatrix, provenance: str, tags,
         monopoles: bool) -> Manifest:
    dM = (1, 0, 0, 1)
    bM = (1, 0, h2, 0, 0)
    prof = StratumProfile(4, 2, 1, bM, dM, (1, 0, 1), (1, 1), _restrictions(bM, dM, {0: _m([[1]])}))
    leray = _s2_circle_bundle(euler)
    leray = LerayData(leray.b, leray.f, leray.e2, leray.differentials, dM)
    numerics = NumericsSpec(MonopoleConfig(1.0, _axis_points(k))) if monopoles else None
    return Manifest(
        name=name, metric=MetricClass.FIBRED_BOUNDARY, profile=prof, leray=leray,
        pairing=PairingInput(-RatMatrix.identity(k), rel), quaternionic_k=1, monopoles=numerics,
        expected=Expected((0, 0, k, 0, 0), -k, -1), provenance=provenance, tags=tags,
    )


def _alf_a(k: int) -> Manifest:
    return _alf(f"alf_A{k}", k, k - 1, k, _neg_cartan("A", k - 1),
                f"multi-Taub-NUT with {k} centres: X = M u S^2 has b_2 = {k}",
                ("alf", "hyperkahler", "gibbons_hawking"), True)


def _taub_nut() -> Manifest:
    m = _alf("taub_nut", 1, 0, 1, _z(0, 0), "Taub-NUT on R^4: compactification X = CP^2",
             ("alf", "hyperkahler", "gibbons_hawking"), True)
    # S^2 eigenvalues l(l+1) on functions and (via the star) on 2-forms
    spec_entries = (("0", 0, 1), ("2", 0, 3), ("6", 0, 5), ("0", 2, 1), ("2", 2, 3))
    return replace(m, spectrum=BaseSpectrum(tuple(SpectrumEntry(*e) for e in spec_entries), 2))


def _alf_d4() -> Manifest:
    return _alf("alf_D4", 4, 3, 4, _neg_cartan("A", 3),
                "ALF D_4: rational model X = M u S^2 with H^2(M) of rank 3 and the extra class from the bolt",
                ("alf", "alf_D", "hyperkahler"), False)


def _atiyah_hitchin(cover: bool) -> Manifest:
    dM = (1, 0, 0, 1)
    bM = (1, 0, 1, 0, 0) if cover else (1, 0, 0, 0, 0)
    # B = RP^2 rationally a point; the fibre orientation twists row q = 1
    leray = LerayData(2, 1, ((1, 0), (0, 0), (0, 1)), {}, dM)
    prof = StratumProfile(4, 2, 1, bM, dM, (1, 0, 0), (1, 1), _restrictions(bM, dM, {0: _m([[1]])}))
    if cover:
        pairing = PairingInput(_m([[-1]]), _m([[-4]]))
        expected = Expected((0, 0, 1, 0, 0), -1, 0)
        prov = "double cover of the Atiyah-Hitchin manifold: X = CP^2, bolt of self-intersection -4"
    else:
        pairing = PairingInput(_z(0, 0), _z(0, 0))
        expected = Expected((0, 0, 0, 0, 0), 0, 0)
        prov = "Atiyah-Hitchin manifold: X = M u RP^2 = S^4"
    return Manifest(
        name="atiyah_hitchin_cover" if cover else "atiyah_hitchin", metric=MetricClass.FIBRED_BOUNDARY,
        profile=prof, leray=leray, pairing=pairing, quaternionic_k=1, expected=expected,
        provenance=prov, tags=("alf", "hyperkahler", "twisted_leray"),
    )


def _schwarzschild() -> Manifest:
    dM = (1, 1, 1, 1)
    bM = (1, 0, 1, 0, 0)
    prof = StratumProfile(4, 2, 1, bM, dM, (1, 0, 1), (1, 1),
                          _restrictions(bM, dM, {0: _m([[1]]), 2: _m([[1]])}))
    leray = product_leray((1, 0, 1), (1, 1))
    return Manifest(
        name="schwarzschild", metric=MetricClass.FIBRED_BOUNDARY, profile=prof,
        leray=LerayData(2, 1, leray.e2, {}, dM),
        pairing=PairingInput(_m([[0, 1], [1, 0]]), _z(0, 0)),
        expected=Expected((0, 0, 2, 0, 0), 0, 0),
        provenance="Euclidean Schwarzschild R^2 x S^2: X = S^2 x S^2", tags=("alf",),
    )


def _alg_d4() -> Manifest:
    dM = (1, 1, 1, 1)
    bM = (1, 0, 5, 0, 0)
    # flat T^2 bundle over S^1 with monodromy -1: only H^0 and H^2 of the fibre are invariant
    leray = LerayData(1, 2, ((1, 0, 1), (1, 0, 1)), {}, dM)
    prof = StratumProfile(4, 1, 2, bM, dM, (1, 1), (1, 2, 1),
                          _restrictions(bM, dM, {0: _m([[1]]), 2: _m([[1, 1, 1, 1, 2]])}))
    return Manifest(
        name="alg_D4", metric=MetricClass.FIBRED_BOUNDARY, profile=prof, leray=leray,
        pairing=PairingInput(-RatMatrix.identity(4), _neg_cartan("D", 4, affine=True)),
        quaternionic_k=1, expected=Expected((0, 0, 4, 0, 0), -4, 0),
        provenance="ALG D_4 (T^2 x C)/Z_2 resolved: five exceptional curves in the affine D_4 pattern",
        tags=("alg", "hyperkahler", "non_witt"),
    )


def _scattering(name, bM, dM, given, pairing, expected, prov, tags, qk=None) -> Manifest:
    n = len(bM) - 1
    prof = StratumProfile(n, n - 1, 0, bM, dM, dM, (1,), _restrictions(bM, dM, given))
    return Manifest(name=name, metric=MetricClass.SCATTERING, profile=prof, leray=_column_leray(dM),
                    pairing=pairing, quaternionic_k=qk, expected=expected, provenance=prov, tags=tags)


def _calabi() -> Manifest:
    return _scattering(
        "calabi_tcp2", (1, 0, 1, 0, 1, 0, 0, 0, 0), (1, 0, 1, 0, 0, 1, 0, 1),
        {0: _m([[1]]), 2: _m([[1]])}, PairingInput(_m([[3]]), _m([[3]])),
        Expected((0, 0, 0, 0, 1, 0, 0, 0, 0), 1, 0),
        "Calabi metric on T*CP^2: zero section CP^2 with self-intersection chi(CP^2) = 3",
        ("hyperkahler", "toric_hk:calabi"), qk=2,
    )


def _stenzel() -> Manifest:
    return _scattering(
        "stenzel_ts4", (1, 0, 0, 0, 1, 0, 0, 0, 0), (1, 0, 0, 0, 0, 0, 0, 1),
        {0: _m([[1]])}, PairingInput(_m([[2]]), _m([[2]])),
        Expected((0, 0, 0, 0, 1, 0, 0, 0, 0), 1, 0),
        "Stenzel metric on T*S^4: zero section S^4 with self-intersection chi(S^4) = 2",
        ("ricci_flat",),
    )


def _bryant_salamon() -> Manifest:
    return _scattering(
        "bryant_salamon_g2", (1, 0, 0, 0, 1, 0, 0, 0), (1, 0, 1, 0, 1, 0, 1),
        {0: _m([[1]]), 4: _m([[1]])}, None,
        Expected((0, 0, 0, 1, 1, 0, 0, 0)),
        "Bryant-Salamon G_2 metric on the rank 3 bundle of anti-self-dual 2-forms over S^4; link CP^3",
        ("g2",),
    )


def _gomis() -> Manifest:
    bB = (1, 0, 1, 1, 0, 1)
    bM = (1, 0, 0, 1, 0, 0, 0, 0)
    dM = (1, 0, 0, 2, 0, 0, 1)
    leray = LerayData(5, 1, tuple((x, x) for x in bB),
                      {(2, 0, 1): _m([[1]]), (2, 3, 1): _m([[1]])}, dM)
    # H^3(dM) blocks in base-degree order: E^{2,1} then E^{3,0}
    prof = StratumProfile(7, 5, 1, bM, dM, bB, (1, 1),
                          _restrictions(bM, dM, {0: _m([[1]]), 3: _m([[0], [1]])}))
    return Manifest(
        name="gomis_g2", metric=MetricClass.FIBRED_BOUNDARY, profile=prof, leray=leray,
        expected=Expected((0,) * 8),
        provenance="G_2 metric on S^3 x R^4 with circle fibration over S^2 x S^3 at infinity",
        tags=("g2",),
    )


def builtin_entries() -> dict[str, Manifest]:
    entries = [*(_ale_a(k) for k in range(2, 6)), *(_alf_a(k) for k in range(1, 5)), _taub_nut(),
               _alf_d4(), _atiyah_hitchin(False), _atiyah_hitchin(True), _schwarzschild(), _alg_d4(),
               _calabi(), _stenzel(), _bryant_salamon(), _gomis()]
    return {e.name: e for e in entries}


def catalog_dir() -> Path:
    return Path(str(resources.files("fibhodge") / "data" / "catalog"))


def write_catalog(directory: Optional[Path] = None) -> list[Path]:
    directory = directory or catalog_dir()
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name, m in sorted(builtin_entries().items()):
        path = directory / f"{name}.json"
        path.write_text(emit_manifest(m), encoding="utf-8")
        out.append(path)
    return out


def load_catalog(directory: Optional[Path] = None) -> dict[str, Manifest]:
    directory = directory or catalog_dir()
    out = {}
    for path in sorted(directory.glob("*.json")):
        try:
            m = load_manifest(path.read_text(encoding="utf-8"))
        except ManifestError as exc:
            raise ManifestError(f"{path.name}: {exc}") from exc
        out[m.name or path.stem] = m
    return out


# ------------------------------------------------------------------ runner


@dataclass
class EntryReport:
    entry: str
    metric: MetricClass
    status: str = "PASS"
    dims: Optional[tuple[int, ...]] = None
    case_tags: tuple[str, ...] = ()
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    error: Optional[str] = None

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))
        if not ok and self.status == "PASS":
            self.status = "FAIL"

    def to_json(self) -> dict:
        return {
            "entry": self.entry, "metric": self.metric.value, "status": self.status,
            "dims": list(self.dims) if self.dims is not None else None,
            "case_tags": list(self.case_tags),
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
            "error": self.error,
        }


def engine_agreement(m: Manifest) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(j, engine A dims, engine B dims) for every j where both engines apply."""
    p = m.profile
    out = []
    if not p.has_matrices:
        return out
    for j in range(-2, p.ell + 2):
        if engine_a_applicable(p, j):
            out.append((j, ih_closed_form_table(p, j, m.leray).dims, ih_extended(p, m.leray, j).dims))
    return out


def run_entry(m: Manifest, numerics: bool = True) -> EntryReport:
    rep = EntryReport(m.name, m.metric)
    try:
        _run(m, rep, numerics)
    except ENGINE_ERRORS as exc:
        rep.status = "ERROR"
        rep.error = f"{m.name}: {type(exc).__name__}: {exc}"
    return rep


def _run(m: Manifest, rep: EntryReport, numerics: bool) -> None:
    p = m.profile
    ih = IHQuery(p, m.leray, m.natural_maps)
    table: HodgeTable = hodge_dims(p, m.metric, ih)
    rep.dims, rep.case_tags = table.dims, table.case_tags
    if m.expected is not None:
        rep.check("dims match expected", table.dims == m.expected.dims,
                  f"got {list(table.dims)}, expected {list(m.expected.dims)}")
    rep.check("dims[k] = dims[n-k]", table.dims == table.dims[::-1])
    if p.has_matrices:
        defects = {j: duality_defect(p, m.leray, j) for j in range(-1, p.ell)}
        rep.check("duality defect 0", not any(defects.values()), str(defects))
        for j, a, b in engine_agreement(m):
            rep.check(f"engine A = engine B at j={j}", a == b, f"A {list(a)} B {list(b)}")
    sig = None
    if m.pairing is not None and p.n % 2 == 0:
        mid = p.n // 2
        sig = l2_signature(m.pairing, expected_size=table.dims[mid])
        if m.expected is not None and m.expected.signature is not None:
            rep.check("L2 signature", sig == m.expected.signature, f"{sig}")
        if m.pairing.rel_matrix is not None:
            pc = pair_cohomology(p)
            size = m.pairing.rel_matrix.rows
            rep.check("rel pairing size", size in (pc.image_ranks[mid], pc.betti_rel[mid]), f"{size}")
            tau = tau_invariant(m.pairing)
            if m.expected is not None and m.expected.tau is not None:
                rep.check("tau", tau == m.expected.tau, f"{tau}")
    if m.is_hyperkahler:
        hk = hyperkahler_checks(table, sig if sig is not None else 0, True, m.quaternionic_k,
                                m.pairing.rel_matrix if m.pairing is not None else None)
        for name, ok in hk.checks:
            rep.check(f"hyperkahler: {name}", ok)
    if numerics and m.monopoles is not None:
        spec = m.monopoles
        gh = verify_config(spec.config, spec.sample_points, spec.seed, spec=spec.quadrature)
        for name, ok, detail in gh.checks:
            rep.check(f"gh: {name}", ok, detail)
        if p.n == 4:
            rep.check("gh: gram rank = dims[2]", int(sum(gh.gram_eigenvalues > 1e-8 * gh.gram_eigenvalues[-1]))
                      == table.dims[2])
