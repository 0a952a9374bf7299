import json
import subprocess
import sys

import pytest

from fibhodge.catalog import builtin_entries, catalog_dir, load_catalog, run_entry
from fibhodge.cli import EXIT_ENGINE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from fibhodge.manifest import ManifestError, emit_manifest, load_manifest, manifest_to_json
from fibhodge.topo import MetricClass

CYLINDER = {
    "schema_version": "1",
    "name": "cylinder_end",
    "metric": "B",
    "profile": {"n": 2, "b": 1, "f": 0, "betti_M": [1, 1, 0], "betti_dM": [1, 1],
                "betti_B": [1, 1], "betti_F": [1], "restriction_ranks": [1, 1]},
}


def write(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestManifest:
    def test_minimal_cylinder(self):
        m = load_manifest(json.dumps(CYLINDER))
        assert m.metric is MetricClass.B
        assert m.profile.f == 0

    def test_asymmetric_boundary_rejected(self):
        doc = json.loads(json.dumps(CYLINDER))
        doc["profile"].update(n=4, b=3, betti_M=[1, 0, 0, 0, 0], betti_dM=[1, 0, 1, 0],
                              betti_B=[1, 0, 1, 0], restriction_ranks=[1, 0, 0, 0])
        with pytest.raises(ManifestError, match="Poincare"):
            load_manifest(json.dumps(doc))

    def test_bad_json_reports_position(self):
        with pytest.raises(ManifestError, match="line 1"):
            load_manifest("{")

    def test_unknown_schema(self):
        with pytest.raises(ManifestError, match="schema_version"):
            load_manifest(json.dumps({**CYLINDER, "schema_version": "9"}))

    def test_missing_field(self):
        doc = {k: v for k, v in CYLINDER.items() if k != "profile"}
        with pytest.raises(ManifestError):
            load_manifest(json.dumps(doc))

    def test_rationals_are_strings(self):
        text = emit_manifest(builtin_entries()["ale_A3"])
        assert '"-2"' in text or '"-2/1"' in text

    @pytest.mark.parametrize("name", sorted(builtin_entries()))
    def test_round_trip(self, name):
        m = builtin_entries()[name]
        again = load_manifest(emit_manifest(m))
        assert again == m
        assert manifest_to_json(again) == manifest_to_json(m)

    def test_shipped_json_matches_builders(self):
        assert load_catalog() == builtin_entries()
        assert sorted(p.stem for p in catalog_dir().glob("*.json")) == sorted(builtin_entries())

    def test_taub_nut_file(self):
        text = (catalog_dir() / "taub_nut.json").read_text(encoding="utf-8")
        m = load_manifest(text)
        assert load_manifest(emit_manifest(m)) == m


@pytest.mark.parametrize("name", sorted(builtin_entries()))
def test_every_entry_passes(name):
    rep = run_entry(builtin_entries()[name], numerics=False)
    assert rep.status == "PASS", [c for c in rep.checks if not c["ok"]]


class TestCli:
    def test_hodge_json(self, capsys):
        code, out, _ = run(capsys, "hodge", "taub_nut.json", "--format", "json")
        assert code == EXIT_OK
        rec = json.loads(out)
        assert rec["dims"] == [0, 0, 1, 0, 0]
        assert {"dims", "case_tags", "metric", "entry", "status"} <= set(rec)

    def test_format_before_subcommand(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "hodge", "schwarzschild")
        assert code == EXIT_OK and json.loads(out)["dims"] == [0, 0, 2, 0, 0]

    def test_catalog_only(self, capsys):
        code, out, _ = run(capsys, "catalog", "run", "--only", "schwarzschild", "--format", "json")
        rec = json.loads(out)
        assert code == EXIT_OK
        assert rec["status"] == "PASS" and rec["dims"][2] == 2

    def test_catalog_all_skip_numerics(self, capsys):
        code, out, _ = run(capsys, "catalog", "run", "--skip-numerics", "--format", "json")
        recs = json.loads(out)
        assert code == EXIT_OK
        assert [r["entry"] for r in recs] == sorted(r["entry"] for r in recs)
        assert all(r["status"] == "PASS" for r in recs)

    def test_catalog_list(self, capsys):
        code, out, _ = run(capsys, "catalog", "list")
        assert code == EXIT_OK and "taub_nut" in out

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "hodge", "taub_nut", "--bogus")
        assert code == EXIT_USAGE
        assert "usage" in err

    def test_engine_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "ih", "alg_D4", "--j", "0", "--engine", "A")
        assert code == EXIT_ENGINE
        assert "Engine A inapplicable" in err

    def test_missing_manifest(self, capsys):
        code, _, err = run(capsys, "hodge", "no_such_entry")
        assert code == EXIT_ENGINE

    def test_mismatch(self, capsys, tmp_path):
        doc = {**CYLINDER, "expected": {"dims": [0, 0, 7]}}
        code, out, _ = run(capsys, "hodge", write(tmp_path, doc))
        assert code == EXIT_MISMATCH and "FAIL" in out

    def test_indicial_empty_spectrum(self, capsys, tmp_path):
        doc = {**CYLINDER, "spectrum": {"b": None, "eigenvalues": []}}
        code, out, _ = run(capsys, "indicial", write(tmp_path, doc), "--format", "json")
        rec = json.loads(out)
        assert code == EXIT_OK
        assert rec["roots"] == [] and rec["fredholm_gaps"] == [["-inf", "inf"]]

    def test_indicial_weight(self, capsys):
        code, out, _ = run(capsys, "indicial", "taub_nut", "--weight", "1/2", "--format", "json")
        rec = json.loads(out)
        assert code == EXIT_OK and rec["fredholm"] is True and rec["critical"] == "1/2"

    def test_ih(self, capsys):
        code, out, _ = run(capsys, "ih", "schwarzschild", "--j", "0", "--engine", "A", "--format", "json")
        assert code == EXIT_OK and json.loads(out)["dims"] == [1, 0, 2, 0, 1]

    def test_signature(self, capsys):
        code, out, _ = run(capsys, "signature", "alg_D4", "--format", "json")
        rec = json.loads(out)
        assert code == EXIT_OK and (rec["signature"], rec["tau"]) == (-4, 0)

    def test_deterministic_output(self, capsys):
        first = run(capsys, "catalog", "run", "--skip-numerics")[1]
        assert run(capsys, "catalog", "run", "--skip-numerics")[1] == first

    def test_output_dir(self, capsys, tmp_path):
        code, _, _ = run(capsys, "hodge", "taub_nut", "--format", "json", "--output-dir", str(tmp_path))
        assert code == EXIT_OK
        assert json.loads((tmp_path / "taub_nut_hodge.json").read_text())["dims"] == [0, 0, 1, 0, 0]

    def test_gh_verify(self, capsys):
        code, out, _ = run(capsys, "gh-verify", "alf_A2", "--points", "100", "--format", "json")
        rec = json.loads(out)
        assert code == EXIT_OK and rec["status"] == "PASS"
        assert len(rec["gram"]) == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "fibhodge.cli", "hodge", "taub_nut", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dims"] == [0, 0, 1, 0, 0]
