"""Command line interface.

Exit codes: 0 pass, 1 engine error, 2 usage error, 3 mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .catalog import ENGINE_ERRORS, load_catalog, run_entry
from .exactlin import to_fraction
from .gibbons_hawking import verify_config
from .hodge import hodge_dims, l2_signature, tau_invariant
from .indicial import BaseSpectrum, IndicialError, indicial_for, is_fredholm
from .intersection import EngineInapplicable, IHQuery, engine_a_applicable, ih_closed_form_table, ih_extended
from .manifest import Manifest, ManifestError, load_manifest

EXIT_OK, EXIT_ENGINE, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


def _resolve(ref: str) -> Manifest:
    path = Path(ref)
    if path.is_file():
        return load_manifest(path.read_text(encoding="utf-8"))
    name = path.name.removesuffix(".json")
    cat = load_catalog()
    if name in cat:
        return cat[name]
    raise ManifestError(f"{ref}: no such file and no shipped catalog entry {name!r}")


def _record(entry: str, metric: str, status: str, dims=None, case_tags=(), **extra) -> dict:
    return {"entry": entry, "metric": metric, "status": status,
            "dims": list(dims) if dims is not None else None, "case_tags": list(case_tags), **extra}


def _table(rec: dict) -> str:
    lines = [f"{rec['entry']}  [{rec['metric']}]  {rec['status']}"]
    if rec.get("dims") is not None:
        tags = rec.get("case_tags") or [""] * len(rec["dims"])
        for k, (d, t) in enumerate(zip(rec["dims"], tags)):
            lines.append(f"  k={k:<2} {d:>3}  {t}".rstrip())
    for key, val in rec.items():
        if key in ("entry", "metric", "status", "dims", "case_tags", "checks"):
            continue
        lines.append(f"  {key}: {val}")
    for c in rec.get("checks", []):
        lines.append(f"  [{'ok' if c['ok'] else 'FAIL'}] {c['name']} {c['detail']}".rstrip())
    return "\n".join(lines)


def _emit(args, records: list[dict], stem: str) -> None:
    if args.format == "json":
        text = json.dumps(records if len(records) != 1 else records[0], indent=1, sort_keys=True)
    else:
        text = "\n".join(_table(r) for r in records)
    print(text)
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.{'json' if args.format == 'json' else 'txt'}").write_text(text + "\n", encoding="utf-8")


def cmd_ih(args) -> int:
    m = _resolve(args.manifest)
    p = m.profile
    engine = args.engine
    if engine == "auto":
        engine = "B" if p.has_matrices else "A"
    if engine == "A" and not engine_a_applicable(p, args.j):
        raise EngineInapplicable(f"Engine A inapplicable at j = {args.j}")
    t = ih_closed_form_table(p, args.j, m.leray) if engine == "A" else ih_extended(p, m.leray, args.j)
    _emit(args, [_record(m.name, m.metric.value, "ok", t.dims, [f"IH_{t.j}/{t.engine}"] * len(t.dims),
                         j=t.j, engine=t.engine)], f"{m.name}_ih")
    return EXIT_OK


def cmd_hodge(args) -> int:
    m = _resolve(args.manifest)
    t = hodge_dims(m.profile, m.metric, IHQuery(m.profile, m.leray, m.natural_maps))
    status = "ok"
    if m.expected is not None:
        status = "PASS" if t.dims == m.expected.dims else "FAIL"
    _emit(args, [_record(m.name, m.metric.value, status, t.dims, t.case_tags)], f"{m.name}_hodge")
    return EXIT_MISMATCH if status == "FAIL" else EXIT_OK


def cmd_indicial(args) -> int:
    m = _resolve(args.manifest)
    p = m.profile
    spec = m.spectrum if m.spectrum is not None else BaseSpectrum(())
    rep = indicial_for(m.metric, spec, p.n, p.b, p.f)
    extra = {
        "roots": [{"gamma": str(r.gamma), "multiplicity": r.multiplicity, "source": r.source} for r in rep.roots],
        "fredholm_gaps": [[str(lo) if lo is not None else "-inf", str(hi) if hi is not None else "inf"]
                          for lo, hi in rep.fredholm_gaps],
        "critical": str(rep.critical) if rep.critical is not None else None,
        "warnings": list(rep.warnings),
    }
    if args.weight is not None:
        extra["weight"] = args.weight
        extra["fredholm"] = is_fredholm(rep, to_fraction(args.weight))
    _emit(args, [_record(m.name, m.metric.value, "ok", **extra)], f"{m.name}_indicial")
    return EXIT_OK


def cmd_signature(args) -> int:
    m = _resolve(args.manifest)
    if m.pairing is None:
        raise ManifestError(f"{m.name}: no pairing data")
    t = hodge_dims(m.profile, m.metric, IHQuery(m.profile, m.leray, m.natural_maps))
    mid = m.profile.n // 2
    sig = l2_signature(m.pairing, expected_size=t.dims[mid] if m.profile.n % 2 == 0 else None)
    tau = tau_invariant(m.pairing) if m.pairing.rel_matrix is not None else None
    status = "ok"
    ex = m.expected
    if ex is not None and ((ex.signature is not None and ex.signature != sig)
                           or (ex.tau is not None and tau is not None and ex.tau != tau)):
        status = "FAIL"
    _emit(args, [_record(m.name, m.metric.value, status, t.dims, t.case_tags, signature=sig, tau=tau)],
          f"{m.name}_signature")
    return EXIT_MISMATCH if status == "FAIL" else EXIT_OK


def cmd_gh_verify(args) -> int:
    m = _resolve(args.manifest)
    if m.monopoles is None:
        raise ManifestError(f"{m.name}: no monopole data")
    spec = m.monopoles
    rep = verify_config(spec.config, args.points or spec.sample_points, spec.seed if args.seed is None else args.seed,
                        spec=spec.quadrature)
    status = "PASS" if rep.passed else "FAIL"
    rec = _record(m.name, m.metric.value, status,
                  gram=[[float(x) for x in row] for row in rep.gram.matrix],
                  gram_eigenvalues=[float(x) for x in rep.gram_eigenvalues],
                  checks=[{"name": n, "ok": ok, "detail": d} for n, ok, d in rep.checks])
    _emit(args, [rec], f"{m.name}_gh")
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_catalog_run(args) -> int:
    cat = load_catalog()
    names = sorted(cat)
    if args.only:
        missing = [n for n in args.only if n not in cat]
        if missing:
            raise ManifestError(f"unknown catalog entries: {', '.join(missing)}")
        names = sorted(args.only)
    reports = [run_entry(cat[n], numerics=not args.skip_numerics) for n in names]
    records = []
    for r in reports:
        rec = r.to_json()
        if rec["error"] is None:
            del rec["error"]
        records.append(rec)
    _emit(args, records, "catalog")
    if any(r.status == "ERROR" for r in reports):
        return EXIT_ENGINE
    return EXIT_MISMATCH if any(r.status == "FAIL" for r in reports) else EXIT_OK


def cmd_catalog_list(args) -> int:
    cat = load_catalog()
    records = [_record(n, m.metric.value, "ok", m.expected.dims if m.expected else None,
                       provenance=m.provenance, tags=list(m.tags)) for n, m in sorted(cat.items())]
    _emit(args, records, "catalog_list")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def options(default):
        # the global flags may appear before or after the subcommand; only the
        # top level sets defaults so a subparser never overwrites them
        opts = argparse.ArgumentParser(add_help=False)
        opts.add_argument("--format", choices=("table", "json"),
                          default="table" if default else argparse.SUPPRESS)
        opts.add_argument("--output-dir", help="also write the report into this directory",
                          default=None if default else argparse.SUPPRESS)
        return opts

    common = options(False)
    parser = argparse.ArgumentParser(prog="fibhodge", parents=[options(True)],
                                     description="L^2 harmonic forms on manifolds with fibred ends")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ih", parents=[common], help="extended intersection cohomology IH_j")
    p.add_argument("manifest")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--engine", choices=("auto", "A", "B"), default="auto")
    p.set_defaults(func=cmd_ih)

    p = sub.add_parser("hodge", parents=[common], help="dimensions of L^2 harmonic forms")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_hodge)

    p = sub.add_parser("indicial", parents=[common], help="indicial roots and Fredholm test")
    p.add_argument("manifest")
    p.add_argument("--weight", help="rational weight a, e.g. 1/2")
    p.set_defaults(func=cmd_indicial)

    p = sub.add_parser("signature", parents=[common], help="L^2 signature and tau")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("gh-verify", parents=[common], help="Gibbons-Hawking numerical checks")
    p.add_argument("manifest")
    p.add_argument("--points", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gh_verify)

    p = sub.add_parser("catalog", parents=[common], help="shipped examples")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    q = csub.add_parser("run", parents=[common])
    q.add_argument("--only", nargs="+", metavar="NAME")
    q.add_argument("--skip-numerics", action="store_true")
    q.set_defaults(func=cmd_catalog_run)
    q = csub.add_parser("list", parents=[common])
    q.set_defaults(func=cmd_catalog_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (*ENGINE_ERRORS, IndicialError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
