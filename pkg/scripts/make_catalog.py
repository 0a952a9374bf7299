"""Regenerate the shipped catalog JSON from the Python builders."""

import argparse
from pathlib import Path

from fibhodge.catalog import builtin_entries, catalog_dir, load_catalog, write_catalog


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=catalog_dir())
    args = ap.parse_args()
    paths = write_catalog(args.out)
    # the files must parse back to exactly what the builders produce
    assert load_catalog(args.out) == builtin_entries()
    for p in paths:
        print(p)


if __name__ == "__main__":
    main()
