"""Print L^2 Hodge numbers, signatures and IH tables for every catalog entry."""

import argparse

from fibhodge.catalog import load_catalog
from fibhodge.hodge import hodge_dims, l2_signature, tau_invariant
from fibhodge.intersection import IHQuery, ih_extended


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ih", action="store_true", help="also print IH_j for j = -1 .. ell-1")
    args = ap.parse_args()
    print(f"{'entry':22} {'metric':15} {'dims':28} {'sig':>4} {'tau':>4}")
    for name, m in sorted(load_catalog().items()):
        t = hodge_dims(m.profile, m.metric, IHQuery(m.profile, m.leray, m.natural_maps))
        sig = tau = ""
        if m.pairing is not None:
            sig = l2_signature(m.pairing)
            tau = tau_invariant(m.pairing) if m.pairing.rel_matrix is not None else ""
        print(f"{name:22} {m.metric.value:15} {str(list(t.dims)):28} {sig!s:>4} {tau!s:>4}")
        if args.ih:
            for j in range(-1, m.profile.ell):
                print(f"{'':22}   IH_{j:<3} {list(ih_extended(m.profile, m.leray, j).dims)}")


if __name__ == "__main__":
    main()
