"""Gram matrices of the Gibbons-Hawking L^2 forms against the radial cutoff.

For a single centre the exact value on the ball of radius R is known in closed
form, which gives an absolute check of the quadrature and of the tail fit.
"""

import argparse
import time

import numpy as np

from fibhodge.gibbons_hawking import MonopoleConfig, QuadratureSpec, l2_gram, taub_nut_gram_exact


def _configs(kmax: int):
    for k in range(1, kmax + 1):
        yield f"on-axis k={k}", MonopoleConfig(1.0, tuple((0.0, 0.0, 3.0 * (i - (k - 1) / 2)) for i in range(k)))
    yield "off-axis k=2", MonopoleConfig(1.0, ((1.0, 0.3, 0.0), (-1.0, -0.3, 0.8)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoffs", type=float, nargs="+", default=[10.0, 20.0, 40.0, 80.0])
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--skip-off-axis", action="store_true")
    args = ap.parse_args()
    spec = QuadratureSpec(tuple(args.cutoffs))
    for label, c in _configs(args.kmax):
        if args.skip_off_axis and not c.on_axis:
            continue
        t0 = time.perf_counter()
        res = l2_gram(c, spec, strict=False)
        eig = np.linalg.eigvalsh(res.matrix)
        print(f"{label}  ({time.perf_counter() - t0:.1f}s)")
        for R, part in zip(spec.cutoffs, res.partials):
            extra = f"  exact {taub_nut_gram_exact(c.m, R):.8f}" if c.k == 1 else ""
            print(f"  R={R:<6g} trace {np.trace(part):.8f}{extra}")
        print(f"  increments {' > '.join(f'{v:.3e}' for v in res.increments)}  "
              f"cauchy={res.cauchy_decreasing}")
        print(f"  extrapolated trace {np.trace(res.extrapolated):.6f} +- {res.tail_bound:.2e}"
              + (f"  (exact {taub_nut_gram_exact(c.m):.6f})" if c.k == 1 else ""))
        print(f"  eigenvalues {np.array2string(eig, precision=4)}  min/max {eig[0] / eig[-1]:.3e}")


if __name__ == "__main__":
    main()
