"""Compare the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py --size 1024x1024 --radii 2,8,32 --reps 5

Prints one line per (op, radius) with both timings and the speed-up, and
optionally writes the raw rows as CSV.  Outputs are also checked to agree
between backends.
"""
import argparse
import sys

import numpy as np

from umgf.bench import OPS, available_backends, backend, run_bench, write_csv
from umgf.imageops import make_rng
from umgf.io import parse_size


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=parse_size, default=(1024, 1024), help="WxH")
    ap.add_argument("--radii", default="2,8,32")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--ops", default=",".join(OPS))
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)

    if "numba" not in available_backends():
        print("numba is not importable; only the numpy backend can be timed", file=sys.stderr)
        return 1
    width, height = args.size
    radii = [int(r) for r in args.radii.split(",")]
    ops = [o for o in args.ops.split(",") if o]

    img = make_rng(0).random((height, width))
    for op in ops:
        with backend("numba"):
            a = OPS[op](img, radii[0])
        with backend("numpy"):
            b = OPS[op](img, radii[0])
        print(f"{op}: max |numba - numpy| = {np.abs(a - b).max():.3g}")

    rows = run_bench(width, height, radii, args.reps, ops, ["numba", "numpy"])
    times = {(row["op"], row["radius"]): row["median_ms"] for row in rows}
    print(f"{'op':<16}{'radius':>7}{'numba ms':>11}{'numpy ms':>11}{'speed-up':>10}")
    for op in ops:
        for r in radii:
            nb, npy = times[(f"{op}[numba]", r)], times[(f"{op}[numpy]", r)]
            print(f"{op:<16}{r:>7}{nb:>11.2f}{npy:>11.2f}{npy / nb:>10.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(rows, fh)
    return 0


if __name__ == "__main__":
    sys.exit(main())
