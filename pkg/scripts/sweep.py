"""Solver dimension sweep against the classifier.

    python3 scripts/sweep.py --n-max 4 --k-max 3
"""
import argparse
import time
from collections import Counter

from sboforms.classifier import ParamTuple, classify
from sboforms.cli import Config
from sboforms.solver import dimension_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--k-max", type=int, default=4)
    a = ap.parse_args()
    lams = Config().lam_samples
    for n in range(3, a.n_max + 1):
        t = time.perf_counter()
        tab = dimension_table(n, a.k_max, lams)
        dims = Counter(e.dimension for e in tab)
        bad = [e for e in tab if classify(ParamTuple.make(n, e.i, e.j, e.lam, e.nu, e.delta, e.eps)).differential_dim
               != e.dimension]
        print(f"n={n}: {len(tab)} points, dims {dict(dims)}, classifier mismatches {len(bad)}, "
              f"{time.perf_counter() - t:.1f}s")
        for e in bad[:10]:
            print("  ", e.to_dict())


if __name__ == "__main__":
    main()
