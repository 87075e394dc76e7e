"""Covariance of Hodge-transferred operators at the transformed parameters."""
import sys
from fractions import Fraction

from sboforms.operators import d_juhl_operator, hodge_transfer, renormalized_matrix_operator, rest_d_operator
from sboforms.solver import check_covariance


def main(n=3):
    base = [renormalized_matrix_operator(n, i, lam, k) for i in range(n) for k in range(5)
            for lam in (Fraction(1, 3), -1, 2)]
    base += [rest_d_operator(n, i) for i in range(1, n - 1)] + [d_juhl_operator(n, lam) for lam in (0, -1, -2)]
    bad = 0
    for T in base:
        for sides in (("source",), ("target",), ("source", "target")):
            S = T
            for s in sides:
                S = hodge_transfer(S, s)
            if not check_covariance(S).ok:
                bad += 1
                print("fail", T.label, sides, S.i, S.j, S.lam, S.nu, S.delta, S.eps)
    print(f"n={n}: {3 * len(base)} transferred operators, {bad} failures")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
