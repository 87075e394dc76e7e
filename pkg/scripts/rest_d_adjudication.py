"""Scan (lam, nu, delta, eps) for the parameters at which Rest o d is covariant."""
from sboforms.cli import Config
from sboforms.operators import rest_d_operator
from sboforms.solver import check_covariance, solve


def main():
    lams = Config().lam_samples
    for n in (3, 4, 5):
        for i in range(1, n - 1):
            vals = set(lams) | {n - 2 * i, n - 2 * i + 3, n - 3 * i, n - 3 * i + 2}
            T = rest_d_operator(n, i)
            hits = [(lam, nu, de, ep) for lam in sorted(vals) for nu in sorted(vals)
                    for de in (0, 1) for ep in (0, 1)
                    if check_covariance(T.op, lam=lam, nu=nu, delta=de, eps=ep).ok]
            cand = solve(n, i, i + 1, 4, n - 2 * i, 1, 1).dimension
            print(f"n={n} i={i}: covariant at {hits}; "
                  f"solver dim at ({n - 2 * i}, {n - 2 * i + 3}, -, -) = {cand}")


if __name__ == "__main__":
    main()
