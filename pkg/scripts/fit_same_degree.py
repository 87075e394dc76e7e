"""Compare the solver kernel for j = i with the closed-form operators.

For each (n, i, k) the kernel is one-dimensional at generic lam; the script
reports whether the covariant closed form lies in it, and whether the
as_stated variant does.
"""
from fractions import Fraction

from sboforms.operators import matrix_coefficients, matrix_operator_ii
from sboforms.solver import membership, solve


def main():
    lam = Fraction(1, 3)
    for n in (3, 4, 5):
        for i in range(n):
            for k in range(1, 5):
                sol = solve(n, i, i, k, lam, k % 2, k % 2)
                ok = membership(matrix_operator_ii(n, i, lam, k), sol)
                lit = membership(matrix_operator_ii(n, i, lam, k, variant="as_stated"), sol)
                c_dd, c_di, b, mu = matrix_coefficients(n, i, lam, k)
                print(f"n={n} i={i} k={k} dim={sol.dimension} closed-form={ok} as_stated={lit} "
                      f"c_dd={c_dd} c_di={c_di} b={b}")


if __name__ == "__main__":
    main()
