from fractions import Fraction

import pytest

from sboforms.calculus import FormOperator
from sboforms.operators import matrix_operator_ii, rest_d_operator
from sboforms.solver import (
    Echelon, ResourceCapExceeded, ResultCache, ansatz_dimension, atoms, build_system, check_covariance,
    dimension_table, form_residual, membership, nullspace, solve,
)


def test_nullspace_trivial():
    assert len(nullspace([], 4)) == 4
    assert nullspace([{0: 1}, {1: 1}, {2: 1}], 3) == []
    ker = nullspace([{0: 2, 1: -4}], 2)
    assert ker == [{0: 2, 1: 1}]


def test_echelon_is_deterministic():
    rows = [{0: 3, 2: 6}, {1: Fraction(1, 2), 2: 1}, {0: 1, 1: 1, 2: 3}]
    a, b = Echelon(3), Echelon(3)
    for r in rows:
        a.add(r)
    for r in reversed(rows):
        b.add(r)
    assert a.nullspace() == b.nullspace() == []


def test_ansatz_dimension():
    assert ansatz_dimension(4, 1, 2, 2) == 4 * 3 * 10 == len(atoms(4, 1, 2, 2))
    assert ansatz_dimension(4, 1, 2, -1) == 0


def test_scalar_restriction():
    sol = solve(3, 0, 0, 0, Fraction(1, 3), "+", "+")
    assert sol.dimension == 1
    assert sol.basis[0].op == FormOperator.identity(3, 0).restrict()
    assert solve(3, 0, 0, 0, Fraction(1, 3), "+", "-").dimension == 0


@pytest.mark.parametrize("lam", [Fraction(1, 3), Fraction(-7, 2), 4])
def test_matrix_operator_in_nullspace(lam):
    sol = solve(3, 1, 1, 2, lam, "+", "+")
    assert sol.dimension == 1
    assert membership(matrix_operator_ii(3, 1, lam, 2), sol)


def test_negative_order_short_circuit():
    sys_ = build_system(3, 1, 1, -1, 0, 0)
    assert sys_.solve(0).dimension == 0


@pytest.mark.parametrize("args", [(3, 1, 1, 2), (3, 1, 2, 1), (3, 0, 1, 2), (4, 2, 1, 1), (4, 1, 2, 0)])
def test_representative_rows_agree_with_all_rows(args):
    for d, e in [(0, 0), (1, 1), (0, 1)]:
        rep = build_system(*args, d, e)
        full = build_system(*args, d, e, generators="all")
        for lam in (Fraction(1, 3), 0, -1, 2):
            assert rep.solve(lam).dimension == full.solve(lam).dimension


@pytest.mark.parametrize("args", [(3, 1, 1, 2), (3, 1, 2, 1), (3, 2, 0, 1), (3, 0, 1, 3)])
def test_basis_resists_larger_test_set(args):
    n, i, j, k = args
    for d in (0, 1):
        for e in (0, 1):
            for lam in (Fraction(2, 5), -1, 0):
                for T in solve(n, i, j, k, lam, d, e).basis:
                    assert check_covariance(T).ok
                    assert form_residual(T, k + 3) == {}


def test_rest_d_found_by_solver():
    sol = solve(4, 1, 2, 1, 0, "+", "+")
    assert sol.dimension == 1 and membership(rest_d_operator(4, 1), sol)


def test_cap():
    with pytest.raises(ResourceCapExceeded):
        build_system(5, 2, 2, 4, 0, 0, cap=100)
    tab = dimension_table(4, 2, [0], cap=50, ij=[(2, 2)], parities=[(0, 0)])
    assert any(e.status == "skipped" and e.dimension is None for e in tab)


def test_cache_replay(tmp_path):
    cache = ResultCache(tmp_path / "c.json")
    fresh = dimension_table(3, 2, [Fraction(1, 3), -1], cache=cache)
    again = dimension_table(3, 2, [Fraction(1, 3), -1], cache=ResultCache(tmp_path / "c.json"))
    assert [e.to_dict() for e in fresh] == [e.to_dict() for e in again]
