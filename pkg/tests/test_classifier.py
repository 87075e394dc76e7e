from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sboforms.classifier import (
    ParamTuple, classify, denormalize_parameters, ij_condition, normalize_parameters, psi_sp, q_condition,
)

from conftest import rationals


def P(*a):
    return ParamTuple.make(*a)


def test_ij_condition_examples():
    assert not ij_condition(6, 0, 2)
    assert ij_condition(4, 2, 1)
    for n in range(3, 8):
        for i in range(n):
            assert ij_condition(n, i, i)


def test_q_condition_examples():
    assert q_condition(P(5, 1, 1, 0, 2, "+", "+"))[0]
    assert not q_condition(P(5, 1, 1, 0, 2, "+", "-"))[0]
    assert q_condition(P(5, 0, 1, -2, 0, "+", "+"))[0]
    assert q_condition(P(5, 2, 3, 0, 0, "+", "+")) == (True, "paper", ["Q_{i,i+1} via identity"])


def test_other_cases_are_oracle_derived():
    holds, source, fired = q_condition(P(4, 3, 1, Fraction(1, 3), Fraction(4, 3), "-", "+"))
    assert source == "oracle"


def test_psi_sp_examples():
    assert psi_sp(0, 2, "+", "+")
    assert not psi_sp(0, 1, "+", "+")
    assert psi_sp(0, 1, "+", "-")


def test_normalize_examples():
    assert normalize_parameters(0, 3, "+") == (0, 3, 0)
    assert normalize_parameters(1, 0, "+") == (1, 1, 1)


@settings(max_examples=1000)
@given(st.integers(0, 6), rationals(), st.integers(0, 1))
def test_normalize_round_trip(i, lam, delta):
    assert denormalize_parameters(*normalize_parameters(i, lam, delta)) == (i, lam, delta)


def test_classify_examples():
    v = classify(P(4, 1, 1, Fraction(1, 3), Fraction(7, 3), "+", "+"))
    assert v.differential_dim == 1 and v.differential_exists
    assert classify(P(4, 1, 1, 0, Fraction(1, 2), "+", "+")).differential_dim == 0
    v = classify(P(5, 0, 3, 0, 0, "+", "+"))
    assert v.localness and v.H_bound == 4


def test_range_errors():
    with pytest.raises(ValueError):
        P(4, 0, 4, 0, 0, "+", "+")
    with pytest.raises(ValueError):
        P(2, 0, 0, 0, 0, "+", "+")


@given(st.integers(3, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n - 1))),
       rationals(), st.integers(0, 4), st.integers(0, 1), st.integers(0, 1))
def test_verdict_invariants(nij, lam, k, d, e):
    n, i, j = nij
    v = classify(P(n, i, j, lam, lam + k, d, e))
    assert v.differential_dim in (0, 1)
    assert v.differential_dim == int(v.differential_exists)
    if not ij_condition(n, i, j):
        assert v.differential_dim == 0
    assert isinstance(v.irreducible_source, bool)
