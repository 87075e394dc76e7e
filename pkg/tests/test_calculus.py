from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sboforms.algebra import Poly, PolyForm, hodge_star, monomial_forms
from sboforms.calculus import (
    CODIFF_SIGN, FormOperator, PolyVectorField, codifferential, d, interior_field, lie_derivative, restrict,
    tangential_lift,
)
from sboforms.conformal import subalgebra_generators

from conftest import rationals


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_d_squared(m):
    for p in range(m - 1):
        for a in monomial_forms(m, p, 3, min_degree=2):
            assert d(d(a)).is_zero()


@pytest.mark.parametrize("m", [2, 3, 4])
def test_codiff_squared(m):
    for p in range(2, m + 1):
        for a in monomial_forms(m, p, 3, min_degree=2):
            assert codifferential(codifferential(a)).is_zero()


def test_codiff_is_hodge_conjugate_of_d():
    # on R^m: d* = (-1)^{m(p+1)+1} * d *  on p-forms, which fixes the sign convention
    m = 3
    for p in range(1, m + 1):
        for a in monomial_forms(m, p, 2):
            s = (-1) ** (m * (p + 1) + 1)
            assert codifferential(a) == hodge_star(d(hodge_star(a))).scale(s)
    assert CODIFF_SIGN == -1


def test_laplacian_on_one_forms():
    # d d* + d* d = -sum d_a^2 componentwise
    a = PolyForm.basis(3, (2,), (2, 1, 1))
    lap = d(codifferential(a)) + codifferential(d(a))
    expect = PolyForm.basis(3, (2,), (0, 1, 1), -2)
    assert lap == expect


@pytest.mark.parametrize("n", [3, 4])
def test_cartan_equals_transport(n):
    for Z in subalgebra_generators(n):
        for p in range(n + 1):
            for a in monomial_forms(n, p, 2):
                assert lie_derivative(Z.field, a, "cartan") == lie_derivative(Z.field, a, "transport")


@st.composite
def fields(draw, m=3):
    comps = []
    for _ in range(m):
        terms = {}
        for _ in range(draw(st.integers(0, 2))):
            terms[tuple(draw(st.integers(0, 2)) for _ in range(m))] = draw(rationals())
        comps.append(Poly(m, terms))
    return PolyVectorField(m, tuple(comps))


@given(fields(), st.integers(0, 3), st.integers(0, 2))
def test_lie_operator_matches_form_level(Z, p, which):
    forms = list(monomial_forms(3, p, 2))
    a = forms[which % len(forms)]
    assert FormOperator.lie(Z, p).apply(a) == lie_derivative(Z, a)


@given(fields(), fields())
def test_lie_bracket_is_commutator(X, Y):
    a = PolyForm.basis(3, (1,), (1, 1, 0)) + PolyForm.basis(3, (3,), (0, 0, 2))
    lhs = lie_derivative(X.bracket(Y), a)
    rhs = lie_derivative(X, lie_derivative(Y, a)) - lie_derivative(Y, lie_derivative(X, a))
    assert lhs == rhs


def test_composition_matches_sequential_application():
    Z = subalgebra_generators(3)[-1]
    A = FormOperator.lie(Z.field, 1)
    B = FormOperator.exterior_d(3, 1) @ FormOperator.partial(3, 1, (1, 0, 1))
    C = B @ A
    for a in monomial_forms(3, 1, 4):
        assert C.apply(a) == B.apply(A.apply(a))


def test_restricted_composition():
    T = FormOperator.exterior_d(3, 1).restrict()
    L = tangential_lift(FormOperator.partial(2, 2, (1, 0)), 3)
    for a in monomial_forms(3, 1, 3):
        lhs = (L @ T).apply(a)
        rhs = FormOperator.partial(2, 2, (1, 0)).apply(restrict(d(a)))
        assert lhs == rhs


def test_restrict_drops_normal_part():
    a = PolyForm.basis(3, (1, 3), (1, 0, 0)) + PolyForm.basis(3, (1, 2), (1, 0, 1)) + \
        PolyForm.basis(3, (1, 2), (0, 1, 0), Fraction(1, 2))
    assert restrict(a) == PolyForm.basis(2, (1, 2), (0, 1), Fraction(1, 2))


def test_interior_field():
    Z = PolyVectorField(2, (Poly.var(2, 2), Poly(2)))
    a = PolyForm.basis(2, (1, 2))
    assert interior_field(Z, a) == PolyForm.basis(2, (2,), (0, 1))
