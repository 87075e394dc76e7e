"""Acceptance gate: one test per criterion, exact arithmetic throughout.

The solver sweep (n = 3..5, k <= 4, all i, j, parities, default lambda
sample) is computed once per session and shared.
"""
import time
from fractions import Fraction
from itertools import combinations
import random

import pytest

from sboforms.algebra import hodge_star, monomial_forms
from sboforms.calculus import codifferential, d, lie_derivative
from sboforms.classifier import ParamTuple, classify, ij_condition, is_natural
from sboforms.cli import Config
from sboforms.conformal import combination, combined_action, infinitesimal_action, subalgebra_generators
from sboforms.operators import (
    REST_D_PARAMS, d_juhl_operator, gegenbauer, gegenbauer_recurrence, hodge_transfer, juhl_operator,
    matrix_operator_ii, renormalized_matrix_operator, rest_d_operator,
)
from sboforms.periods import (
    CohomRep, branching_table, cohom_reps, is_tempered_rep, l2_tempered, max_period, one_dim_reps,
)
from sboforms.solver import check_covariance, dimension_table, form_residual, membership, solve

LAMS = Config().lam_samples
NS = (3, 4, 5)
K_MAX = 4


@pytest.fixture(scope="session")
def sweep():
    t = time.perf_counter()
    tab = [e for n in NS for e in dimension_table(n, K_MAX, LAMS)]
    return tab, time.perf_counter() - t


def test_default_lambda_sample():
    assert sorted(LAMS) == sorted([Fraction(1, 3), Fraction(2, 5), Fraction(7, 2), -2, -1, 0, 1, 2, 3])


# 1 -------------------------------------------------------------------------

def test_criterion_1_matrix_operator_covariance():
    t = time.perf_counter()
    bad, zero, count = [], 0, 0
    for n in NS:
        for i in range(n + 1):
            for k in range(K_MAX + 1):
                for lam in LAMS:
                    T = matrix_operator_ii(n, i, lam, k)
                    count += 1
                    zero += T.is_zero()
                    rep = check_covariance(T)
                    if not rep.ok:
                        bad.append((n, i, k, lam, rep.failures))
    # explicit test forms of degree <= k+3, independent of operator composition
    for i in range(4):
        for k in range(K_MAX + 1):
            for lam in LAMS:
                fails = form_residual(matrix_operator_ii(3, i, lam, k), k + 3)
                if fails:
                    bad.append((3, i, k, lam, fails))
    for i in range(5):
        for k in range(K_MAX + 1):
            fails = form_residual(matrix_operator_ii(4, i, Fraction(1, 3), k), k + 3)
            if fails:
                bad.append((4, i, k, Fraction(1, 3), fails))
    assert count == 675
    assert not bad, bad[:10]
    assert time.perf_counter() - t < 300


# 2 -------------------------------------------------------------------------

def test_criterion_2_classification_equivalence(sweep):
    tab, elapsed = sweep
    assert len(tab) == 11160
    skipped = [e for e in tab if e.status != "ok"]
    assert not skipped
    assert {e.dimension for e in tab} <= {0, 1}
    off = [e.to_dict() for e in tab if e.dimension and not ij_condition(e.n, e.i, e.j)]
    assert not off
    assert elapsed < 600
    # j = i: dimension 1 exactly when nu - lam in N and delta = eps = nu - lam mod 2
    mismatch = [(e.n, e.i, e.k, e.lam, e.delta, e.eps, e.dimension) for e in tab if e.j == e.i
                and e.dimension != int(is_natural(e.nu - e.lam) and e.delta == e.eps == (e.nu - e.lam) % 2)]
    assert not mismatch, f"{len(mismatch)} same-degree points violate the parity rule, e.g. {mismatch[:6]}"


def test_sweep_matches_star_image_classifier(sweep):
    tab, _ = sweep
    bad = []
    for e in tab:
        v = classify(ParamTuple.make(e.n, e.i, e.j, e.lam, e.nu, e.delta, e.eps))
        if v.differential_dim != e.dimension:
            bad.append(e.to_dict())
    assert not bad, bad[:10]


def test_same_degree_exceptions_are_star_images(sweep):
    """Every j = i point off the parity rule carries an operator built from a star image."""
    tab, _ = sweep
    for e in tab:
        if e.j != e.i or e.dimension != 1 or e.delta == e.eps == e.k % 2:
            continue
        v = classify(ParamTuple.make(e.n, e.i, e.j, e.lam, e.nu, e.delta, e.eps))
        assert v.source == "oracle" and any("star" in c for c in v.conditions_fired)


# 3 -------------------------------------------------------------------------

def test_criterion_3_scalar_collapse():
    for n in NS:
        for k in range(K_MAX + 1):
            for lam in LAMS:
                mu = lam - Fraction(n - 1, 2)
                b = Fraction(lam + k, 2)
                assert matrix_operator_ii(n, 0, lam, k).op == juhl_operator(k, mu, n).restrict().scale(b)


# 4 -------------------------------------------------------------------------

def test_criterion_4_gegenbauer_dual_implementation():
    rng = random.Random(20240607)
    mus = set()
    while len(mus) < 20:
        mus.add(Fraction(rng.randint(-60, 60), rng.randint(1, 12)))
    for mu in sorted(mus):
        for k in range(11):
            closed = gegenbauer(k, mu).as_tpoly()
            rec = {m: c for m, c in gegenbauer_recurrence(k, mu).items() if c}
            assert closed == rec
    degenerate = 0
    for n in NS:
        for i in range(n + 1):
            for k in range(K_MAX + 1):
                for lam in LAMS:
                    if i < n and matrix_operator_ii(n, i, lam, k).is_zero():
                        degenerate += 1
                        R = renormalized_matrix_operator(n, i, lam, k)
                        assert not R.is_zero() and check_covariance(R).ok
    assert degenerate > 0


# 5 -------------------------------------------------------------------------

def test_criterion_5_rest_d_adjudication():
    for n in NS:
        for i in range(1, n - 1):
            # sweep grid plus both candidate normalizations
            vals = set(LAMS) | {n - 2 * i, n - 2 * i + 3, n - 3 * i, n - 3 * i + 2}
            T = rest_d_operator(n, i)
            hits = []
            for lam in vals:
                for nu in vals:
                    for de in (0, 1):
                        for ep in (0, 1):
                            if check_covariance(T.op, lam=lam, nu=nu, delta=de, eps=ep).ok:
                                hits.append((lam, nu, de, ep))
            assert hits == [(0, 0, 0, 0)]
            assert (REST_D_PARAMS["lam"], REST_D_PARAMS["nu"], REST_D_PARAMS["delta"], REST_D_PARAMS["eps"]) \
                == hits[0]
            sol = solve(n, i, i + 1, 1, 0, 0, 0)
            assert sol.dimension == 1 and membership(T, sol)
            # the other normalization carries no operator at all
            assert solve(n, i, i + 1, 4, n - 2 * i, 1, 1).dimension == 0
            assert classify(ParamTuple.make(n, i, i + 1, 0, 0, "+", "+")).differential_dim == 1
        for lam in (0, -1, -2):
            J = d_juhl_operator(n, lam)
            assert check_covariance(J).ok
            if n < 5:
                sol = solve(n, 0, 1, -lam + 1, lam, J.delta, J.eps)
                assert sol.dimension == 1 and membership(J, sol)


# 6 -------------------------------------------------------------------------

def test_criterion_6_hodge_closure():
    n = 3
    base = [renormalized_matrix_operator(n, i, lam, k) for i in range(n) for k in range(K_MAX + 1)
            for lam in LAMS]
    base += [rest_d_operator(n, 1)] + [d_juhl_operator(n, lam) for lam in (0, -1, -2)]
    checked = solved = 0
    for T in base:
        for sides in (("source",), ("target",), ("source", "target")):
            S = T
            for s in sides:
                S = hodge_transfer(S, s)
            assert check_covariance(S).ok, (T.label, sides)
            checked += 1
            k = S.nu - S.lam - S.i + S.j
            if S.j < n and 0 <= k <= K_MAX and not S.is_zero():
                sol = solve(n, S.i, S.j, int(k), S.lam, S.delta, S.eps)
                assert sol.dimension == 1 and membership(S, sol)
                solved += 1
    assert checked == 3 * len(base) and solved > 0


# 7 -------------------------------------------------------------------------

# O(4,1) > O(3,1): allowed (Index, sgn) pairs under condition (iii)
ALLOWED_4_1 = {
    ((0, 0), (0, 0)), ((1, 0), (0, 0)), ((1, 0), (1, 0)), ((2, 0), (1, 0)), ((2, 0), (2, 0)),
    ((3, 0), (2, 0)), ((3, 0), (3, 0)), ((4, 0), (3, 0)),
    ((0, 1), (0, 1)), ((1, 1), (0, 1)), ((1, 1), (1, 1)), ((2, 1), (1, 1)), ((2, 1), (2, 1)),
    ((3, 1), (2, 1)), ((3, 1), (3, 1)), ((4, 1), (3, 1)),
}


def test_criterion_7_period_tables():
    t = time.perf_counter()
    tab = branching_table(3)
    assert len(tab) == 10 and all(len(row) == 8 for row in tab.values())
    got = {((P.index, P.sgn), (p.index, p.sgn)) for P, row in tab.items() for p, ok in row.items() if ok}
    assert got == ALLOWED_4_1
    tab4 = branching_table(4)
    assert len(tab4) == 12 and all(len(row) == 10 for row in tab4.values())
    for P, row in tab4.items():
        for p, ok in row.items():
            assert ok == (P.index - 1 <= p.index <= P.index and P.sgn == p.sgn)
    for n in range(1, 10):
        # one-dimensional representations
        assert one_dim_reps(n) == {CohomRep.make(n, 0, "+"), CohomRep.make(n, 0, "-"),
                                   CohomRep.make(n, n + 1, "+"), CohomRep.make(n, n + 1, "-")}
        assert CohomRep.make(n, 0, "+").label == "1" and CohomRep.make(n, n + 1, "-").label == "det"
        # tempered
        temp = {P.index for P in cohom_reps(n) if is_tempered_rep(P)}
        assert temp == ({(n + 1) // 2} if n % 2 else {n // 2, n // 2 + 1})
        # extremal periods
        assert max_period(CohomRep.make(n, 0, "+")) == n + 1
        assert max_period(CohomRep.make(n, n + 1, "+")) == 0
        # a tempered cohomological representation has periods for every k <= n/2 + 1
        best = max(max_period(P) for P in cohom_reps(n) if P.sgn == 0 and is_tempered_rep(P))
        assert best == n // 2 + 1
        for k in range(n + 3):
            assert l2_tempered(n, k) == (k <= Fraction(n, 2) + 1)
    assert time.perf_counter() - t < 1


# 8 -------------------------------------------------------------------------

def test_criterion_8_structural_calculus():
    t = time.perf_counter()
    for m in range(2, 6):
        for p in range(m + 1):
            for a in monomial_forms(m, p, 3, min_degree=2):
                assert d(d(a)).is_zero()
                assert codifferential(codifferential(a)).is_zero()
                assert hodge_star(hodge_star(a)) == a.scale((-1) ** (p * (m - p)))
    for n in range(3, 6):
        gens = subalgebra_generators(n)
        for Z in gens:
            for p in range(n + 1):
                for a in list(monomial_forms(n, p, 2))[::3]:
                    assert lie_derivative(Z.field, a, "cartan") == lie_derivative(Z.field, a, "transport")
        for Z1, Z2 in combinations(gens, 2):
            coeffs = combination(Z1.field.bracket(Z2.field), gens)
            assert coeffs is not None
            for lam in (Fraction(1, 3), -2):
                for p in (0, 1, n - 1):
                    for a in list(monomial_forms(n, p, 2))[::11]:
                        lhs = infinitesimal_action(Z1, lam, infinitesimal_action(Z2, lam, a)) - \
                            infinitesimal_action(Z2, lam, infinitesimal_action(Z1, lam, a))
                        assert lhs == combined_action(coeffs, gens, lam, a)
    assert time.perf_counter() - t < 120
