"""Exact solver for differential symmetry breaking operators.

Unknowns are the constant coefficients of a homogeneous order-k operator
E^i(R^n) -> E^j(R^{n-1}) followed by restriction.  The intertwining relation
T o dpi_lam(Z) = dpi_nu(Z|Y) o T is expanded as an identity of normal-ordered
operators, so the equations do not depend on a choice of test forms.

Two reductions keep the systems small:

* columns are invariants of the finite group G of signed permutations of
  the axes 1..n-1 together with x_n -> -x_n (twisted by the parity
  characters).  Together with so(n-1) these elements generate O(n-1) x Z/2,
  so nothing is lost;
* on G-equivariant operators the K_a and M_ab rows are G-conjugate to the
  K_1 and M_12 rows, and translation/dilation rows vanish identically.  Both
  facts are asserted on every system rather than assumed.

Pass ``generators="all"`` to build the unreduced rows instead.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import Exponent, MultiIndex, Rational, exponents, fmt_rat, multi_indices, rat
from .calculus import CODIFF_SIGN, FormOperator, tangential_lift
from .conformal import (
    ConfGenerator,
    SignedPermutation,
    action_operator,
    conjugate_restricted,
    dilation,
    reflections,
    rotation,
    special_conformal,
    subalgebra_generators,
    translation,
)
from .operators import SboOperator, parity

Atom = Tuple[MultiIndex, MultiIndex, Exponent]

DEFAULT_CAP = 5000


class ResourceCapExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# ansatz


def atoms(n: int, i: int, j: int, k: int) -> List[Atom]:
    """All (I, J, beta) with n not in J and |beta| = k, in a pinned order."""
    if k < 0:
        return []
    return [(I, J, b) for I in multi_indices(n, i) for J in multi_indices(n - 1, j)
            for b in sorted(exponents(n, k), reverse=True)]


def ansatz_dimension(n: int, i: int, j: int, k: int) -> int:
    if k < 0 or not (0 <= i <= n and 0 <= j <= n - 1):
        return 0
    return comb(n, i) * comb(n - 1, j) * comb(k + n - 1, n - 1)


def atom_operator(n: int, i: int, j: int, atom: Atom, c: Rational = 1) -> FormOperator:
    I, J, b = atom
    return FormOperator(n, i, j, {(I, J, (0,) * n, b): c}, restricted=True)


def operator_from_vector(n: int, i: int, j: int, basis: Sequence[Atom], vec: Dict[int, Rational]) -> FormOperator:
    z = (0,) * n
    return FormOperator(n, i, j, {(basis[c][0], basis[c][1], z, basis[c][2]): v for c, v in vec.items()},
                        restricted=True)


# ---------------------------------------------------------------------------
# residuals


def residual_split(T: FormOperator, Z: ConfGenerator, shift: Rational) -> Tuple[FormOperator, FormOperator]:
    """(A0, A1) with T o dpi_lam(Z) - dpi_{lam+shift}(Z|Y) o T = A0 + lam A1."""
    n = Z.n
    ZY = Z.restricted()
    left_l = FormOperator.lie(ZY.field, T.dst)
    right_l = FormOperator.lie(Z.field, T.src)
    a0 = T @ right_l - tangential_lift(left_l, n) @ T
    rho_x = FormOperator.multiplication(n, T.src, Z.rho)
    rho_y = tangential_lift(FormOperator.multiplication(n - 1, T.dst, ZY.rho), n)
    rho_term = rho_y @ T
    a1 = T @ rho_x - rho_term
    if shift:
        a0 = a0 - rho_term.scale(shift)
    return a0, a1


def intertwining_residual(T: FormOperator, Z: ConfGenerator, lam, nu) -> FormOperator:
    """T o dpi_lam(Z) - dpi_nu(Z|Y) o T as an operator."""
    n = Z.n
    ZY = Z.restricted()
    return T @ action_operator(Z, T.src, lam) - tangential_lift(action_operator(ZY, T.dst, nu), n) @ T


def reflection_residual(T: FormOperator, sigma: ConfGenerator, delta: int, eps: int) -> FormOperator:
    """pi_nu(sigma|Y) o T o pi_lam(sigma)^{-1} - T."""
    return conjugate_restricted(T, sigma.linear, sigma.or_X, sigma.or_Y, delta, eps) - T


@dataclass
class CovarianceReport:
    ok: bool
    failures: Dict[str, int] = field(default_factory=dict)  # generator label -> number of nonzero terms

    def first_failure(self) -> Optional[str]:
        return next(iter(self.failures), None)


def check_covariance(op: SboOperator | FormOperator, n=None, i=None, j=None, lam=None, nu=None,
                     delta=None, eps=None, generators: Optional[List[ConfGenerator]] = None) -> CovarianceReport:
    """Exact covariance test against every subalgebra generator and both reflections."""
    if isinstance(op, SboOperator):
        T = op.op
        lam = op.lam if lam is None else lam
        nu = op.nu if nu is None else nu
        delta = op.delta if delta is None else delta
        eps = op.eps if eps is None else eps
    else:
        T = op
    lam, nu = rat(lam), rat(nu)
    delta, eps = parity(delta), parity(eps)
    gens = subalgebra_generators(T.n) if generators is None else generators
    failures = {}
    for Z in gens:
        R = intertwining_residual(T, Z, lam, nu)
        if not R.is_zero():
            failures[Z.label] = len(R.terms)
    for s in reflections(T.n):
        R = reflection_residual(T, s, delta, eps)
        if not R.is_zero():
            failures[s.label] = len(R.terms)
    return CovarianceReport(not failures, failures)


def form_residual(op: SboOperator, max_degree: int, generators: Optional[List[ConfGenerator]] = None,
                       method: str = "cartan") -> Dict[str, int]:
    """Covariance on explicit monomial test forms of polynomial degree <= max_degree.

    Independent of operator composition: uses the form-level Lie derivative and
    finite actions. Returns generator label -> number of failing test forms.
    """
    from .algebra import monomial_forms
    from .calculus import restrict
    from .conformal import finite_action, infinitesimal_action

    n = op.n
    gens = subalgebra_generators(n) if generators is None else generators
    fails: Dict[str, int] = {}
    forms = list(monomial_forms(n, op.i, max_degree))
    for Z in gens:
        ZY = Z.restricted()
        for a in forms:
            lhs = op.apply(infinitesimal_action(Z, op.lam, a, method=method))
            rhs = infinitesimal_action(ZY, op.nu, op.apply(a), method=method)
            if lhs != rhs:
                fails[Z.label] = fails.get(Z.label, 0) + 1
    for s in reflections(n):
        sY = s.restricted()
        for a in forms:
            lhs = finite_action(sY.linear, op.nu, op.eps, op.apply(finite_action(s, op.lam, op.delta, a)),
                                orientation=s.or_Y)
            rhs = op.apply(a)
            if lhs != rhs:
                fails[s.label] = fails.get(s.label, 0) + 1
    return fails


# ---------------------------------------------------------------------------
# symmetry reduction


def hyperoctahedral(n: int) -> List[SignedPermutation]:
    """Generators of G: sigma_1, adjacent swaps of axes < n, and x_n -> -x_n."""
    gens = [SignedPermutation.flip(n, 1), SignedPermutation.flip(n, n)]
    gens += [SignedPermutation.swap(n, a, a + 1) for a in range(1, n - 1)]
    return gens


def _conj_atom(h: SignedPermutation, atom: Atom, n: int, delta: int, eps: int) -> Tuple[int, Atom]:
    op = atom_operator(n, len(atom[0]), len(atom[1]), atom)
    hy = h.on_hyperplane()
    (key, c), = conjugate_restricted(op, h, h.det(), hy.det(), delta, eps).terms.items()
    I, J, _, g = key
    return c, (I, J, g)


def invariant_columns(n: int, basis: Sequence[Atom], delta: int, eps: int) -> List[Dict[int, int]]:
    """Basis of G-invariant vectors (twisted by the parity characters), as sparse signed orbit sums."""
    index = {a: c for c, a in enumerate(basis)}
    gens = hyperoctahedral(n)
    seen = set()
    cols = []
    for start in range(len(basis)):
        if start in seen:
            continue
        sign_of = {start: 1}
        queue = [start]
        bad = False
        while queue:
            c = queue.pop()
            for h in gens:
                s, a2 = _conj_atom(h, basis[c], n, delta, eps)
                c2 = index[a2]
                s2 = s * sign_of[c]
                if c2 in sign_of:
                    if sign_of[c2] != s2:
                        bad = True
                else:
                    sign_of[c2] = s2
                    queue.append(c2)
        seen.update(sign_of)
        if not bad:
            cols.append(dict(sorted(sign_of.items())))
    return cols


def representative_generators(n: int) -> List[ConfGenerator]:
    gens = [special_conformal(n, 1)]
    if n >= 3:
        gens.append(rotation(n, 1, 2))
    return gens


# ---------------------------------------------------------------------------
# exact linear algebra


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    first = row[min(row)]
    if first < 0:
        g = -g
    return {c: v // g for c, v in row.items()} if g not in (0, 1) else row


def _integer_row(row: Dict[int, Rational]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    return {c: int(v * den) for c, v in row.items() if v}


class Echelon:
    """Incremental fraction-free row echelon form over Z (deterministic)."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: Dict[int, Dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Dict[int, int]) -> Dict[int, int]:
        row = dict(row)
        while row:
            c = min(row)
            p = self.pivots.get(c)
            if p is None:
                return row
            a, b = p[c], row[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {k: v * ma for k, v in row.items()}
            for k, v in p.items():
                w = new.get(k, 0) - mb * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = _primitive(new) if new else new
        return row

    def add(self, row: Dict[int, Rational]) -> bool:
        if self.rank == self.ncols:
            return False
        r = self.reduce(_integer_row(row))
        if not r:
            return False
        r = _primitive(r)
        self.pivots[min(r)] = r
        return True

    def nullspace(self) -> List[Dict[int, Fraction]]:
        """Basis of the kernel, one vector per free column, fully reduced."""
        piv = sorted(self.pivots, reverse=True)
        # back-substitute into reduced form with pivot value 1
        red: Dict[int, Dict[int, Fraction]] = {}
        for c in piv:
            row = {k: Fraction(v, self.pivots[c][c]) for k, v in self.pivots[c].items()}
            for k in [k for k in row if k != c and k in red]:
                f = row.pop(k)
                for kk, vv in red[k].items():
                    if kk != k:
                        row[kk] = row.get(kk, 0) - f * vv
                        if not row[kk]:
                            del row[kk]
            red[c] = row
        free = [c for c in range(self.ncols) if c not in self.pivots]
        out = []
        for f in free:
            v = {f: Fraction(1)}
            for c, row in red.items():
                if f in row:
                    v[c] = -row[f]
            out.append(dict(sorted(v.items())))
        return out


def nullspace(rows: Iterable[Dict[int, Rational]], ncols: int) -> List[Dict[int, Fraction]]:
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
        if e.rank == ncols:
            break
    return e.nullspace()


def primitive_vector(v: Dict[int, Rational]) -> Dict[int, Rational]:
    """Scale to coprime integers with positive first entry."""
    return {c: x for c, x in _primitive(_integer_row(v)).items()}


# ---------------------------------------------------------------------------
# systems


@dataclass
class IntertwiningSystem:
    n: int
    i: int
    j: int
    k: int
    delta: int
    eps: int
    basis: List[Atom]
    columns: List[Dict[int, int]]
    rows0: List[Dict[int, Rational]]  # lam-independent part per equation
    rows1: List[Dict[int, Rational]]  # coefficient of lam
    generators: str = "representative"

    @property
    def shift(self) -> int:
        return self.k + self.i - self.j

    def rows_at(self, lam) -> List[Dict[int, Rational]]:
        lam = rat(lam)
        out = []
        for r0, r1 in zip(self.rows0, self.rows1):
            r = dict(r0)
            if lam:
                for c, v in r1.items():
                    w = r.get(c, 0) + lam * v
                    if w:
                        r[c] = w
                    else:
                        r.pop(c, None)
            if r:
                out.append(r)
        return out

    def solve(self, lam) -> "Solution":
        lam = rat(lam)
        kern = nullspace(self.rows_at(lam), len(self.columns))
        ops = []
        for v in kern:
            full: Dict[int, Rational] = {}
            for cidx, x in v.items():
                for a, s in self.columns[cidx].items():
                    full[a] = full.get(a, 0) + s * x
            full = primitive_vector({a: x for a, x in full.items() if x})
            op = operator_from_vector(self.n, self.i, self.j, self.basis, full)
            ops.append(SboOperator(self.n, self.i, self.j, lam, rat(lam + self.shift), self.delta, self.eps, op,
                                   label="solver basis"))
        return Solution(self, lam, len(kern), ops)


@dataclass
class Solution:
    system: IntertwiningSystem
    lam: Rational
    dimension: int
    basis: List[SboOperator]


@lru_cache(maxsize=64)
def _atom_residuals(n: int, i: int, j: int, k: int, generators: str):
    """Per-atom residual pieces, keyed by equation label; parity independent."""
    basis = atoms(n, i, j, k)
    shift = k + i - j
    gens = representative_generators(n) if generators == "representative" else subalgebra_generators(n)
    per_atom = []
    for a in basis:
        T = atom_operator(n, i, j, a)
        pieces = {}
        for Z in gens:
            a0, a1 = residual_split(T, Z, shift)
            if generators == "representative" or Z.kind in ("special_conformal", "rotation"):
                pieces[Z.label] = (a0.terms, a1.terms)
            elif not (a0.is_zero() and a1.is_zero()):
                raise AssertionError(f"{Z.label} row not identically satisfied by a homogeneous atom")
        per_atom.append(pieces)
    if generators == "representative":
        # translations and dilation: asserted on a sample of atoms
        probe = [translation(n, 1), dilation(n)]
        for a in basis[:: max(1, len(basis) // 7)]:
            T = atom_operator(n, i, j, a)
            for Z in probe:
                a0, a1 = residual_split(T, Z, shift)
                if not (a0.is_zero() and a1.is_zero()):
                    raise AssertionError(f"{Z.label} row not identically satisfied by a homogeneous atom")
    return basis, per_atom


def build_system(n: int, i: int, j: int, k: int, delta, eps, generators: str = "representative",
                 cap: int = DEFAULT_CAP) -> IntertwiningSystem:
    """Equations for order-k operators E^i_{lam,delta} -> E^j_{lam+k+i-j,eps}."""
    if n < 3:
        raise ValueError("dimension too small")
    if not (0 <= i <= n and 0 <= j <= n - 1):
        raise ValueError("form degree out of range")
    delta, eps = parity(delta), parity(eps)
    if k < 0:
        return IntertwiningSystem(n, i, j, k, delta, eps, [], [], [], [], generators)
    size = ansatz_dimension(n, i, j, k)
    if size > cap:
        raise ResourceCapExceeded(f"ansatz dimension {size} exceeds cap {cap}")
    basis, per_atom = _atom_residuals(n, i, j, k, generators)
    if generators == "representative":
        columns = invariant_columns(n, basis, delta, eps)
    else:
        columns = [{c: 1} for c in range(len(basis))]
    rows0: Dict[tuple, Dict[int, Rational]] = {}
    rows1: Dict[tuple, Dict[int, Rational]] = {}
    for cidx, col in enumerate(columns):
        for a, s in col.items():
            for label, (t0, t1) in per_atom[a].items():
                for store, terms in ((rows0, t0), (rows1, t1)):
                    for key, v in terms.items():
                        row = store.setdefault((label, key), {})
                        row[cidx] = row.get(cidx, 0) + s * v
                        if not row[cidx]:
                            del row[cidx]
    if generators != "representative":
        # reflection equations on raw atoms: conj(T) - T = 0
        for s_gen in reflections(n):
            h = s_gen.linear
            for cidx, a in enumerate(basis):
                sgn, a2 = _conj_atom(h, a, n, delta, eps)
                if a2 == a and sgn == 1:
                    continue
                key = (s_gen.label, a2)
                row = rows0.setdefault(key, {})
                c2 = basis.index(a2) if a2 != a else cidx
                row[c2] = row.get(c2, 0) - 1
                row[cidx] = row.get(cidx, 0) + sgn
                rows0[key] = {c: v for c, v in row.items() if v}
    keys = sorted(set(rows0) | set(rows1), key=repr)
    r0 = [rows0.get(key, {}) for key in keys]
    r1 = [rows1.get(key, {}) for key in keys]
    return IntertwiningSystem(n, i, j, k, delta, eps, basis, columns, r0, r1, generators)


def solve(n: int, i: int, j: int, k: int, lam, delta, eps, generators: str = "representative",
          cap: int = DEFAULT_CAP) -> Solution:
    return build_system(n, i, j, k, delta, eps, generators, cap).solve(lam)


def membership(op: SboOperator, sol: Solution) -> bool:
    """True when op lies in the span of the solution basis (exact linear solve)."""
    keys = sorted(set(op.op.terms).union(*(b.op.terms for b in sol.basis)), key=repr)
    rows = [{c: b.op.terms.get(key, 0) for c, b in enumerate(sol.basis)} for key in keys]
    m = len(sol.basis)
    for r, key in zip(rows, keys):
        r[m] = -op.op.terms.get(key, 0)
    kern = nullspace([{c: v for c, v in r.items() if v} for r in rows], m + 1)
    return any(v.get(m, 0) != 0 for v in kern)


# ---------------------------------------------------------------------------
# sweeps and cache


def convention_hash() -> str:
    data = json.dumps({"action": "L_Z + lam*rho", "codiff_sign": CODIFF_SIGN, "order": "nu-lam+j-i",
                       "columns": "signed-permutation invariants"}, sort_keys=True)
    return hashlib.sha256(data.encode()).hexdigest()[:16]


def basis_hash(sol: Solution) -> str:
    data = json.dumps([b.to_dict()["terms"] for b in sol.basis])
    return hashlib.sha256(data.encode()).hexdigest()[:16]


class ResultCache:
    """JSON file keyed by (n,i,j,k,lam,delta,eps); invalidated when conventions change."""

    def __init__(self, path: Optional[os.PathLike] = None):
        if path is None:
            root = os.environ.get("SBOFORMS_CACHE_DIR")
            path = Path(root) / "dimensions.json" if root else None
        self.path = Path(path) if path else None
        self.data: Dict[str, dict] = {}
        if self.path and self.path.exists():
            blob = json.loads(self.path.read_text())
            if blob.get("conventions") == convention_hash():
                self.data = blob.get("entries", {})

    @staticmethod
    def key(n, i, j, k, lam, delta, eps) -> str:
        return f"{n},{i},{j},{k},{fmt_rat(rat(lam))},{parity(delta)},{parity(eps)}"

    def get(self, *args) -> Optional[dict]:
        return self.data.get(self.key(*args))

    def put(self, entry: dict, *args) -> None:
        self.data[self.key(*args)] = entry

    def save(self) -> None:
        if not self.path:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"schema": 1, "conventions": convention_hash(),
                                   "entries": dict(sorted(self.data.items()))}, indent=1))
        tmp.replace(self.path)


@dataclass
class TableEntry:
    n: int
    i: int
    j: int
    k: int
    lam: Rational
    delta: int
    eps: int
    dimension: Optional[int]  # None when skipped
    status: str = "ok"  # ok | skipped
    basis_hash: str = ""

    @property
    def nu(self) -> Rational:
        return rat(self.lam + self.k + self.i - self.j)

    def to_dict(self) -> dict:
        return {"n": self.n, "i": self.i, "j": self.j, "k": self.k, "lambda": fmt_rat(self.lam),
                "nu": fmt_rat(self.nu), "delta": "-" if self.delta else "+", "epsilon": "-" if self.eps else "+",
                "dimension": self.dimension, "status": self.status, "basis_hash": self.basis_hash}


def dimension_table(n: int, k_max: int, lam_samples: Sequence, cap: int = DEFAULT_CAP,
                    ij: Optional[Iterable[Tuple[int, int]]] = None, cache: Optional[ResultCache] = None,
                    parities: Optional[Iterable[Tuple[int, int]]] = None) -> List[TableEntry]:
    """Dimensions over (i, j, k, lam, delta, eps) for fixed n; oversized ansatz spaces are marked skipped."""
    if n > 5 or k_max > 4:
        raise ValueError("sweep limited to n <= 5, k <= 4")
    pairs = list(ij) if ij is not None else [(i, j) for i in range(n + 1) for j in range(n)]
    pars = list(parities) if parities is not None else [(0, 0), (0, 1), (1, 0), (1, 1)]
    lams = [rat(x) for x in lam_samples]
    out = []
    for i, j in pairs:
        for k in range(k_max + 1):
            if ansatz_dimension(n, i, j, k) > cap:
                for lam in lams:
                    for d, e in pars:
                        out.append(TableEntry(n, i, j, k, lam, d, e, None, "skipped"))
                continue
            for d, e in pars:
                system = None
                for lam in lams:
                    hit = cache.get(n, i, j, k, lam, d, e) if cache else None
                    if hit is not None:
                        out.append(TableEntry(n, i, j, k, lam, d, e, hit["dimension"], "ok", hit["basis_hash"]))
                        continue
                    if system is None:
                        system = build_system(n, i, j, k, d, e, cap=cap)
                    sol = system.solve(lam)
                    h = basis_hash(sol)
                    out.append(TableEntry(n, i, j, k, lam, d, e, sol.dimension, "ok", h))
                    if cache:
                        cache.put({"dimension": sol.dimension, "basis_hash": h}, n, i, j, k, lam, d, e)
    if cache:
        cache.save()
    return out
