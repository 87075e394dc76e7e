"""Exterior calculus on polynomial forms, and polynomial-coefficient operators.

Two layers live here.  The first acts on concrete ``PolyForm`` values
(``d``, ``codifferential``, ``lie_derivative``, ``restrict``).  The second,
``FormOperator``, represents an operator

    alpha  |->  [Rest]  sum  c * x^q * d^g(alpha_I)  dx_J

in normal order (coefficients left of derivatives).  Composition uses the
Leibniz rule, so intertwining residuals can be formed exactly as operators
instead of being sampled on test forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .algebra import (
    Exponent,
    MultiIndex,
    Poly,
    PolyForm,
    Rational,
    _clean,
    falling,
    hodge_sign,
    insert_sign,
    interior,
    multi_indices,
    rat,
    remove_sign,
    sort_sign,
)

# codifferential sign: d* = CODIFF_SIGN * sum_a iota_a d_a.  Pinned by the
# covariance run of the i -> i operators (see tests/test_acceptance.py).
CODIFF_SIGN = -1


@dataclass(frozen=True)
class PolyVectorField:
    m: int
    components: Tuple[Poly, ...]

    def __post_init__(self):
        if len(self.components) != self.m:
            raise ValueError("component count must equal the ambient dimension")
        if any(p.m != self.m for p in self.components):
            raise ValueError("ambient mismatch")

    def __call__(self, f: Poly) -> Poly:
        out = Poly(self.m)
        for a, za in enumerate(self.components, start=1):
            if za.terms:
                out = out + za * f.diff(a)
        return out

    def bracket(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(
            self.m,
            tuple(self(other.components[b]) - other(self.components[b]) for b in range(self.m)),
        )

    def scale(self, c: Rational) -> "PolyVectorField":
        return PolyVectorField(self.m, tuple(p * c for p in self.components))

    def __add__(self, other):
        return PolyVectorField(self.m, tuple(p + q for p, q in zip(self.components, other.components)))

    def __sub__(self, other):
        return PolyVectorField(self.m, tuple(p - q for p, q in zip(self.components, other.components)))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)


# ---------------------------------------------------------------------------
# operations on forms


def d(alpha: PolyForm) -> PolyForm:
    m = alpha.m
    if alpha.deg >= m:
        return PolyForm.zero(m, alpha.deg)
    out: Dict = {}
    for (I, e), c in alpha.terms.items():
        for a in range(1, m + 1):
            p = e[a - 1]
            if not p:
                continue
            s, J = insert_sign(a, I)
            if s:
                key = (J, e[:a - 1] + (p - 1,) + e[a:])
                out[key] = out.get(key, 0) + s * p * c
    return PolyForm(m, alpha.deg + 1, out)


def codifferential(alpha: PolyForm, sign_convention: int | None = None) -> PolyForm:
    """Flat codifferential ``sign * sum_a iota_a(d_a alpha)``."""
    s = CODIFF_SIGN if sign_convention is None else sign_convention
    if s not in (1, -1):
        raise ValueError("sign convention must be +1 or -1")
    if alpha.deg == 0:
        return PolyForm.zero(alpha.m, 0)
    out = PolyForm.zero(alpha.m, alpha.deg - 1)
    for a in range(1, alpha.m + 1):
        out = out + interior(a, alpha.diff(a))
    return out.scale(s)


def interior_field(Z: PolyVectorField, alpha: PolyForm) -> PolyForm:
    if Z.m != alpha.m:
        raise ValueError("ambient mismatch")
    if alpha.deg == 0:
        return PolyForm.zero(alpha.m, 0)
    out = PolyForm.zero(alpha.m, alpha.deg - 1)
    for a, za in enumerate(Z.components, start=1):
        if za.terms:
            out = out + interior(a, alpha).mul_poly(za)
    return out


def _lie_cartan(Z: PolyVectorField, alpha: PolyForm) -> PolyForm:
    out = interior_field(Z, d(alpha)) if alpha.deg < alpha.m else PolyForm.zero(alpha.m, alpha.deg)
    if alpha.deg > 0:
        out = out + d(interior_field(Z, alpha))
    return out


def _lie_transport(Z: PolyVectorField, alpha: PolyForm) -> PolyForm:
    # component formula: Z(f) dx_I + f * sum over slots of dx_..^ d(Z^b) ^..
    m = alpha.m
    out: Dict = {}

    def add(key, c):
        out[key] = out.get(key, 0) + c

    grads = [[Z.components[b].diff(c) for c in range(1, m + 1)] for b in range(m)]
    for (I, e), c0 in alpha.terms.items():
        for a in range(1, m + 1):
            p = e[a - 1]
            if not p:
                continue
            de = e[:a - 1] + (p - 1,) + e[a:]
            for ez, cz in Z.components[a - 1].terms.items():
                add((I, tuple(x + y for x, y in zip(de, ez))), c0 * p * cz)
        for slot, b in enumerate(I):
            for cdx in range(1, m + 1):
                g = grads[b - 1][cdx - 1]
                if not g.terms:
                    continue
                s, J = sort_sign(I[:slot] + (cdx,) + I[slot + 1:])
                if not s:
                    continue
                for eg, cg in g.terms.items():
                    add((J, tuple(x + y for x, y in zip(e, eg))), s * c0 * cg)
    return PolyForm(m, alpha.deg, out)


def lie_derivative(Z: PolyVectorField, alpha: PolyForm, method: str = "cartan") -> PolyForm:
    if Z.m != alpha.m:
        raise ValueError("ambient mismatch")
    if method == "cartan":
        return _lie_cartan(Z, alpha)
    if method == "transport":
        return _lie_transport(Z, alpha)
    raise ValueError(f"unknown method {method!r}")


def restrict(alpha: PolyForm) -> PolyForm:
    """Pullback to the hyperplane x_m = 0, as a form on R^{m-1}."""
    m = alpha.m
    if m < 1:
        raise ValueError("cannot restrict a form on R^0")
    if alpha.deg > m - 1:
        return PolyForm.zero(m - 1, m - 1)
    out = {}
    for (I, e), c in alpha.terms.items():
        if e[-1] == 0 and (not I or I[-1] != m):
            out[(I, e[:-1])] = c
    return PolyForm(m - 1, alpha.deg, out)


# ---------------------------------------------------------------------------
# normal-ordered operators


Key = Tuple[MultiIndex, MultiIndex, Exponent, Exponent]  # (I, J, coeff monomial q, derivative g)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _sub_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def _sub_exponents(bound_a: Exponent, bound_b: Exponent) -> Iterable[Tuple[Exponent, int]]:
    """Pairs (eta, weight) with eta <= both bounds; weight = binom(a, eta) * b!/(b-eta)!."""
    ranges = [range(min(x, y) + 1) for x, y in zip(bound_a, bound_b)]
    out = [((), 1)]
    for r, x, y in zip(ranges, bound_a, bound_b):
        new = []
        for eta, w in out:
            for t in r:
                # binom(x, t) * y!/(y-t)!
                new.append((eta + (t,), w * _binom(x, t) * falling(y, t)))
        out = new
    return out


def _binom(x: int, t: int) -> int:
    return falling(x, t) // falling(t, t)


class FormOperator:
    """Polynomial-coefficient differential operator from p-forms to q-forms on R^n.

    With ``restricted=True`` the output is pulled back to x_n = 0: keys never
    carry n in J and coefficient monomials have zero x_n-power, and ``apply``
    returns forms on R^{n-1}.
    """

    __slots__ = ("n", "src", "dst", "restricted", "terms")

    def __init__(self, n: int, src: int, dst: int, terms: Dict[Key, Rational] | None = None, restricted: bool = False):
        self.n = n
        self.src = src
        self.dst = dst
        self.restricted = restricted
        t = _clean(terms) if terms else {}
        if restricted:
            t = {k: c for k, c in t.items() if k[2][-1] == 0 and (not k[1] or k[1][-1] != n)}
        self.terms: Dict[Key, Rational] = t

    # -- constructors ----------------------------------------------------
    @classmethod
    def identity(cls, n: int, p: int) -> "FormOperator":
        z = (0,) * n
        return cls(n, p, p, {(I, I, z, z): 1 for I in multi_indices(n, p)})

    @classmethod
    def partial(cls, n: int, p: int, deriv: Exponent, c: Rational = 1) -> "FormOperator":
        z = (0,) * n
        return cls(n, p, p, {(I, I, z, tuple(deriv)): c for I in multi_indices(n, p)})

    @classmethod
    def exterior_d(cls, n: int, p: int) -> "FormOperator":
        z = (0,) * n
        terms = {}
        for I in multi_indices(n, p):
            for a in range(1, n + 1):
                s, J = insert_sign(a, I)
                if s:
                    g = tuple(1 if b == a else 0 for b in range(1, n + 1))
                    terms[(I, J, z, g)] = s
        return cls(n, p, p + 1, terms)

    @classmethod
    def contraction(cls, n: int, p: int, axis: int) -> "FormOperator":
        z = (0,) * n
        terms = {}
        for I in multi_indices(n, p):
            s, J = remove_sign(axis, I)
            if s:
                terms[(I, J, z, z)] = s
        return cls(n, p, p - 1, terms)

    @classmethod
    def codiff(cls, n: int, p: int, sign_convention: int | None = None) -> "FormOperator":
        s = CODIFF_SIGN if sign_convention is None else sign_convention
        out = cls(n, p, max(p - 1, 0))
        if p == 0:
            return out
        for a in range(1, n + 1):
            g = tuple(1 if b == a else 0 for b in range(1, n + 1))
            out = out + cls.contraction(n, p, a) @ cls.partial(n, p, g)
        return out.scale(s)

    @classmethod
    def star(cls, n: int, p: int, orientation: int = 1) -> "FormOperator":
        z = (0,) * n
        terms = {}
        for I in multi_indices(n, p):
            s, Ic = hodge_sign(I, n)
            terms[(I, Ic, z, z)] = s * orientation
        return cls(n, p, n - p, terms)

    @classmethod
    def multiplication(cls, n: int, p: int, f: Poly) -> "FormOperator":
        z = (0,) * n
        return cls(n, p, p, {(I, I, e, z): c for I in multi_indices(n, p) for e, c in f.terms.items()})

    @classmethod
    def lie(cls, Z: PolyVectorField, p: int) -> "FormOperator":
        """L_Z on p-forms in normal order (transport formula)."""
        n = Z.m
        z = (0,) * n
        terms: Dict[Key, Rational] = {}

        def add(key, c):
            terms[key] = terms.get(key, 0) + c

        for I in multi_indices(n, p):
            for a in range(1, n + 1):
                g = tuple(1 if b == a else 0 for b in range(1, n + 1))
                for e, c in Z.components[a - 1].terms.items():
                    add((I, I, e, g), c)
            for slot, b in enumerate(I):
                for cdx in range(1, n + 1):
                    grad = Z.components[b - 1].diff(cdx)
                    if not grad.terms:
                        continue
                    s, J = sort_sign(I[:slot] + (cdx,) + I[slot + 1:])
                    if s:
                        for e, c in grad.terms.items():
                            add((I, J, e, z), s * c)
        return cls(n, p, p, terms)

    # -- algebra ---------------------------------------------------------
    def _like(self, terms, restricted=None, src=None, dst=None) -> "FormOperator":
        return FormOperator(
            self.n,
            self.src if src is None else src,
            self.dst if dst is None else dst,
            terms,
            self.restricted if restricted is None else restricted,
        )

    def _check(self, other: "FormOperator"):
        if (self.n, self.src, self.dst, self.restricted) != (other.n, other.src, other.dst, other.restricted):
            raise ValueError("operator shape mismatch")

    def __add__(self, other: "FormOperator") -> "FormOperator":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._like(out)

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Rational) -> "FormOperator":
        c = rat(c)
        return self._like({k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FormOperator):
            return NotImplemented
        return (self.n, self.src, self.dst, self.restricted, self.terms) == (
            other.n, other.src, other.dst, other.restricted, other.terms)

    def __hash__(self):
        return hash((self.n, self.src, self.dst, self.restricted, frozenset(self.terms.items())))

    def __repr__(self):
        r = ", restricted" if self.restricted else ""
        return f"FormOperator(n={self.n}, {self.src}->{self.dst}{r}, {len(self.terms)} terms)"

    def restrict(self) -> "FormOperator":
        return self._like(self.terms, restricted=True)

    def is_constant(self) -> bool:
        return all(not any(q) for (_, _, q, _) in self.terms)

    def order(self) -> int:
        return max((sum(g) for (_, _, _, g) in self.terms), default=-1)

    def __matmul__(self, other: "FormOperator") -> "FormOperator":
        """Composition ``self o other``."""
        if self.n != other.n:
            raise ValueError("ambient mismatch")
        if other.restricted:
            # self must be a tangential operator acting on forms over the hyperplane
            if self.restricted:
                raise ValueError("cannot compose two restricted operators")
            if not self._is_tangential():
                raise ValueError("operator after restriction must not involve x_n")
        if other.dst != self.src:
            raise ValueError("form degree mismatch in composition")
        by_src: Dict[MultiIndex, List] = {}
        for (I, J, q, g), c in self.terms.items():
            by_src.setdefault(I, []).append((J, q, g, c))
        out: Dict[Key, Rational] = {}
        restricted = self.restricted or other.restricted
        n = self.n
        for (I0, I1, q2, g2), c2 in other.terms.items():
            for J, q1, g1, c1 in by_src.get(I1, ()):
                # (x^q1 d^g1)(x^q2 d^g2) = sum_eta binom(g1,eta) q2!/(q2-eta)! x^{q1+q2-eta} d^{g1-eta+g2}
                for eta, w in _sub_exponents(g1, q2):
                    q = tuple(a + b - e for a, b, e in zip(q1, q2, eta))
                    if restricted and q[n - 1]:
                        continue
                    g = tuple(a - e + b for a, e, b in zip(g1, eta, g2))
                    key = (I0, J, q, g)
                    out[key] = out.get(key, 0) + w * c1 * c2
        return FormOperator(n, other.src, self.dst, out, restricted)

    def _is_tangential(self) -> bool:
        n = self.n
        for (I, J, q, g) in self.terms:
            if q[n - 1] or g[n - 1] or (I and I[-1] == n) or (J and J[-1] == n):
                return False
        return True

    # -- application -----------------------------------------------------
    def apply(self, alpha: PolyForm) -> PolyForm:
        n = self.n
        if alpha.m != n:
            raise ValueError("ambient mismatch")
        if alpha.deg != self.src and alpha.terms:
            raise ValueError("form degree mismatch")
        by_src: Dict[MultiIndex, List] = {}
        for (I, J, q, g), c in self.terms.items():
            by_src.setdefault(I, []).append((J, q, g, c))
        out: Dict = {}
        for (I, e), c0 in alpha.terms.items():
            for J, q, g, c in by_src.get(I, ()):
                w = 1
                for x, y in zip(e, g):
                    if y > x:
                        w = 0
                        break
                    w *= falling(x, y)
                if not w:
                    continue
                e2 = tuple(x - y + z for x, y, z in zip(e, g, q))
                key = (J, e2)
                out[key] = out.get(key, 0) + w * c * c0
        res = PolyForm(n, self.dst, out)
        return restrict(res) if self.restricted else res


def tangential_lift(op_y: FormOperator, n: int) -> FormOperator:
    """View an operator on forms over R^{n-1} as a tangential operator on R^n."""
    if op_y.n != n - 1 or op_y.restricted:
        raise ValueError("expected an unrestricted operator on R^{n-1}")
    terms = {(I, J, q + (0,), g + (0,)): c for (I, J, q, g), c in op_y.terms.items()}
    return FormOperator(n, op_y.src, op_y.dst, terms)


def drop_axis(op: FormOperator) -> Dict[Tuple[MultiIndex, MultiIndex, Exponent, Exponent], Rational]:
    """Terms of a restricted operator with the (zero) x_n-power of q removed."""
    return {(I, J, q[:-1], g): c for (I, J, q, g), c in op.terms.items()}


def operator_from_terms(n: int, src: int, dst: int, terms: Sequence[Tuple[MultiIndex, MultiIndex, Exponent, Rational]]) -> FormOperator:
    """Restricted constant-coefficient operator from (I, J, beta, coeff) tuples."""
    z = (0,) * n
    out: Dict[Key, Rational] = {}
    for I, J, beta, c in terms:
        key = (tuple(I), tuple(J), z, tuple(beta))
        out[key] = out.get(key, 0) + rat(c)
    return FormOperator(n, src, dst, out, restricted=True)
