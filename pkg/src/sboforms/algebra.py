"""Exact rationals, sparse polynomials and polynomial differential forms.

Everything here is exact.  Scalars are ``int`` or ``fractions.Fraction``;
integral fractions are collapsed to ``int`` so that the common case stays on
the fast integer path.  Axis labels are 1-based, exponent tuples are 0-based
(``exp[a - 1]`` is the power of ``x_a``).
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

Rational = Union[int, Fraction]
Exponent = Tuple[int, ...]
MultiIndex = Tuple[int, ...]


def rat(x) -> Rational:
    """Coerce ``x`` (int, Fraction, or a string like ``"-7/2"``) to a scalar."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rat(Fraction(x.strip()))
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    return rat(Fraction(x))


def fmt_rat(x: Rational) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _clean(terms: Dict) -> Dict:
    out = {}
    for key, c in terms.items():
        if c:
            if type(c) is Fraction and c.denominator == 1:
                c = c.numerator
            out[key] = c
    return out


def falling(p: int, r: int) -> int:
    """p (p-1) ... (p-r+1); zero when r > p."""
    out = 1
    for t in range(r):
        out *= p - t
    return out


def rising(mu: Rational, r: int) -> Rational:
    """Pochhammer symbol (mu)_r."""
    out: Rational = 1
    for t in range(r):
        out *= mu + t
    return rat(out)


def exponents(m: int, degree: int) -> Iterator[Exponent]:
    """All exponent tuples of length m and total degree exactly ``degree``."""
    if m == 0:
        if degree == 0:
            yield ()
        return
    if m == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in exponents(m - 1, degree - first):
            yield (first,) + rest


def multi_indices(m: int, j: int) -> list[MultiIndex]:
    return list(combinations(range(1, m + 1), j))


# ---------------------------------------------------------------------------
# multi-index sign bookkeeping


def merge_sign(I: MultiIndex, K: MultiIndex) -> Tuple[int, MultiIndex]:
    """Sign and sorted index of dx_I ^ dx_K; sign 0 if they overlap."""
    sI = set(I)
    if sI.intersection(K):
        return 0, ()
    inversions = sum(1 for a in I for b in K if a > b)
    return (-1 if inversions & 1 else 1), tuple(sorted(I + K))


def insert_sign(a: int, I: MultiIndex) -> Tuple[int, MultiIndex]:
    """dx_a ^ dx_I = sign * dx_J."""
    if a in I:
        return 0, ()
    pos = sum(1 for b in I if b < a)
    J = I[:pos] + (a,) + I[pos:]
    return (-1 if pos & 1 else 1), J


def remove_sign(a: int, I: MultiIndex) -> Tuple[int, MultiIndex]:
    """Contraction of dx_I with d/dx_a: sign * dx_{I minus a}."""
    if a not in I:
        return 0, ()
    pos = I.index(a)
    return (-1 if pos & 1 else 1), I[:pos] + I[pos + 1:]


def sort_sign(seq: Iterable[int]) -> Tuple[int, MultiIndex]:
    """Sign of the permutation sorting ``seq``; 0 when entries repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    inv = sum(1 for x in range(len(seq)) for y in range(x + 1, len(seq)) if seq[x] > seq[y])
    return (-1 if inv & 1 else 1), tuple(sorted(seq))


def complement(I: MultiIndex, m: int) -> MultiIndex:
    return tuple(a for a in range(1, m + 1) if a not in I)


# ---------------------------------------------------------------------------


class Poly:
    """Sparse polynomial in x_1..x_m with rational coefficients."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[Exponent, Rational] | None = None):
        self.m = m
        self.terms: Dict[Exponent, Rational] = _clean(dict(terms)) if terms else {}

    @classmethod
    def const(cls, m: int, c: Rational) -> "Poly":
        return cls(m, {(0,) * m: rat(c)})

    @classmethod
    def var(cls, m: int, a: int, power: int = 1) -> "Poly":
        e = [0] * m
        e[a - 1] = power
        return cls(m, {tuple(e): 1})

    @classmethod
    def monomial(cls, exp: Exponent, c: Rational = 1) -> "Poly":
        return cls(len(exp), {tuple(exp): rat(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def _check(self, other: "Poly"):
        if self.m != other.m:
            raise ValueError("ambient mismatch")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.m, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.m, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = rat(other)
            return Poly(self.m, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: Dict[Exponent, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.m, out)

    __rmul__ = __mul__

    def __pow__(self, r: int):
        out = Poly.const(self.m, 1)
        for _ in range(r):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.m == other.m and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.m, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def diff(self, a: int, r: int = 1) -> "Poly":
        out = {}
        k = a - 1
        for e, c in self.terms.items():
            if e[k] >= r:
                e2 = e[:k] + (e[k] - r,) + e[k + 1:]
                out[e2] = c * falling(e[k], r)
        return Poly(self.m, out)

    def drop_last(self) -> "Poly":
        """Substitute x_m = 0 and regard the result as a polynomial in m-1 variables."""
        return Poly(self.m - 1, {e[:-1]: c for e, c in self.terms.items() if e[-1] == 0})

    def extend(self, m: int) -> "Poly":
        """Regard as a polynomial in m >= self.m variables."""
        pad = (0,) * (m - self.m)
        return Poly(m, {e + pad: c for e, c in self.terms.items()})

    def evaluate(self, point) -> Rational:
        total: Rational = 0
        for e, c in self.terms.items():
            v = c
            for x, p in zip(point, e):
                if p:
                    v *= rat(x) ** p
            total += v
        return rat(total)

    def divisible_by_var(self, a: int) -> bool:
        return all(e[a - 1] > 0 for e in self.terms)

    def __repr__(self):
        return f"Poly({self.m}, {self.terms!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_rat(c)}*x^{e}" for e, c in sorted(self.terms.items()))


# ---------------------------------------------------------------------------
# univariate helpers (used for the symbolic-parameter Gegenbauer families)


def upoly_divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if a.m != 1 or b.m != 1:
        raise ValueError("univariate polynomials required")
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.degree()
    lead = Fraction(b.terms[(db,)])
    q: Dict[Exponent, Rational] = {}
    r = a
    while not r.is_zero() and r.degree() >= db:
        dr = r.degree()
        c = rat(Fraction(r.terms[(dr,)]) / lead)
        q[(dr - db,)] = c
        r = r - Poly(1, {(dr - db,): c}) * b
    return Poly(1, q), r


def upoly_monic(a: Poly) -> Poly:
    if a.is_zero():
        return a
    return a * rat(1 / Fraction(a.terms[(a.degree(),)]))


def upoly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both inputs vanish)."""
    while not b.is_zero():
        _, r = upoly_divmod(a, b)
        a, b = b, r
    return upoly_monic(a)


# ---------------------------------------------------------------------------


class PolyForm:
    """A polynomial differential form of fixed degree on R^m.

    Stored flat as ``{(I, exp): coeff}``; ``components()`` gives the
    per-basis-element polynomials.
    """

    __slots__ = ("m", "deg", "terms")

    def __init__(self, m: int, deg: int, terms: Mapping[Tuple[MultiIndex, Exponent], Rational] | None = None):
        if not 0 <= deg:
            raise ValueError("negative form degree")
        self.m = m
        self.deg = deg
        self.terms: Dict[Tuple[MultiIndex, Exponent], Rational] = _clean(dict(terms)) if terms else {}

    @classmethod
    def zero(cls, m: int, deg: int) -> "PolyForm":
        return cls(m, deg)

    @classmethod
    def basis(cls, m: int, I: Iterable[int], exp: Exponent | None = None, c: Rational = 1) -> "PolyForm":
        """The form c * x^exp dx_I (``I`` must be strictly increasing)."""
        I = tuple(I)
        if list(I) != sorted(set(I)) or any(not 1 <= a <= m for a in I):
            raise ValueError(f"bad multi-index {I} for dimension {m}")
        exp = (0,) * m if exp is None else tuple(exp)
        return cls(m, len(I), {(I, exp): rat(c)})

    @classmethod
    def from_components(cls, m: int, deg: int, comps: Mapping[MultiIndex, Poly]) -> "PolyForm":
        terms = {}
        for I, p in comps.items():
            if len(I) != deg:
                raise ValueError("component degree mismatch")
            for e, c in p.terms.items():
                terms[(tuple(I), e)] = c
        return cls(m, deg, terms)

    @classmethod
    def function(cls, p: Poly) -> "PolyForm":
        return cls.from_components(p.m, 0, {(): p})

    def components(self) -> Dict[MultiIndex, Poly]:
        grouped: Dict[MultiIndex, Dict[Exponent, Rational]] = {}
        for (I, e), c in self.terms.items():
            grouped.setdefault(I, {})[e] = c
        return {I: Poly(self.m, t) for I, t in sorted(grouped.items())}

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "PolyForm"):
        if self.m != other.m:
            raise ValueError("ambient mismatch")
        if self.deg != other.deg:
            raise ValueError("form degree mismatch")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolyForm(self.m, self.deg, out)

    def __neg__(self):
        return PolyForm(self.m, self.deg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Rational) -> "PolyForm":
        c = rat(c)
        return PolyForm(self.m, self.deg, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            return self.mul_poly(other)
        return self.scale(other)

    __rmul__ = __mul__

    def mul_poly(self, p: Poly) -> "PolyForm":
        if p.m != self.m:
            raise ValueError("ambient mismatch")
        out: Dict = {}
        for (I, e1), c1 in self.terms.items():
            for e2, c2 in p.terms.items():
                k = (I, tuple(a + b for a, b in zip(e1, e2)))
                out[k] = out.get(k, 0) + c1 * c2
        return PolyForm(self.m, self.deg, out)

    def diff(self, a: int) -> "PolyForm":
        """Coefficient-wise partial derivative d/dx_a."""
        out = {}
        k = a - 1
        for (I, e), c in self.terms.items():
            if e[k]:
                out[(I, e[:k] + (e[k] - 1,) + e[k + 1:])] = c * e[k]
        return PolyForm(self.m, self.deg, out)

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.m != other.m:
            return False
        if self.terms or other.terms:
            return self.deg == other.deg and self.terms == other.terms
        return True

    def __hash__(self):
        return hash((self.m, self.deg, frozenset(self.terms.items())))

    def __repr__(self):
        return f"PolyForm(m={self.m}, deg={self.deg}, {self.dump()!r})"

    def dump(self) -> str:
        """Text dump: one ``coeff * x^alpha  dx_{I}`` line per term, sorted."""
        if not self.terms:
            return "0"
        lines = []
        for (I, e), c in sorted(self.terms.items()):
            idx = ",".join(map(str, I))
            lines.append(f"{fmt_rat(c)} * x^({','.join(map(str, e))})  dx_{{{idx}}}")
        return "\n".join(lines)


def wedge(alpha: PolyForm, beta: PolyForm) -> PolyForm:
    if alpha.m != beta.m:
        raise ValueError("ambient mismatch")
    m = alpha.m
    deg = alpha.deg + beta.deg
    if deg > m:
        raise ValueError(f"form degree {deg} exceeds ambient dimension {m}")
    out: Dict = {}
    for (I, e1), c1 in alpha.terms.items():
        for (K, e2), c2 in beta.terms.items():
            s, J = merge_sign(I, K)
            if s:
                key = (J, tuple(a + b for a, b in zip(e1, e2)))
                out[key] = out.get(key, 0) + s * c1 * c2
    return PolyForm(m, deg, out)


def interior(a: int, alpha: PolyForm) -> PolyForm:
    """Contraction with the coordinate field d/dx_a."""
    if not 1 <= a <= alpha.m:
        raise ValueError(f"axis {a} out of range 1..{alpha.m}")
    if alpha.deg == 0:
        return PolyForm.zero(alpha.m, 0)
    out: Dict = {}
    for (I, e), c in alpha.terms.items():
        s, J = remove_sign(a, I)
        if s:
            out[(J, e)] = out.get((J, e), 0) + s * c
    return PolyForm(alpha.m, alpha.deg - 1, out)


def hodge_sign(I: MultiIndex, m: int) -> Tuple[int, MultiIndex]:
    """*(dx_I) = sign * dx_{I^c} for the Euclidean metric, orientation dx_1^...^dx_m."""
    Ic = complement(I, m)
    s, _ = sort_sign(I + Ic)
    return s, Ic


def hodge_star(alpha: PolyForm, orientation: int = 1) -> PolyForm:
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    out = {}
    for (I, e), c in alpha.terms.items():
        s, Ic = hodge_sign(I, alpha.m)
        out[(Ic, e)] = s * orientation * c
    return PolyForm(alpha.m, alpha.m - alpha.deg, out)


def monomial_forms(m: int, j: int, max_degree: int, min_degree: int = 0) -> Iterator[PolyForm]:
    """All forms x^p dx_I with deg I = j and min_degree <= |p| <= max_degree."""
    for d in range(min_degree, max_degree + 1):
        for e in exponents(m, d):
            for I in combinations(range(1, m + 1), j):
                yield PolyForm(m, j, {(I, e): 1})


def multinomial(e: Exponent) -> int:
    out = math.factorial(sum(e))
    for p in e:
        out //= math.factorial(p)
    return out
