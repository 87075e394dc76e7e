"""Conformal symmetries of the pair (R^n, R^{n-1}) and their action on forms.

Infinitesimally a conformal field Z with L_Z g = 2 rho g acts on weight-lambda
forms by ``L_Z + lambda * rho``.  Finite symmetries used here are signed
permutations of the coordinates fixing the x_n-axis up to sign; they are
isometries, so only the orientation character survives:
``alpha |-> or(h)^delta (h^{-1})^* alpha``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .algebra import Exponent, MultiIndex, Poly, PolyForm, Rational, rat, sort_sign
from .calculus import FormOperator, PolyVectorField, lie_derivative


@dataclass(frozen=True)
class SignedPermutation:
    """Linear map h with h(e_a) = signs[a-1] * e_{perm[a-1]}."""

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(1, n + 1)), (1,) * n)

    @classmethod
    def flip(cls, n: int, axis: int) -> "SignedPermutation":
        return cls(tuple(range(1, n + 1)), tuple(-1 if a == axis else 1 for a in range(1, n + 1)))

    @classmethod
    def swap(cls, n: int, a: int, b: int) -> "SignedPermutation":
        perm = list(range(1, n + 1))
        perm[a - 1], perm[b - 1] = b, a
        return cls(tuple(perm), (1,) * n)

    def det(self) -> int:
        s, _ = sort_sign(self.perm)
        for x in self.signs:
            s *= x
        return s

    def inverse(self) -> "SignedPermutation":
        perm = [0] * self.n
        signs = [0] * self.n
        for a, (b, s) in enumerate(zip(self.perm, self.signs), start=1):
            perm[b - 1] = a
            signs[b - 1] = s
        return SignedPermutation(tuple(perm), tuple(signs))

    def preserves_hyperplane(self) -> bool:
        return self.perm[-1] == self.n

    def on_hyperplane(self) -> "SignedPermutation":
        if not self.preserves_hyperplane():
            raise ValueError("map does not preserve x_n = 0")
        return SignedPermutation(self.perm[:-1], self.signs[:-1])

    def pullback_term(self, exp: Exponent, I: MultiIndex) -> Tuple[int, Exponent, MultiIndex]:
        """h^*(x^exp dx_I) = sign * x^exp' dx_I'."""
        # h^* x_b = s_a x_a where perm[a] = b
        inv = self.inverse()
        sign = 1
        new = [0] * self.n
        for b, p in enumerate(exp, start=1):
            if p:
                a = inv.perm[b - 1]
                if self.signs[a - 1] < 0 and p & 1:
                    sign = -sign
                new[a - 1] = p
        seq = []
        for b in I:
            a = inv.perm[b - 1]
            sign *= self.signs[a - 1]
            seq.append(a)
        s, J = sort_sign(seq)
        return sign * s, tuple(new), J

    def pullback(self, alpha: PolyForm) -> PolyForm:
        if alpha.m != self.n:
            raise ValueError("ambient mismatch")
        out = {}
        for (I, e), c in alpha.terms.items():
            s, e2, J = self.pullback_term(e, I)
            out[(J, e2)] = out.get((J, e2), 0) + s * c
        return PolyForm(alpha.m, alpha.deg, out)


@dataclass(frozen=True)
class ConfGenerator:
    """A conformal Killing field with its conformal factor, or a finite symmetry."""

    kind: str  # translation | rotation | dilation | special_conformal | reflection
    label: str
    n: int
    field: Optional[PolyVectorField] = None
    rho: Optional[Poly] = None
    linear: Optional[SignedPermutation] = None
    or_X: int = 1
    or_Y: int = 1

    @property
    def infinitesimal(self) -> bool:
        return self.kind != "reflection"

    def restricted(self) -> "ConfGenerator":
        """The induced symmetry of the hyperplane x_n = 0."""
        if self.infinitesimal:
            comps = tuple(p.drop_last() for p in self.field.components[:-1])
            return ConfGenerator(
                self.kind, self.label + "|Y", self.n - 1,
                field=PolyVectorField(self.n - 1, comps), rho=self.rho.drop_last(),
            )
        h = self.linear.on_hyperplane()
        return ConfGenerator("reflection", self.label + "|Y", self.n - 1, linear=h, or_X=self.or_Y, or_Y=self.or_Y)


def _coord_field(n: int, comps: Dict[int, Poly]) -> PolyVectorField:
    return PolyVectorField(n, tuple(comps.get(a, Poly(n)) for a in range(1, n + 1)))


def translation(n: int, a: int) -> ConfGenerator:
    return ConfGenerator("translation", f"P{a}", n, _coord_field(n, {a: Poly.const(n, 1)}), Poly(n))


def rotation(n: int, a: int, b: int) -> ConfGenerator:
    x = lambda c: Poly.var(n, c)  # noqa: E731
    return ConfGenerator("rotation", f"M{a}{b}", n, _coord_field(n, {b: x(a), a: -x(b)}), Poly(n))


def dilation(n: int) -> ConfGenerator:
    return ConfGenerator(
        "dilation", "E", n, _coord_field(n, {c: Poly.var(n, c) for c in range(1, n + 1)}), Poly.const(n, 1)
    )


def special_conformal(n: int, a: int) -> ConfGenerator:
    """K_a = |x|^2 d_a - 2 x_a E, conformal factor -2 x_a."""
    r2 = Poly(n, {tuple(2 if b == c else 0 for b in range(n)): 1 for c in range(n)})
    xa = Poly.var(n, a)
    comps = {c: (-2 * xa * Poly.var(n, c)) for c in range(1, n + 1)}
    comps[a] = comps[a] + r2
    return ConfGenerator("special_conformal", f"K{a}", n, _coord_field(n, comps), -2 * xa)


def subalgebra_generators(n: int) -> List[ConfGenerator]:
    """Basis of the conformal fields on R^n tangent to x_n = 0 (dimension n(n+1)/2)."""
    if n < 3:
        raise ValueError("dimension too small")
    gens = [translation(n, a) for a in range(1, n)]
    gens += [rotation(n, a, b) for a, b in combinations(range(1, n), 2)]
    gens.append(dilation(n))
    gens += [special_conformal(n, a) for a in range(1, n)]
    return gens


def reflection(n: int, axis: int) -> ConfGenerator:
    h = SignedPermutation.flip(n, axis)
    or_y = h.on_hyperplane().det() if n > 1 else 1
    return ConfGenerator("reflection", f"sigma{axis}", n, linear=h, or_X=h.det(), or_Y=or_y)


def reflections(n: int) -> Tuple[ConfGenerator, ConfGenerator]:
    """(sigma_1, sigma_n): x_1 -> -x_1 and x_n -> -x_n."""
    if n < 2:
        raise ValueError("dimension too small")
    return reflection(n, 1), reflection(n, n)


def metric_residual(Z: ConfGenerator) -> Dict[Tuple[int, int], Poly]:
    """Entries of L_Z g - 2 rho g (all zero for a conformal field)."""
    n = Z.n
    out = {}
    for b in range(1, n + 1):
        for c in range(b, n + 1):
            v = Z.field.components[c - 1].diff(b) + Z.field.components[b - 1].diff(c)
            if b == c:
                v = v - 2 * Z.rho
            out[(b, c)] = v
    return out


# ---------------------------------------------------------------------------
# actions


def infinitesimal_action(Z: ConfGenerator, lam, alpha: PolyForm, method: str = "transport") -> PolyForm:
    """L_Z alpha + lam * rho_Z * alpha."""
    if not Z.infinitesimal:
        raise ValueError("use finite_action")
    out = lie_derivative(Z.field, alpha, method=method)
    lam = rat(lam)
    if lam and Z.rho.terms:
        out = out + alpha.mul_poly(Z.rho).scale(lam)
    return out


def finite_action(sigma: ConfGenerator | SignedPermutation, lam, delta: int, alpha: PolyForm, orientation: int | None = None) -> PolyForm:
    """or^delta * (pullback along sigma^{-1}); lam is inert for isometries."""
    if isinstance(sigma, ConfGenerator):
        if sigma.infinitesimal:
            raise ValueError("finite_action needs a reflection")
        h, orient = sigma.linear, sigma.or_X if orientation is None else orientation
    else:
        h, orient = sigma, sigma.det() if orientation is None else orientation
    out = h.inverse().pullback(alpha)
    if orient < 0 and delta % 2:
        out = -out
    return out


def action_operator(Z: ConfGenerator, p: int, lam) -> FormOperator:
    """dpi_lam(Z) on p-forms as a normal-ordered operator."""
    op = FormOperator.lie(Z.field, p)
    lam = rat(lam)
    if lam and Z.rho.terms:
        op = op + FormOperator.multiplication(Z.n, p, Z.rho).scale(lam)
    return op


def conjugate_restricted(op: FormOperator, h: SignedPermutation, or_x: int, or_y: int, delta: int, eps: int) -> FormOperator:
    """pi_Y(h|Y) o op o pi_X(h)^{-1} for a restricted operator and a hyperplane-preserving h."""
    hinv = h.inverse()
    hy = h.on_hyperplane()
    hyinv = hy.inverse()
    sx = or_x if delta % 2 else 1
    sy = or_y if eps % 2 else 1
    n = op.n
    out = {}
    for (I, J, q, g), c in op.terms.items():
        # pi_X(h) (x^g dx_I) = s1 x^g' dx_I'
        s1, g2, I2 = hinv.pullback_term(g, I)
        # pi_Y(h|Y) (y^q dy_J) = s2 y^q' dy_J'
        s2, q2, J2 = hyinv.pullback_term(q[:-1], J)
        key = (I2, J2, q2 + (0,), g2)
        out[key] = out.get(key, 0) + c * s1 * s2 * sx * sy
    return FormOperator(n, op.src, op.dst, out, restricted=True)


def combination(field: PolyVectorField, gens: List[ConfGenerator]) -> Optional[Dict[str, Rational]]:
    """Coefficients expressing ``field`` in the span of ``gens``, or None."""
    from .solver import nullspace  # local import: solver depends on this module

    keys = set()
    for Z in list(gens):
        for a, p in enumerate(Z.field.components):
            keys.update((a, e) for e in p.terms)
    for a, p in enumerate(field.components):
        keys.update((a, e) for e in p.terms)
    m = len(gens)
    rows = []
    for a, e in sorted(keys):
        row = {c: Z.field.components[a].terms.get(e, 0) for c, Z in enumerate(gens)}
        row[m] = -field.components[a].terms.get(e, 0)
        rows.append({c: v for c, v in row.items() if v})
    for v in nullspace(rows, m + 1):
        if v.get(m):
            s = v[m]
            return {gens[c].label: rat(x / s) for c, x in v.items() if c != m and x}
    return None


def combined_action(coeffs: Dict[str, Rational], gens: List[ConfGenerator], lam, alpha: PolyForm) -> PolyForm:
    by_label = {Z.label: Z for Z in gens}
    out = PolyForm.zero(alpha.m, alpha.deg)
    for label, c in coeffs.items():
        out = out + infinitesimal_action(by_label[label], lam, alpha).scale(c)
    return out
