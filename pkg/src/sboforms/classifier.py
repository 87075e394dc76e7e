"""Existence of differential symmetry breaking operators as a pure predicate.

Parameters are in the conformal normalization used throughout the package:
source E^i(R^n)_{lam,delta}, target E^j(R^{n-1})_{nu,eps}.

The two base cases j = i and j = i + 1 carry explicit conditions.  Every
other admissible (i, j) is reached from a base case by a Hodge star on the
source, on the target, or on both.  A star on p-forms over R^m sends weight
w to w + 2p - m and flips the parity, so the four star images of a parameter
tuple describe isomorphic operator spaces.  An operator exists iff some
image lands in a base case whose condition holds.  This rule was confirmed
against the exact solver for n <= 5 and order <= 4.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .algebra import Rational, fmt_rat, rat
from .operators import parity, parity_str

H_BOUND = 4



@dataclass(frozen=True)
class ParamTuple:
    n: int
    i: int
    j: int
    lam: Rational
    nu: Rational
    delta: int
    eps: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if not 0 <= self.i <= self.n:
            raise ValueError("i out of range")
        if not 0 <= self.j <= self.n - 1:
            raise ValueError("j out of range")

    @classmethod
    def make(cls, n, i, j, lam, nu, delta, eps) -> "ParamTuple":
        return cls(int(n), int(i), int(j), rat(lam), rat(nu), parity(delta), parity(eps))

    def to_dict(self) -> dict:
        return {"n": self.n, "i": self.i, "j": self.j, "lambda": fmt_rat(self.lam), "nu": fmt_rat(self.nu),
                "delta": parity_str(self.delta), "epsilon": parity_str(self.eps)}


def is_natural(x: Rational) -> bool:
    return Fraction(x).denominator == 1 and x >= 0


def ij_condition(n: int, i: int, j: int) -> bool:
    """{j, n-1-j} meets {i-2, i-1, i, i+1}."""
    return bool({j, n - 1 - j} & {i - 2, i - 1, i, i + 1})


def base_condition(n: int, i: int, j: int, lam, nu, delta: int, eps: int) -> Optional[bool]:
    """Q_{i,j} together with nu - lam in N for the base cases; None elsewhere."""
    lam, nu = rat(lam), rat(nu)
    if j == i and i <= n - 1:
        k = nu - lam
        return is_natural(k) and delta % 2 == eps % 2 == int(k) % 2
    if j == i + 1 and 1 <= i <= n - 2:
        return lam == 0 and nu == 0 and delta % 2 == 0 and eps % 2 == 0
    if j == 1 and i == 0:
        return is_natural(-lam) and nu == 0 and delta % 2 == eps % 2 == int(-lam) % 2
    return None


def star_images(p: ParamTuple) -> List[Tuple[str, Tuple]]:
    """The four Hodge images (none, source, target, both) of a parameter tuple."""
    n = p.n
    out = []
    for sx in (0, 1):
        for sy in (0, 1):
            i2, l2, d2 = (n - p.i, p.lam + 2 * p.i - n, (p.delta + 1) % 2) if sx else (p.i, p.lam, p.delta)
            j2, n2, e2 = (n - 1 - p.j, p.nu + 2 * p.j - (n - 1), (p.eps + 1) % 2) if sy else (p.j, p.nu, p.eps)
            tag = {(0, 0): "identity", (1, 0): "star_X", (0, 1): "star_Y", (1, 1): "star_X,star_Y"}[(sx, sy)]
            out.append((tag, (i2, j2, rat(l2), rat(n2), d2, e2)))
    return out


def q_condition(p: ParamTuple) -> Tuple[Optional[bool], str, List[str]]:
    """(holds, source, fired clauses).

    source is "paper" when (i, j) is itself a base case and its stated
    condition alone gives the answer; otherwise "oracle" (a star image
    decides).  holds is None when no image is a base case.
    """
    fired = []
    verdicts = {}
    for tag, (i2, j2, l2, n2, d2, e2) in star_images(p):
        v = base_condition(p.n, i2, j2, l2, n2, d2, e2)
        if v is None:
            continue
        verdicts[tag] = v
        if v:
            case = "Q_{i,i}" if j2 == i2 else ("Q_{0,1}" if i2 == 0 else "Q_{i,i+1}")
            fired.append(f"{case} via {tag}")
    if not verdicts:
        return None, "oracle", fired
    holds = any(verdicts.values())
    source = "paper" if verdicts.get("identity") == holds and "identity" in verdicts else "oracle"
    return holds, source, fired


def psi_sp(lam, nu, delta, eps) -> bool:
    """nu - lam in 2N when delta = eps, in 2N + 1 otherwise."""
    k = rat(nu) - rat(lam)
    if not is_natural(k):
        return False
    return int(k) % 2 == (parity(delta) + parity(eps)) % 2


def normalize_parameters(i: int, lam, delta) -> Tuple[int, Rational, int]:
    """Conformal (i, lam, delta) -> principal series (i, lam + i, (-1)^i delta)."""
    return i, rat(rat(lam) + i), (parity(delta) + i) % 2


def denormalize_parameters(i: int, lam, delta) -> Tuple[int, Rational, int]:
    return i, rat(rat(lam) - i), (parity(delta) + i) % 2


@dataclass
class ClassificationVerdict:
    params: ParamTuple
    differential_exists: bool
    differential_dim: int
    conditions_fired: List[str] = field(default_factory=list)
    localness: bool = False
    in_Psi_sp: bool = False
    source: str = "paper"
    determined: bool = True
    irreducible_source: bool = False
    H_bound: int = H_BOUND

    def __post_init__(self):
        assert self.differential_dim == int(self.differential_exists)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "params": self.params.to_dict(),
            "differential_dim": self.differential_dim,
            "localness": self.localness,
            "psi_sp": self.in_Psi_sp,
            "clauses": self.conditions_fired,
            "source": self.source,
            "determined": self.determined,
            "irreducible_source": self.irreducible_source,
            "H_bound": self.H_bound,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def classify(p: ParamTuple) -> ClassificationVerdict:
    clauses = []
    ij = ij_condition(p.n, p.i, p.j)
    clauses.append(f"ijcond: {'holds' if ij else 'fails'}")
    q, source, fired = q_condition(p)
    if q is None:
        clauses.append("no base case reachable")
    clauses.extend(fired)
    exists = bool(ij and q)
    _, lam_ps, _ = normalize_parameters(p.i, p.lam, p.delta)
    return ClassificationVerdict(
        params=p,
        differential_exists=exists,
        differential_dim=int(exists),
        conditions_fired=clauses,
        localness=p.j not in (p.i - 1, p.i),
        in_Psi_sp=psi_sp(p.lam, p.nu, p.delta, p.eps),
        source=source,
        determined=q is not None or not ij,
        irreducible_source=Fraction(lam_ps).denominator != 1,
    )
