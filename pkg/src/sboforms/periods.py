"""Labels of the cohomological unitary representations of O(n+1,1).

Pi_{l,delta} with 0 <= l <= n+1 and delta in {+,-}; the subgroup O(n,1)
carries the same labels with n replaced by n-1.  Everything here is integer
combinatorics on those labels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Set

from .operators import parity, parity_str


@dataclass(frozen=True, order=True)
class CohomRep:
    """Pi_{index, sgn} of O(n+1,1)."""

    n: int
    index: int
    sgn: int  # 0 for +, 1 for -

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0 <= self.index <= self.n + 1:
            raise ValueError("index out of range")
        if self.sgn not in (0, 1):
            raise ValueError("sgn must be 0 or 1")

    @classmethod
    def make(cls, n: int, index: int, sgn) -> "CohomRep":
        return cls(n, index, parity(sgn))

    @property
    def group(self) -> str:
        return f"O({self.n + 1},1)"

    @property
    def label(self) -> str:
        if self.index == 0 and self.sgn == 0:
            return "1"
        if self.index == self.n + 1 and self.sgn == 1:
            return "det"
        return f"Pi_{{{self.index},{parity_str(self.sgn)}}}"

    def to_dict(self) -> dict:
        return {"group": self.group, "index": self.index, "sgn": parity_str(self.sgn), "label": self.label}


def cohom_reps(n: int) -> List[CohomRep]:
    return [CohomRep(n, l, s) for l in range(n + 2) for s in (0, 1)]


def branching_allowed(big: CohomRep, small: CohomRep) -> bool:
    """Index(Pi) - 1 <= Index(pi) <= Index(Pi) and equal signs."""
    if small.n != big.n - 1:
        raise ValueError("group mismatch: expected O(n+1,1) and O(n,1)")
    return big.index - 1 <= small.index <= big.index and big.sgn == small.sgn


def branching_table(n: int) -> Dict[CohomRep, Dict[CohomRep, bool]]:
    return {P: {p: branching_allowed(P, p) for p in cohom_reps(n - 1)} for P in cohom_reps(n)}


def max_period(rep: CohomRep) -> int:
    """Largest k with Pi realized in C^infty(G/G^(k)), G^(k) = O(k,1)."""
    if rep.sgn != 0:
        raise ValueError("theorem hypothesis violated")
    return rep.n + 1 - rep.index


def is_tempered_rep(rep: CohomRep) -> bool:
    n = rep.n
    if n % 2:
        return 2 * rep.index == n + 1
    return rep.index in (n // 2, n // 2 + 1)


def l2_tempered(n: int, k: int) -> bool:
    """L^2(O(n+1,1)/O(k,1)) is tempered iff k <= n/2 + 1."""
    return 2 * k <= n + 2


def one_dim_reps(n: int) -> Set[CohomRep]:
    return {CohomRep(n, 0, 0), CohomRep(n, 0, 1), CohomRep(n, n + 1, 0), CohomRep(n, n + 1, 1)}
