"""Command line interface: ``sboforms <command> ...``.

Machine output goes to stdout as JSON (or text with ``--format text``),
diagnostics to stderr.  Exit codes: 0 success, 1 verification failure,
2 usage error, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from . import classifier, operators, periods, solver
from .algebra import fmt_rat, rat

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


@dataclass
class Config:
    n_max: int = 5
    k_max: int = 4
    lam_samples: List = field(default_factory=lambda: [Fraction(1, 3), Fraction(2, 5), Fraction(7, 2),
                                                       -2, -1, 0, 1, 2, 3])
    cap: int = solver.DEFAULT_CAP
    cache_path: Optional[str] = None
    codiff_sign: int = -1

    def __post_init__(self):
        if self.n_max < 3:
            raise ValueError("n_max must be at least 3")
        if self.k_max < 0 or self.cap <= 0:
            raise ValueError("caps must be positive")


class UsageError(ValueError):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _params(a) -> classifier.ParamTuple:
    try:
        return classifier.ParamTuple.make(a.n, a.i, a.j, a.lam, a.nu, a.delta, a.eps)
    except ValueError as e:
        raise UsageError(str(e))


# ---------------------------------------------------------------------------
# construct


def construct(n: int, i: int, j: int, lam, nu, delta=None, eps=None, renormalized: bool = False,
              codiff_sign: Optional[int] = None) -> operators.SboOperator:
    """Build the operator for (i, j) at (lam, nu) from a base case and Hodge stars."""
    lam, nu = rat(lam), rat(nu)
    pars = [(operators.parity(delta), operators.parity(eps))] if delta is not None and eps is not None else \
        [(0, 0), (1, 1), (0, 1), (1, 0)]
    for d, e in pars:
        p = classifier.ParamTuple.make(n, i, j, lam, nu, d, e)
        for tag, (i2, j2, l2, n2, d2, e2) in classifier.star_images(p):
            if not classifier.base_condition(n, i2, j2, l2, n2, d2, e2):
                continue
            if j2 == i2:
                k = int(n2 - l2)
                build = operators.renormalized_matrix_operator if renormalized else operators.matrix_operator_ii
                T = build(n, i2, l2, k, codiff_sign)
            elif i2 == 0:
                T = operators.d_juhl_operator(n, l2)
            else:
                T = operators.rest_d_operator(n, i2)
            if "star_X" in tag:
                T = operators.hodge_transfer(T, "source")
            if "star_Y" in tag:
                T = operators.hodge_transfer(T, "target")
            assert (T.i, T.j, T.lam, T.nu, T.delta, T.eps) == (i, j, lam, nu, d, e)
            return T
    raise operators.ParameterError("not a covariant parameter")


# ---------------------------------------------------------------------------
# commands


def cmd_classify(a, cfg: Config) -> int:
    v = classifier.classify(_params(a))
    if a.format == "text":
        print(f"differential_dim: {v.differential_dim}")
        print(f"localness: {str(v.localness).lower()}")
        print(f"psi_sp: {str(v.in_Psi_sp).lower()}")
        print(f"source: {v.source}")
        for c in v.conditions_fired:
            print(f"clause: {c}")
    else:
        _emit(v.to_dict())
    return EXIT_OK


def cmd_construct(a, cfg: Config) -> int:
    try:
        if a.k is not None and a.nu is None:
            a.nu = fmt_rat(rat(a.lam) + a.k + a.i - a.j)
        if a.nu is None:
            raise UsageError("give --nu or --k")
        classifier.ParamTuple.make(a.n, a.i, a.j, a.lam, a.nu, 0, 0)
        T = construct(a.n, a.i, a.j, a.lam, a.nu, a.delta, a.eps, a.renormalized, cfg.codiff_sign)
    except operators.ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(T.dump() if a.format == "text" else T.to_json())
    return EXIT_OK


def cmd_verify(a, cfg: Config) -> int:
    with open(a.operator) as fh:
        T = operators.SboOperator.from_json(fh.read())
    over = {}
    for name in ("lam", "nu"):
        if getattr(a, name) is not None:
            over[name] = rat(getattr(a, name))
    for name in ("delta", "eps"):
        if getattr(a, name) is not None:
            over[name] = operators.parity(getattr(a, name))
    if over:
        T = T.with_params(**over)
    rep = solver.check_covariance(T)
    if a.format == "text":
        if rep.ok:
            print("residual: 0 (exact)")
        else:
            for g, m in rep.failures.items():
                print(f"residual: nonzero for {g} ({m} terms)")
    else:
        _emit({"schema": 1, "ok": rep.ok, "residual": "0 (exact)" if rep.ok else "nonzero",
               "failures": rep.failures})
    return EXIT_OK if rep.ok else EXIT_FAIL


def _cache(a, cfg: Config) -> Optional[solver.ResultCache]:
    if a.no_cache:
        return None
    return solver.ResultCache(a.cache or cfg.cache_path)


def cmd_solve_dim(a, cfg: Config) -> int:
    lams = [rat(x) for x in a.lambdas.split(",")] if a.lambdas else cfg.lam_samples
    ij = None
    if a.i is not None or a.j is not None:
        ii = [a.i] if a.i is not None else range(a.n + 1)
        jj = [a.j] if a.j is not None else range(a.n)
        ij = [(x, y) for x in ii for y in jj]
    pars = None
    if a.delta is not None and a.eps is not None:
        pars = [(operators.parity(a.delta), operators.parity(a.eps))]
    try:
        tab = solver.dimension_table(a.n, a.k_max, lams, cap=a.cap or cfg.cap, ij=ij, cache=_cache(a, cfg),
                                     parities=pars)
    except ValueError as e:
        raise UsageError(str(e))
    skipped = any(e.status == "skipped" for e in tab)
    if a.format == "text":
        print(f"{'i':>2} {'j':>2} {'k':>2} {'lambda':>7} {'nu':>7} {'d':>1} {'e':>1} dim")
        for e in tab:
            d = e.to_dict()
            dim = "skipped" if e.status == "skipped" else str(e.dimension)
            print(f"{e.i:>2} {e.j:>2} {e.k:>2} {d['lambda']:>7} {d['nu']:>7} {d['delta']:>1} {d['epsilon']:>1} {dim}")
    else:
        _emit({"schema": 1, "n": a.n, "k_max": a.k_max, "entries": [e.to_dict() for e in tab]})
    return EXIT_CAP if skipped else EXIT_OK


def cmd_branching(a, cfg: Config) -> int:
    if a.n < 1:
        raise UsageError("n must be at least 1")
    table = periods.branching_table(a.n)
    small = periods.cohom_reps(a.n - 1)
    if a.format == "markdown":
        head = "| Pi \\ pi | " + " | ".join(p.label for p in small) + " |"
        print(head)
        print("|" + "---|" * (len(small) + 1))
        for P, row in table.items():
            print(f"| {P.label} | " + " | ".join("x" if row[p] else "." for p in small) + " |")
    else:
        _emit({"schema": 1, "G": f"O({a.n + 1},1)", "G_prime": f"O({a.n},1)",
               "allowed": [[P.to_dict(), p.to_dict()] for P, row in table.items() for p in small if row[p]],
               "one_dim": [r.to_dict() for r in sorted(periods.one_dim_reps(a.n))],
               "tempered": [r.to_dict() for r in periods.cohom_reps(a.n) if periods.is_tempered_rep(r)],
               "max_period": {r.label: periods.max_period(r) for r in periods.cohom_reps(a.n) if r.sgn == 0}})
    return EXIT_OK


def cmd_sweep(a, cfg: Config) -> int:
    """Solver dimensions against the classifier for every n <= n_max."""
    lams = [rat(x) for x in a.lambdas.split(",")] if a.lambdas else cfg.lam_samples
    cache = _cache(a, cfg)
    summary = []
    status = EXIT_OK
    for n in range(3, a.n_max + 1):
        tab = solver.dimension_table(n, a.k_max, lams, cap=a.cap or cfg.cap, cache=cache)
        agree = disagree = skipped = 0
        bad = []
        for e in tab:
            if e.status == "skipped":
                skipped += 1
                continue
            v = classifier.classify(classifier.ParamTuple.make(n, e.i, e.j, e.lam, e.nu, e.delta, e.eps))
            if v.differential_dim == e.dimension:
                agree += 1
            else:
                disagree += 1
                bad.append(e.to_dict())
        summary.append({"n": n, "points": len(tab), "agree": agree, "disagree": disagree, "skipped": skipped,
                        "max_dim": max((e.dimension or 0) for e in tab), "disagreements": bad[:20]})
        print(f"n={n}: {agree} agree, {disagree} disagree, {skipped} skipped", file=sys.stderr)
        if disagree:
            status = EXIT_FAIL
        elif skipped and status == EXIT_OK:
            status = EXIT_CAP
    _emit({"schema": 1, "k_max": a.k_max, "lambdas": [fmt_rat(x) for x in lams], "summary": summary})
    return status


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sboforms", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def params(sp, need_nu=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--i", type=int, required=True)
        sp.add_argument("--j", type=int, required=True)
        sp.add_argument("--lambda", dest="lam", required=True)
        sp.add_argument("--nu", required=need_nu)
        sp.add_argument("--delta", required=need_nu)
        sp.add_argument("--eps", required=need_nu)

    sp = sub.add_parser("classify", help="existence verdict for a parameter tuple")
    params(sp)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("construct", help="emit an explicit operator")
    params(sp, need_nu=False)
    sp.add_argument("--k", type=int, help="derivative order (alternative to --nu)")
    sp.add_argument("--renormalized", action="store_true")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="exact covariance check of a serialized operator")
    sp.add_argument("operator")
    sp.add_argument("--lambda", dest="lam")
    sp.add_argument("--nu")
    sp.add_argument("--delta")
    sp.add_argument("--eps")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(func=cmd_verify)

    def table_opts(sp):
        sp.add_argument("--k-max", type=int, default=4)
        sp.add_argument("--lambdas", help="comma separated rationals")
        sp.add_argument("--cap", type=int)
        sp.add_argument("--cache")
        sp.add_argument("--no-cache", action="store_true")

    sp = sub.add_parser("solve-dim", help="solver dimension table")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--delta")
    sp.add_argument("--eps")
    table_opts(sp)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_solve_dim)

    sp = sub.add_parser("branching", help="allowed (Pi, pi) pairs and related tables")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--format", choices=("json", "markdown"), default="json")
    sp.set_defaults(func=cmd_branching)

    sp = sub.add_parser("sweep", help="solver against classifier for all n <= n-max")
    sp.add_argument("--n-max", type=int, default=5)
    table_opts(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    cfg = Config()
    try:
        return a.func(a, cfg)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except solver.ResourceCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
