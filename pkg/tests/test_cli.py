import json
import random
from fractions import Fraction

import pytest

from sboforms import cli
from sboforms.operators import SboOperator
from sboforms.solver import dimension_table, ResultCache


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


P = ["--n", 4, "--i", 1, "--j", 1, "--lambda", 0, "--nu", 2, "--delta", "+", "--eps", "+"]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", *P)
    assert code == 0 and json.loads(out)["differential_dim"] == 1
    code, out, _ = run(capsys, "classify", "--n", 4, "--i", 0, "--j", 3, "--lambda=-1/2", "--nu", "1/2",
                       "--delta", "+", "--eps", "-")
    v = json.loads(out)
    assert code == 0 and v["localness"] is True and v["differential_dim"] in (0, 1)
    code, _, err = run(capsys, "classify", "--n", 4, "--i", 1, "--j", 4, "--lambda", 0, "--nu", 0,
                       "--delta", "+", "--eps", "+")
    assert code == 2 and "error" in err


def test_determinism(capsys):
    outs = {run(capsys, "classify", *P)[1] for _ in range(3)}
    assert len(outs) == 1
    a = run(capsys, "branching", "--n", 4)[1]
    assert a == run(capsys, "branching", "--n", 4)[1]


def test_construct_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", *P)
    assert code == 0
    assert SboOperator.from_json(out).to_json() == out
    again = run(capsys, "construct", *P)[1]
    assert again == out


def test_construct_scalar_case(capsys):
    code, out, _ = run(capsys, "construct", "--n", 3, "--i", 0, "--j", 0, "--lambda", "1/3", "--k", 2)
    d = json.loads(out)
    assert code == 0 and d["target"]["nu"] == "7/3"
    assert d["terms"] and all(t["from"] == [] and t["to"] == [] for t in d["terms"])


def test_construct_renormalized(capsys):
    base = ["construct", "--n", 3, "--i", 1, "--j", 1, "--lambda", "-2", "--k", 2]
    plain = json.loads(run(capsys, *base)[1])
    ren = json.loads(run(capsys, *base, "--renormalized")[1])
    assert ren["terms"] and ren != plain


def test_construct_noncovariant_is_usage_error(capsys):
    code, _, err = run(capsys, "construct", "--n", 4, "--i", 1, "--j", 1, "--lambda", 1, "--nu", "3/2")
    assert code == 2 and "error" in err


def _write(tmp_path, capsys, argv):
    out = run(capsys, "construct", *argv)[1]
    f = tmp_path / "op.json"
    f.write_text(out)
    return f, json.loads(out)


def test_verify_exact(capsys, tmp_path):
    f, _ = _write(tmp_path, capsys, P)
    code, out, _ = run(capsys, "verify", f)
    assert code == 0 and out.strip() == "residual: 0 (exact)"


def test_verify_perturbed(capsys, tmp_path):
    f, d = _write(tmp_path, capsys, P)
    t = d["terms"][0]
    t["coeff"] = str(Fraction(t["coeff"]) + 1)
    f.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", f)
    assert code == 1 and "nonzero for" in out


def test_verify_wrong_parity_names_reflection(capsys, tmp_path):
    f, _ = _write(tmp_path, capsys, P)
    code, out, _ = run(capsys, "verify", f, "--eps", "-")
    assert code == 1 and ("sigma1" in out or "sigman" in out)


def test_solve_dim_and_cap(capsys, tmp_path):
    code, out, _ = run(capsys, "solve-dim", "--n", 3, "--i", 1, "--j", 1, "--k-max", 2, "--lambdas", "1/3",
                       "--delta", "+", "--eps", "+", "--cache", tmp_path / "c.json")
    ents = json.loads(out)["entries"]
    assert code == 0 and [e["dimension"] for e in ents] == [1, 0, 1]
    code, _, _ = run(capsys, "solve-dim", "--n", 4, "--i", 2, "--j", 2, "--k-max", 2, "--lambdas", "0",
                     "--cap", 50, "--no-cache")
    assert code == 3
    code, _, _ = run(capsys, "solve-dim", "--n", 9, "--no-cache")
    assert code == 2


def test_cache_replays(tmp_path):
    rng = random.Random(7)
    cache = ResultCache(tmp_path / "c.json")
    dimension_table(3, 3, [Fraction(1, 3), 0, -1], cache=cache)
    cache.save()
    warm = ResultCache(tmp_path / "c.json")
    for _ in range(20):
        i, j = rng.randrange(4), rng.randrange(3)
        lam = rng.choice([Fraction(1, 3), 0, -1])
        par = [(rng.randrange(2), rng.randrange(2))]
        a = dimension_table(3, 3, [lam], ij=[(i, j)], cache=warm, parities=par)
        b = dimension_table(3, 3, [lam], ij=[(i, j)], parities=par)
        assert [e.to_dict() for e in a] == [e.to_dict() for e in b]


def test_branching_markdown(capsys):
    code, out, _ = run(capsys, "branching", "--n", 3, "--format", "markdown")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 2 + 10
    assert sum(l.count(" x ") for l in lines) == 16
