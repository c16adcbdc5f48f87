import json
import os
import subprocess
import sys

import pytest

from vertexcone.cli import main


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    proc = subprocess.run([sys.executable, "-m", "vertexcone", *map(str, args)],
                          capture_output=True, text=True, env=full_env)
    return proc


def report(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def toy(tmp_path):
    def make(sizes, b=None, **extra):
        data = {"sizes": sizes}
        if b is not None:
            data["multiplicities"] = b
        data.update(extra)
        path = tmp_path / f"inst{len(list(tmp_path.iterdir()))}.json"
        path.write_text(json.dumps(data))
        return path
    return make


def test_vertices(capsys, toy):
    code, r = report(capsys, "vertices", toy(["1/2", "1/3"]), "--oracle")
    assert code == 0 and r["result"]["count"] == 3 and r["oracle"]["agree"]
    code, r = report(capsys, "vertices", toy(["1/7"]))
    assert r["result"]["count"] == 2 and r["result"]["unit_fraction_fast_path"]
    code, r = report(capsys, "vertices", toy(["2/3", "1/3"]), "--oracle")
    assert r["result"]["count"] == 4 and r["oracle"]["agree"]


def test_generator(capsys):
    code, r = report(capsys, "generator", "3,4", "--oracle")
    assert code == 0 and r["result"]["g"] == [2, 1] and r["result"]["size"] == "11/12"
    assert r["oracle"]["agree"]
    code, r = report(capsys, "generator", "2,3")
    assert r["result"]["g"] == [1, 1] and r["result"]["size"] == "5/6"
    code, r = report(capsys, "generator", "2,4")
    assert code == 2 and r is None


def test_lower_bound_construct(capsys, tmp_path):
    out = tmp_path / "lb.json"
    code, r = report(capsys, "lower-bound", "--d", 3, "--epsilon", "1/37", "--emit", out)
    res = r["result"]
    assert code == 0 and res["a"] == [75, 227, 6751] and res["m"] == [37, 75, 964]
    assert res["certificate"]["dist"] == 5 and all(res["premises"].values())
    emitted = json.loads(out.read_text())
    assert emitted["sizes"] == ["1/75", "1/227", "1/6751"] and emitted["bins"] == 5


def test_lower_bound_other_modes(capsys):
    code, r = report(capsys, "lower-bound", "--d", 3, "--mode", "search", "--bound", 100)
    assert code == 0 and r["result"]["instance"] is None
    code, r = report(capsys, "lower-bound", "--d", 2)
    assert code == 0 and r["result"]["certificate"] is None
    code, r = report(capsys, "search-instance", "--d", 3, "--bound", 100)
    assert r["result"]["instance"] is None


def test_construction_budget():
    # a one-step budget cannot reach an admissible denominator
    from vertexcone import lowerbound
    with pytest.raises(lowerbound.ResourceLimitError):
        lowerbound.construct_sylvester_instance(3, max_steps=1)


def test_solve_gap_dist(capsys, toy):
    f = toy(["1/2", "1/3"], [2, 3])
    code, r = report(capsys, "solve", f, "--oracle")
    assert code == 0 and r["result"]["bins"] == 2 and r["oracle"]["agree"]
    code, r = report(capsys, "dist", toy(["1/2", "1/3"], [5, 5]), "--oracle")
    assert r["result"]["distance"] == 2 and r["oracle"]["agree"]
    assert sum(w * p[0] for p, w in r["result"]["witness"]) == 5
    code, r = report(capsys, "gap", toy(["1/2", "1/3"], [0, 0]))
    assert r["result"]["ilp_opt"] == 0 and r["result"]["lp_opt"] == "0"
    assert r["result"]["gap"] == "0"
    code, r = report(capsys, "lp", f, "--oracle")
    assert r["result"]["value"] == "2" and r["oracle"]["agree"]
    code, r = report(capsys, "decompose", toy(["1/2", "1/3"], [5, 5]), "--oracle")
    assert r["result"]["bounds_hold"] and r["oracle"]["agree"]
    code, r = report(capsys, "verify", toy(["2/5", "1/3", "1/4"], [2, 2, 1]))
    assert code == 0 and r["result"]["agree"]


def test_small_commands(capsys, toy):
    code, r = report(capsys, "level", "--x", "1/6,1/2,1/3", "--K", 2, "--K-max", 50)
    assert r["result"]["level"] == 1 and r["result"]["recurrence_failures"] == []
    code, r = report(capsys, "find-k", "--x", "2/5,2/5,1/5", "--oracle")
    assert r["result"]["K"] == 3 and r["oracle"]["agree"]
    code, r = report(capsys, "orbit", "3,4", "--K", 12)
    assert r["result"]["orbit"][-1]["element"] == [0, 0]
    code, r = report(capsys, "group", "3,4", "--elements", "--oracle")
    assert len(r["result"]["elements"]) == 12 and r["oracle"]["agree"]
    code, r = report(capsys, "configs", toy(["1/2", "1/3"]), "--list")
    assert r["result"]["count"] == 7
    f = toy(["1/2", "1/3"])
    code, r = report(capsys, "shift", f, "--weights", "[[[1,1],5]]", "--gamma", "1,1")
    assert code == 0 and r["result"]["K"] == 2 and r["result"]["distance_after"] == 4
    code, r = report(capsys, "shift", f, "--weights", "[[[1,1],1]]", "--gamma", "1,1")
    assert code == 2
    code, r = report(capsys, "reduce-support", f, "--weights",
                     "[[[1,1],2],[[0,1],1],[[1,0],3],[[0,2],1]]")
    assert r["result"]["nonvertex_support_after"] <= 4
    code, r = report(capsys, "irup-family", toy(["1/3", "1/4"]), "--gamma", "1,1", "--Z", 2)
    assert [m["K"] for m in r["result"]["members"]] == [3, 4]


def test_exit_codes(toy, tmp_path):
    assert run("solve", toy(["1/2", "1/3"], [2, 3])).returncode == 0
    bad = run("solve", toy([0.5, "1/3"], [2, 3]))
    assert bad.returncode == 2 and "error" in bad.stderr
    assert run("solve", tmp_path / "nope.json").returncode == 2
    limit = run("dist", toy(["1/2", "1/3"], [40, 40]), "--cell-cap", 10)
    assert limit.returncode == 3 and "resource limit" in limit.stderr
    assert run("solve", toy(["1/6", "4/11", "1/2"], [5, 4, 1]), "--node-cap", 3).returncode == 3


def test_deterministic_output(toy):
    f = toy(["2/5", "1/3", "1/4"], [3, 2, 4])
    outs = {run(cmd, f).stdout for cmd in ["decompose"] * 3}
    assert len(outs) == 1
    a = run("irup-family", toy(["1/3", "1/5", "1/7"]), "--gamma", "1,1,1", "--Z", 3)
    b = run("irup-family", toy(["1/3", "1/5", "1/7"]), "--gamma", "1,1,1", "--Z", 3,
            env={"VERTEXCONE_THREADS": "3"})
    assert a.returncode == 0 and a.stdout == b.stdout


def test_threads_env_validated(toy):
    p = run("irup-family", toy(["1/3", "1/4"]), "--gamma", "1,1", "--Z", 1,
            env={"VERTEXCONE_THREADS": "many"})
    assert p.returncode == 2


def test_pretty(toy):
    p = run("solve", toy(["1/2", "1/3"], [2, 3]), "--pretty")
    assert p.returncode == 0 and "bins: 2" in p.stdout
