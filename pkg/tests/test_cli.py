import subprocess
import sys

import numpy as np
import pytest

from corpus import DATA
from markex import specfile
from markex.cli import main, read_path
from markex.errors import InputError


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def verdict(out):
    return [line for line in out.splitlines() if line.startswith("VERDICT: ")][-1]


# -- simulate --------------------------------------------------------------------------


def test_simulate_zero_steps_header_only(capsys, tmp_path):
    out_file = tmp_path / "p.csv"
    code, out, _ = run(capsys, "simulate", "--spec", DATA / "triangle.json", "--steps", 0, "--out", out_file)
    assert code == 0
    assert out_file.read_text() == "step,state\n"
    assert "steps: 0" in out


def test_simulate_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert run(capsys, "simulate", "--spec", DATA / "cerrw4.json", "--steps", 200, "--seed", 42, "--out", f)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    run(capsys, "simulate", "--spec", DATA / "cerrw4.json", "--steps", 200, "--seed", 43, "--out", c)
    assert c.read_bytes() != a.read_bytes()
    # the written path reads back and is realizable
    path = read_path(a, specfile.load(DATA / "cerrw4.json"))
    assert len(path) == 200


def test_simulate_stdout_and_summary(capsys):
    code, out, err = run(capsys, "simulate", "--scheme", "hoppe", "--spec", DATA / "hoppe3.json", "--steps", 5)
    assert code == 0
    assert out.splitlines()[0] == "step,state" and len(out.splitlines()) == 6
    assert "T_hat:" in err and "visits:" in err


def test_simulate_sink_names_vertex(capsys):
    code, _, err = run(capsys, "simulate", "--spec", DATA / "sink.json", "--steps", 10)
    assert code == 2
    assert "'z'" in err


def test_simulate_invalid_spec(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["a"], "colors": [], "edges": [{"from": "a", "to": "a", "color": "x"}], "x0": "a"}')
    code, _, err = run(capsys, "simulate", "--spec", bad, "--steps", 3)
    assert code == 2 and "edges[0].color" in err


# -- check -----------------------------------------------------------------------------


def test_check_counterexample(capsys):
    code, out, _ = run(capsys, "check", "--mode", "brute", "--scheme", "counterexample", "--max-len", 5)
    assert code == 1
    assert verdict(out) == "VERDICT: violated"
    assert "left=(1,3,1,2,3) p_left=0 right=(1,2,3,1,3) p_right=1/120" in out


def test_check_triangle_errw_holds(capsys):
    code, out, _ = run(capsys, "check", "--mode", "brute", "--scheme", "errw", "--spec", DATA / "triangle.json")
    assert code == 0 and verdict(out) == "VERDICT: holds"


@pytest.mark.parametrize("name", ["cerrw4.json", "disjoint3.json"])
def test_check_colored_partitioned(capsys, name):
    code, out, _ = run(capsys, "check", "--mode", "colored", "--spec", DATA / name)
    assert code == 0 and verdict(out) == "VERDICT: holds"


def test_check_colored_overlap(capsys):
    code, out, _ = run(capsys, "check", "--mode", "colored", "--spec", DATA / "overlap.json")
    assert code == 1 and "witness 1:" in out


def test_check_partition(capsys):
    code, out, _ = run(capsys, "check", "--mode", "partition", "--spec", DATA / "cerrw4.json")
    assert code == 0
    assert "group 1: red blue" in out and "group 3: gold teal" in out
    assert run(capsys, "check", "--mode", "partition", "--spec", DATA / "overlap.json")[0] == 1


@pytest.mark.parametrize("mode, code", [("a", 0), ("b", 1)])
def test_check_conditions_on_counterexample(capsys, mode, code):
    assert run(capsys, "check", "--mode", mode, "--scheme", "counterexample", "--max-len", 5)[0] == code


def test_check_linear(capsys):
    code, out, _ = run(capsys, "check", "--mode", "linear", "--scheme", "hoppe", "--spec", DATA / "hoppe3.json",
                       "--probe-max", 3)
    assert code == 0 and "coverage.probes: 64" in out
    assert run(capsys, "check", "--mode", "linear", "--scheme", "errw", "--spec", DATA / "triangle.json")[0] == 2


def test_check_budget_inconclusive(capsys):
    code, out, _ = run(capsys, "check", "--mode", "brute", "--scheme", "hoppe", "--spec", DATA / "hoppe3.json",
                       "--max-len", 6, "--budget", 100)
    assert code == 3 and verdict(out) == "VERDICT: inconclusive"


def test_check_float_mode(capsys):
    code, out, _ = run(capsys, "check", "--mode", "brute", "--scheme", "hoppe", "--spec", DATA / "hoppe3.json",
                       "--max-len", 4, "--float")
    assert code == 0 and "arithmetic: numeric" in out


# -- posterior -------------------------------------------------------------------------


def test_posterior_empty_path_echoes_spec(capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("step,state\n")
    out_spec = tmp_path / "post.json"
    code, out, _ = run(capsys, "posterior", "--spec", DATA / "cerrw4.json", "--path", empty, "--out", out_spec)
    assert code == 0 and "start: a" in out
    assert specfile.load(out_spec) == specfile.load(DATA / "cerrw4.json")


def test_posterior_additive_update(capsys, tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("step,state\n1,1\n2,0\n")
    doc = specfile.load(DATA / "triangle.json")
    code, out, _ = run(capsys, "posterior", "--spec", DATA / "triangle.json", "--path", path)
    assert code == 0
    updated = specfile.loads(out.split("--- updated spec ---\n", 1)[1])
    assert updated.alpha["c"] == doc.alpha["c"] + 2
    beta = {(i, j): b for i, j, _, b in updated.edges}
    assert beta[(0, 1)] == 2 and beta[(1, 0)] == 2 and beta[(1, 2)] == 1
    assert updated.x0 == 0


def test_posterior_unrealizable_path(capsys, tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("step,state\n1,a\n")
    code, _, err = run(capsys, "posterior", "--spec", DATA / "cerrw4.json", "--path", path)
    assert code == 2 and "missing edge ('a', 'a')" in err


@pytest.mark.parametrize(
    "text, msg",
    [("state\n", "header"), ("step,state\n2,b\n", ":2: expected step 1"), ("step,state\n1,q\n", "unknown state")],
)
def test_read_path_diagnostics(tmp_path, text, msg):
    f = tmp_path / "p.csv"
    f.write_text(text)
    with pytest.raises(InputError, match=msg):
        read_path(f, specfile.load(DATA / "cerrw4.json"))


# -- recurrence ------------------------------------------------------------------------


def test_recurrence_trace(capsys, tmp_path):
    f = tmp_path / "r.csv"
    code, out, _ = run(capsys, "recurrence", "--spec", DATA / "hoppe_common.json", "--scheme", "hoppe",
                       "--steps", 10, "--out", f)
    assert code == 0 and "diagnostic, not proof" in out
    data = np.loadtxt(f, delimiter=",", skiprows=1)
    assert data.shape == (10, 2)
    assert np.all(np.diff(data[:, 1]) >= 0)


def test_recurrence_above_harmonic_bound(capsys, tmp_path):
    f = tmp_path / "r.csv"
    run(capsys, "recurrence", "--spec", DATA / "hoppe_common.json", "--scheme", "hoppe",
        "--steps", 2000, "--replicates", 3, "--seed", 9, "--out", f)
    data = np.loadtxt(f, delimiter=",", skiprows=1)
    n = data[:, 0]
    bound = 0.5 * np.cumsum(1.0 / (n + 1))
    assert np.all(data[:, 1:] >= bound[:, None] - 1e-12)


@pytest.mark.parametrize("seed", ["-1", "abc", str(2**64)])
def test_invalid_seed(capsys, seed):
    code, _, err = run(capsys, "recurrence", "--spec", DATA / "hoppe_common.json", "--steps", 5, "--seed", seed)
    assert code == 2 and "seed" in err


# -- dummy -----------------------------------------------------------------------------


def test_dummy_marginal(capsys):
    code, out, _ = run(capsys, "dummy", "--spec", DATA / "dummy_loop.json", "--path", DATA / "path_loop.csv",
                       "--mode", "marginal")
    assert code == 0
    assert "probability: 19/2520" in out and "classes: 8" in out and "completions: 16" in out


def test_dummy_gibbs_singleton(capsys, tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("step,state\n1,2\n2,0\n")
    code, out, _ = run(capsys, "dummy", "--spec", DATA / "dummy_inequality.json", "--path", f,
                       "--mode", "gibbs", "--sweeps", 20)
    assert code == 0
    assert [line for line in out.splitlines() if line.startswith("frequency")] == ["frequency (0,2,0): 1.0"]


def test_dummy_infeasible_key(capsys, tmp_path):
    doc = (DATA / "dummy_inequality.json").read_text().replace('"from": 0,\n      "to": 1,\n      "count"',
                                                                '"from": 2,\n      "to": 1,\n      "count"')
    bad = tmp_path / "bad.json"
    bad.write_text(doc)
    code, _, err = run(capsys, "dummy", "--spec", bad, "--path", DATA / "path_one.csv", "--mode", "marginal")
    assert code == 2 and "dummies[0]" in err


# -- exit-code contract ----------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["check"], ["simulate", "--steps", "x"], ["check", "--mode", "colored"],
     ["posterior", "--spec", str(DATA / "cerrw4.json")]],
)
def test_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "markex", "check", "--mode", "partition", "--spec",
                          str(DATA / "disjoint3.json")], capture_output=True, text=True)
    assert res.returncode == 0 and "VERDICT: holds" in res.stdout
