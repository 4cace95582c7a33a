from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import cerrw4, hoppe3, triangle_errw
from markex.core import History, Path, StateSpace
from markex.errors import InputError, ModelError, NumericError
from markex.graph import ColoredGraph
from markex.schemes import (
    BaseMeasure,
    ColoredWalk,
    ErrwParams,
    ErrwScheme,
    FunctionScheme,
    HoppeParams,
    HoppeScheme,
    Sufficiency,
    TableScheme,
    _inverse_cdf,
    colored_predictive,
    counterexample_scheme,
    errw_as_colored,
    errw_predictive,
    hoppe_predictive,
    log_path_probability,
    path_probability,
    simulate,
)


def test_errw_predictive_by_hand():
    p = ErrwParams({(0, 1): 1, (1, 2): 2, (0, 2): 1})
    h = History(0, (1, 0))
    # at 0: edge {0,1} crossed twice, {0,2} never
    assert errw_predictive(p, h, 0) == {1: F(3, 4), 2: F(1, 4)}
    assert errw_predictive(p, {}, 1) == {0: F(1, 3), 2: F(2, 3)}


def test_errw_loop_counts_twice():
    p = ErrwParams({(0, 0): 1, (0, 1): 1})
    h = History(0, (0,))
    assert errw_predictive(p, h, 0) == {0: F(3, 4), 1: F(1, 4)}


def test_errw_isolated_vertex():
    with pytest.raises(ModelError):
        errw_predictive(ErrwParams({(0, 1): 1}), {}, 5)


def test_hoppe_predictive_formula():
    params = HoppeParams.common(range(3), 2, {0: F(1, 2), 1: F(1, 4), 2: F(1, 4)})
    row = {1: 3}
    got = hoppe_predictive(params, row, 0)
    # (alpha q(j) + T_0j) / (alpha + T_0.) with alpha = 2, T_01 = 3
    assert got == {0: F(1, 5), 1: F(7, 10), 2: F(1, 10)}
    assert sum(got.values()) == 1


def test_hoppe_q_must_normalise():
    with pytest.raises(InputError):
        HoppeParams(1, {0: {0: F(1, 2)}})


def test_hoppe_countable_base_measure():
    # geometric colors on the integers; urn mechanics still run
    base = BaseMeasure(lambda rng, i: int(rng.geometric(0.5)), lambda i, j: F(1, 2**j) if j >= 1 else F(0))
    s = HoppeScheme(HoppeParams(1, base))
    h = History(0, (1, 1))
    assert s.probability(h, 1) == (F(1, 2) + 1) / 2
    assert s.probability(h, 3) == F(1, 8) / 2
    path = simulate(s, 0, 50, seed=3)
    assert len(path) == 50 and path == simulate(s, 0, 50, seed=3)


def test_hoppe_colored_form_agrees():
    s = hoppe3()
    walk = s.as_colored()
    for steps in [(1, 2, 2), (0, 0, 1, 0), (2, 1, 0, 2, 2)]:
        p = Path(0, steps)
        assert path_probability(s, p) == path_probability(walk, p)


def test_colored_predictive_two_stage():
    g = cerrw4()
    h = History("a", ("b", "a", "c"))
    # at c only green edges: (1 + 0) / (1 + 0) times beta shares
    assert colored_predictive(g, h, "c") == {"a": F(1, 4), "b": F(1, 2), "d": F(1, 4)}
    # at a: group {red, blue}; red crossed by a->b, b->a, a->c
    got = colored_predictive(g, h, "a")
    red = F(1 + 3, 1 + 3 + 2)
    assert got["b"] == red * F(2, 2 + 3)
    assert got["c"] == red * F(3, 5)
    assert got["d"] == 1 - red
    assert sum(got.values()) == 1


def test_colored_walk_sufficiency_flags():
    assert ColoredWalk(cerrw4()).sufficiency is Sufficiency.LAST_T
    g = ColoredGraph([(0, 1, "x", 1), (1, 0, "y", 1)], {"x": 1, "y": 1})
    assert ColoredWalk(g).sufficiency is Sufficiency.LAST_ROW
    assert ColoredWalk(g).probability(History(0), 0) == 0


def test_colored_sink_raises():
    g = ColoredGraph([(0, 1, "x", 1)], {"x": 1})
    with pytest.raises(ModelError):
        colored_predictive(g, {}, 1)


@pytest.mark.parametrize(
    "steps, expected",
    [((1, 3, 1, 2, 3), F(0)), ((1, 2, 3, 1, 3), F(1, 120)), ((1, 1), F(1, 2)), ((2,), F(0))],
)
def test_counterexample_probabilities(steps, expected):
    assert path_probability(counterexample_scheme(), Path(0, steps)) == expected


def test_counterexample_labels_run_out():
    s = counterexample_scheme(["s", "a", "b"])
    assert s.next_distribution(History("s", ("a",))) == {"a": F(1, 2), "b": F(1, 2)}
    with pytest.raises(ModelError):
        s.next_distribution(History("s", ("a", "a")))


def test_errw_as_colored_matches_errw():
    params = ErrwParams({(0, 1): 1, (1, 2): F(1, 2), (0, 0): 2, (0, 2): 1})
    errw = ErrwScheme(params)
    graph, aux = errw_as_colored(params)
    walk = ColoredWalk(graph)
    for steps in [(0, 1, 2, 0), (0, 0, 1, 0, 0), (2, 1, 1)]:
        p = Path(0, steps)
        expanded = []
        prev = 0
        for s in steps:
            if s == prev and s in aux:
                expanded.append(aux[s])
            expanded.append(s)
            prev = s
        q = Path(0, tuple(expanded))
        assert path_probability(errw, p) == path_probability(walk, q)


def test_table_scheme_missing_entry():
    s = TableScheme({(): {0: F(1)}})
    assert s.next_distribution(History(0)) == {0: 1}
    with pytest.raises(ModelError):
        s.next_distribution(History(0, (0,)))


def test_inverse_cdf_exact_and_checks():
    dist = {0: F(1, 3), 1: F(2, 3)}
    assert _inverse_cdf(dist, 0.0, True) == 0
    assert _inverse_cdf(dist, 1 / 3 - 1e-12, True) == 0
    assert _inverse_cdf(dist, 0.34, True) == 1
    with pytest.raises(NumericError):
        _inverse_cdf({0: F(1, 2)}, 0.1, True)
    with pytest.raises(NumericError):
        _inverse_cdf({0: -0.5, 1: 1.5}, 0.1, False)


def test_path_probability_float_and_exact_agree():
    g = cerrw4()
    p = Path.of("a", "b", "c", "a", "d", "b")
    exact = path_probability(ColoredWalk(g), p)
    approx = path_probability(ColoredWalk(g.as_float()), p)
    assert approx == pytest.approx(float(exact), rel=1e-12)
    assert log_path_probability(ColoredWalk(g), Path.of("a", "a")) == -np.inf


@pytest.mark.parametrize("scheme", [triangle_errw(), hoppe3(), counterexample_scheme(), ColoredWalk(cerrw4())])
def test_simulate_is_reproducible(scheme):
    x0 = "a" if isinstance(scheme, ColoredWalk) else 0
    a = simulate(scheme, x0, 40, seed=11)
    b = simulate(scheme, x0, 40, seed=11)
    assert a == b and len(a) == 40
    assert path_probability(scheme, a) > 0
    assert simulate(scheme, x0, 0, seed=1) == Path(x0)


def test_simulate_rejects_negative_length():
    with pytest.raises(InputError):
        simulate(hoppe3(), 0, -1)


def test_first_step_frequencies_match_predictive():
    s = triangle_errw()
    seeds = np.random.SeedSequence(5).spawn(4000)
    counts = Counter(simulate(s, 0, 1, seed=ss).last for ss in seeds)
    assert abs(counts[1] / 4000 - 0.5) < 0.03


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=8))
def test_colored_predictive_is_a_distribution(steps):
    g = cerrw4()
    h = History("a")
    for s in steps:
        if not g.has_edge(h.last, s):
            break
        h.push(s)
    dist = g.predictive(h.last, h.counts)
    assert sum(dist.values()) == 1
    assert set(dist) == set(g.successors(h.last))


def test_function_scheme_wraps_callable():
    s = FunctionScheme(lambda h: {h.last: F(1)}, Sufficiency.LAST_ROW)
    assert path_probability(s, Path.of(0, 0, 0)) == 1
    assert path_probability(s, Path.of(0, 1)) == 0
