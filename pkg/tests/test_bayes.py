from fractions import Fraction as F

import numpy as np
import pytest

from corpus import cerrw4, hoppe3, overlap_graph, spec
from markex.bayes import (
    PartitionedPrior,
    estimate_transition_matrix,
    hat_t_replicates,
    posterior_update,
    sample_transition_matrix,
    successor_predictive_trace,
)
from markex.core import BOUNDARY, History, Path, StateSpace
from markex.errors import InputError, ModelError
from markex.exchangeability import reachable_histories
from markex.graph import ColoredGraph
from markex.schemes import ColoredWalk, FunctionScheme, Sufficiency, path_probability, simulate


@pytest.fixture
def prior():
    return PartitionedPrior(cerrw4(), "a")


def test_overlap_rejected():
    with pytest.raises(ModelError):
        PartitionedPrior(overlap_graph(), "a")


def test_groups_in_declaration_order(prior):
    assert prior.groups == (("red", "blue"), ("green",), ("gold", "teal"))
    assert prior.group_of("a") == prior.group_of("b") == 0
    assert prior.group_of("d") == 2


def test_samples_are_stochastic_with_right_support(prior):
    m = prior.sample(500, seed=0)
    g = prior.graph
    assert m.shape == (500, 4, 4)
    np.testing.assert_allclose(m.sum(axis=2), 1.0, atol=1e-12)
    support = np.zeros((4, 4), dtype=bool)
    for e in g.edges:
        support[g.vertex_index(e.src), g.vertex_index(e.dst)] = True
    assert np.all(m[:, ~support] == 0)
    assert np.all(m[:, support] > 0)


def test_singleton_cells_are_one():
    g = spec("disjoint3.json").graph()
    m = PartitionedPrior(g, 0).sample(50, seed=1)
    # C(1) = {r1} alone: only the beta split is random
    np.testing.assert_allclose(m[:, 1, 0] + m[:, 1, 2], 1.0)
    # (0, 2) is the only s0 edge: its mass is the color draw alone
    np.testing.assert_allclose(m[:, 0, 2], 1 - m[:, 0, 0] - m[:, 0, 1])
    # a walk with a single out-edge per vertex is deterministic
    ring = ColoredGraph([(0, 1, "x", 1), (1, 0, "y", 1)], {"x": 1, "y": 1})
    assert np.all(PartitionedPrior(ring, 0).sample(5, seed=0)[:, [0, 1], [1, 0]] == 1)


def test_group_sum_constraint(prior):
    # a and b share {red, blue}: the red mass of both rows is the same draw
    m = prior.sample(200, seed=2)
    g = prior.graph
    a, b, c, d = (g.vertex_index(v) for v in "abcd")
    red_a = m[:, a, b] + m[:, a, c]
    red_b = m[:, b, a]
    np.testing.assert_allclose(red_a, red_b, rtol=1e-12)
    np.testing.assert_allclose(m[:, a, d], m[:, b, c] + m[:, b, d], rtol=1e-12)
    np.testing.assert_allclose(m[:, d, a], 1 - m[:, d, b] - m[:, d, c], rtol=1e-12)


def test_disjoint_rows_uncorrelated():
    g = spec("disjoint3.json").graph()
    m = PartitionedPrior(g, 0).sample(20_000, seed=3)
    r = np.corrcoef(m[:, 0, 1], m[:, 1, 0])[0, 1]
    assert abs(r) < 4 / np.sqrt(20_000)


def test_sample_reproducible(prior):
    a = sample_transition_matrix(prior, seed=7)
    b = sample_transition_matrix(prior, seed=7)
    assert np.array_equal(a.matrix, b.matrix)
    assert a["a", "b"] == a.matrix[0, 1]
    assert set(a.row("c")) == {"a", "b", "d"}


def test_prior_mean_matches_one_step_predictive(prior):
    mean = prior.mean()
    pred = prior.graph.predictive("a", {})
    for j, p in pred.items():
        assert mean[0, prior.graph.vertex_index(j)] == p
    assert all(sum(r) == 1 for r in mean)


@pytest.mark.parametrize("steps", [("b", "a"), ("c", "d", "a"), ("d", "b", "d")])
def test_prior_marginal_consistency(prior, steps):
    path = Path("a", steps)
    exact = float(path_probability(prior.scheme(), path))
    m = prior.sample(40_000, seed=4)
    g = prior.graph
    prod = np.ones(len(m))
    for i, j in path.transitions():
        prod *= m[:, g.vertex_index(i), g.vertex_index(j)]
    se = prod.std(ddof=1) / np.sqrt(len(prod))
    assert abs(prod.mean() - exact) < 3 * se + 1e-12


def test_posterior_empty_path(prior):
    post = posterior_update(prior, Path("a"))
    assert post.alpha == prior.alpha and post.beta == prior.beta and post.x0 == "a"


def test_posterior_additive_example():
    g = ColoredGraph([(0, 1, "c", 1), (1, 0, "c", 1), (0, 0, "c", 1)], {"c": 1})
    post = posterior_update(PartitionedPrior(g, 0), Path.of(0, 1, 0))
    assert post.alpha["c"] == 3
    assert post.beta[(0, 1)] == 2 and post.beta[(1, 0)] == 2 and post.beta[(0, 0)] == 1
    assert post.x0 == 0


def test_posterior_two_stage_equals_one_stage(prior):
    x = Path.of("a", "b", "c", "a", "d", "b")
    one = posterior_update(prior, x)
    two = posterior_update(posterior_update(prior, Path.of("a", "b", "c")), Path.of("c", "a", "d", "b"))
    assert one.alpha == two.alpha and one.beta == two.beta and one.x0 == two.x0 == "b"


def test_posterior_errors(prior):
    with pytest.raises(InputError):
        posterior_update(prior, Path.of("b", "a"))
    with pytest.raises(InputError):
        posterior_update(prior, Path.of("a", "a"))


def test_posterior_closure(prior):
    g = prior.graph
    walk = prior.scheme()
    space = StateSpace(g.vertices)
    for steps, _, _ in reachable_histories(walk, space, "a", 5):
        h = History("a", steps)
        post = posterior_update(prior, h.path())
        assert g.predictive(h.last, h.counts) == post.graph.predictive(h.last, {})


def test_estimate_example():
    s = StateSpace(range(3))
    t = estimate_transition_matrix(Path.of(0, 1, 0, 1), s)
    assert t.states == (0, 1, 2, BOUNDARY)
    assert list(t.matrix[0]) == [0, 1, 0, 0]
    assert list(t.matrix[1]) == [1, 0, 0, 0]
    assert list(t.matrix[2]) == [0, 0, 0, 1]
    assert list(t.matrix[3]) == [0, 0, 0, 1]


def test_estimate_empty_path():
    t = estimate_transition_matrix(Path(0), StateSpace(range(2)))
    assert all(t.row(i) == {BOUNDARY: 1} for i in (0, 1, BOUNDARY))


def test_estimate_rows_sum_exactly_one():
    g = cerrw4()
    path = simulate(ColoredWalk(g.as_float()), "a", 3000, seed=5)
    t = estimate_transition_matrix(path, StateSpace(g.vertices))
    assert all(s == 1 for s in t.row_sums())
    assert isinstance(t.matrix[0, 0], F)


def test_hat_t_replicates_match_estimate():
    g = cerrw4().as_float()
    out = hat_t_replicates(g, "a", 500, 3, [("a", "b"), ("c", "d")], seed=8)
    assert out.shape == (3, 2)
    assert np.all((out >= 0) & (out <= 1))
    again = hat_t_replicates(g, "a", 500, 3, [("a", "b"), ("c", "d")], seed=8)
    assert np.array_equal(out, again)
    with pytest.raises(InputError):
        hat_t_replicates(g, "a", 10, 1, [("a", "a")], seed=0)


def test_successor_trace_hoppe():
    s = hoppe3()
    path = simulate(s, 0, 200, seed=6)
    trace = successor_predictive_trace(s, path, 1, 2)
    succ = [b for a, b in path.transitions() if a == 1]
    for n, v in enumerate(trace, start=1):
        seen = succ[: n - 1].count(2)
        assert v == (F(1, 3) + seen) / (1 + n - 1)


def test_successor_trace_edge_cases():
    s = hoppe3()
    assert successor_predictive_trace(s, Path.of(0, 0, 0), 2, 1) == []
    const = FunctionScheme(lambda h: {1: F(1)}, Sufficiency.LAST_ROW)
    assert successor_predictive_trace(const, Path.of(1, 1, 1), 1, 1) == [1, 1, 1]


def test_successor_trace_converges_for_cerrw():
    # at many visits the predictive tracks the empirical frequency
    g = cerrw4().as_float()
    walk = ColoredWalk(g)
    path = simulate(walk, "a", 4000, seed=9)
    trace = successor_predictive_trace(walk, path, "a", "b")
    succ = [b for a, b in path.transitions() if a == "a"]
    assert abs(trace[-1] - succ.count("b") / len(succ)) < 0.02
