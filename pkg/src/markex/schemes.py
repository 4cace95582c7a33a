"""Predictive schemes and exact path probabilities.

A predictive scheme maps the observed past ``(x0, x1, ..., xn)`` to the law of
``x_{n+1}``; by the chain rule a scheme determines the law of the whole
process.  This module provides the contract, the reinforced families (edge
reinforced walks, reinforced Hoppe urns, colored edge reinforced walks), the
one-step-sufficient counterexample and a table-driven scheme for arbitrary
history-dependent rules.
"""

from __future__ import annotations

import enum
import itertools
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .core import History, Path, StateSpace, TransitionCounts
from .errors import InputError, ModelError, NumericError
from .graph import ColoredGraph, to_number, to_weight
from .rng import make_rng

State = Hashable


class Sufficiency(str, enum.Enum):
    """Which summary of the past a scheme actually reads."""

    FULL = "full-history"
    LAST_T = "(last, T)"
    LAST_ROW = "(last, T_row)"


def _count_map(counts) -> Mapping:
    if isinstance(counts, (History, TransitionCounts)):
        return counts.counts
    return counts


class PredictiveScheme(ABC):
    """Contract for one-step predictive rules.

    Subclasses implement :meth:`next_distribution`.  ``exact`` schemes return
    :class:`~fractions.Fraction` probabilities; the checkers compare those
    with ``==``.
    """

    sufficiency: Sufficiency = Sufficiency.FULL
    exact: bool = True

    @abstractmethod
    def next_distribution(self, history: History) -> dict:
        """Law of the next state given the past.  Missing states have mass 0."""

    def probability(self, history: History, y: State):
        return self.next_distribution(history).get(y, 0)

    def sample_next(self, history: History, rng: np.random.Generator) -> State:
        """Draw the next state by inverse CDF over :meth:`next_distribution`."""
        dist = self.next_distribution(history)
        return _inverse_cdf(dist, rng.random(), self.exact)


def _inverse_cdf(dist: Mapping, u: float, exact: bool) -> State:
    total = 0
    for p in dist.values():
        if p < 0:
            raise NumericError(f"negative probability in {dist!r}")
        total += p
    if exact and isinstance(total, Fraction):
        if total != 1:
            raise NumericError(f"distribution sums to {total}, not 1")
        target = Fraction(u)
    else:
        if not math.isfinite(float(total)) or abs(float(total) - 1.0) > 1e-12:
            raise NumericError(f"distribution sums to {float(total)!r}, not 1")
        target = u * float(total)
    acc = 0
    last = None
    for s, p in dist.items():
        if p <= 0:
            continue
        acc += p
        last = s
        if target < acc:
            return s
    if last is None:
        raise NumericError("distribution has no positive mass")
    return last


# -- edge reinforced random walk ------------------------------------------------


class ErrwParams:
    """Undirected graph with positive initial edge weights (loops allowed).

    ``edges`` maps ``(i, j)`` (either orientation; ``(i, i)`` for a loop) to
    the initial weight of the undirected edge ``{i, j}``.
    """

    def __init__(self, edges: Mapping, exact: bool = True):
        self.exact = exact
        self.weights: dict = {}
        for (i, j), a in edges.items():
            key = frozenset((i, j))
            if key in self.weights:
                raise InputError(f"duplicate undirected edge {{{i!r}, {j!r}}}")
            self.weights[key] = to_weight(a, exact)
        self.neighbors: dict = {}
        for key in self.weights:
            pair = tuple(key)
            i, j = (pair[0], pair[0]) if len(pair) == 1 else pair
            self.neighbors.setdefault(i, []).append(j)
            if i != j:
                self.neighbors.setdefault(j, []).append(i)

    def weight(self, i, j):
        return self.weights[frozenset((i, j))]

    def vertices(self) -> list:
        return list(self.neighbors)


def errw_predictive(params: ErrwParams, counts, i) -> dict:
    """Next-step law of the edge reinforced walk standing at ``i``.

    ``p(j) = (a_ij + T_ij + T_ji) / (a_i. + T_i. + T_.i)``; a loop traversal
    contributes to both count terms, i.e. reinforces its edge by 2.
    """
    nbrs = params.neighbors.get(i)
    if not nbrs:
        raise ModelError(f"vertex {i!r} has no incident edges")
    t = _count_map(counts)
    num = {j: params.weight(i, j) + t.get((i, j), 0) + t.get((j, i), 0) for j in nbrs}
    den = sum(num.values())
    return {j: w / den for j, w in num.items()}


class ErrwScheme(PredictiveScheme):
    sufficiency = Sufficiency.LAST_T

    def __init__(self, params: ErrwParams):
        self.params = params
        self.exact = params.exact

    def next_distribution(self, history: History) -> dict:
        return errw_predictive(self.params, history, history.last)


def errw_as_colored(params: ErrwParams) -> tuple[ColoredGraph, dict]:
    """Embed an edge reinforced walk as a colored walk.

    Both orientations of an undirected edge share one color; a loop at ``i``
    becomes the detour ``i -> ("*", i) -> i`` through an auxiliary vertex.
    Returns the graph and the map ``i -> auxiliary vertex``.
    """
    edges, alpha, aux = [], {}, {}
    for key, a in params.weights.items():
        pair = tuple(key)
        if len(pair) == 1:
            i = pair[0]
            star = ("*", i)
            aux[i] = star
            c = ("loop", i)
            alpha[c] = a
            edges += [(i, star, c, 1), (star, i, c, 1)]
        else:
            i, j = pair
            c = ("edge", i, j)
            alpha[c] = a
            edges += [(i, j, c, 1), (j, i, c, 1)]
    return ColoredGraph(edges, alpha, exact=params.exact), aux


# -- reinforced Hoppe urns -------------------------------------------------------


class BaseMeasure:
    """Color distributions ``q_i`` over a possibly countable state space.

    ``sample(rng, i)`` draws from ``q_i`` and ``mass(i, j)`` evaluates it.
    """

    def __init__(self, sample: Callable, mass: Callable):
        self.sample = sample
        self.mass = mass


class HoppeParams:
    """Urn weights ``alpha[i] > 0`` and color laws ``q[i]`` (one per state).

    ``q`` is either a mapping ``i -> {j: q_i(j)}`` (finite space) or a
    :class:`BaseMeasure`.  ``alpha`` may be a mapping or a single common value.
    """

    def __init__(self, alpha, q, states: Sequence | None = None, exact: bool = True):
        self.exact = exact
        self.base = q if isinstance(q, BaseMeasure) else None
        if self.base is None:
            self.q = {}
            for i, row in q.items():
                parsed = {j: to_number(p, exact) for j, p in row.items()}
                tot = sum(parsed.values())
                if (exact and tot != 1) or (not exact and abs(tot - 1) > 1e-12):
                    raise InputError(f"q_{i!r} sums to {tot}, not 1")
                self.q[i] = {j: p for j, p in parsed.items() if p > 0}
            self.states = tuple(states) if states is not None else tuple(self.q)
        else:
            self.q = None
            self.states = tuple(states) if states is not None else None
        if isinstance(alpha, Mapping):
            self.alpha = {i: to_weight(a, exact) for i, a in alpha.items()}
            self._common_alpha = None
        else:
            self._common_alpha = to_weight(alpha, exact)
            self.alpha = {}

    @classmethod
    def uniform(cls, states: Sequence, alpha=1, exact: bool = True) -> "HoppeParams":
        states = tuple(states)
        p = Fraction(1, len(states)) if exact else 1.0 / len(states)
        return cls(alpha, {i: {j: p for j in states} for i in states}, states, exact)

    @classmethod
    def common(cls, states: Sequence, alpha, q: Mapping, exact: bool = True) -> "HoppeParams":
        """Same ``alpha`` and the same color law ``q`` for every urn."""
        states = tuple(states)
        return cls(alpha, {i: dict(q) for i in states}, states, exact)

    def alpha_of(self, i):
        if self._common_alpha is not None:
            return self._common_alpha
        try:
            return self.alpha[i]
        except KeyError:
            raise ModelError(f"no urn weight for state {i!r}") from None

    def q_of(self, i, j):
        if self.base is not None:
            return self.base.mass(i, j)
        return self.q.get(i, {}).get(j, 0)

    @property
    def finite(self) -> bool:
        return self.q is not None


def hoppe_predictive(params: HoppeParams, row: Mapping, i) -> dict:
    """``p(j) = (alpha_i q_i(j) + T_ij) / (alpha_i + T_i.)`` over the finite support."""
    if not params.finite:
        raise ModelError("next-step table needs a finite q; use probability() instead")
    a = params.alpha_of(i)
    q = params.q.get(i)
    if q is None:
        raise ModelError(f"no color law q for state {i!r}")
    den = a + sum(row.values())
    support = list(q) + [j for j in row if j not in q]
    return {j: (a * q.get(j, 0) + row.get(j, 0)) / den for j in support}


class HoppeScheme(PredictiveScheme):
    """Reinforced Hoppe urn: one urn per state, ``alpha_i`` black balls."""

    sufficiency = Sufficiency.LAST_ROW

    def __init__(self, params: HoppeParams):
        self.params = params
        self.exact = params.exact

    def next_distribution(self, history: History) -> dict:
        i = history.last
        return hoppe_predictive(self.params, history.row(i), i)

    def probability(self, history: History, y):
        i = history.last
        a = self.params.alpha_of(i)
        return (a * self.params.q_of(i, y) + history.count(i, y)) / (a + history.out_totals.get(i, 0))

    def sample_next(self, history: History, rng: np.random.Generator):
        if self.params.finite:
            return super().sample_next(history, rng)
        # urn mechanics: black ball -> fresh color from q_i, else copy a past successor
        i = history.last
        a = float(self.params.alpha_of(i))
        tot = history.out_totals.get(i, 0)
        u = rng.random() * (a + tot)
        if u < a:
            return self.params.base.sample(rng, i)
        u -= a
        acc = 0
        for j, c in history.row(i).items():
            acc += c
            if u < acc:
                return j
        return j

    def as_colored(self) -> "ColoredWalk":
        """The same rule as a monochromatic colored walk with ``beta_ij = alpha_i q_i(j)``."""
        if not self.params.finite:
            raise ModelError("only finite urns have a colored-graph form")
        edges = []
        for i in self.params.states:
            a = self.params.alpha_of(i)
            for j, p in self.params.q.get(i, {}).items():
                edges.append((i, j, "urn", a * p))
        graph = ColoredGraph(edges, {"urn": 1}, vertices=self.params.states, exact=self.exact)
        return ColoredWalk(graph)


# -- colored edge reinforced walk --------------------------------------------------


def colored_predictive(graph: ColoredGraph, counts, i, increment=1) -> dict:
    """Two-factor rule: reinforced color choice times reinforced edge choice."""
    return graph.predictive(i, _count_map(counts), increment)


class ColoredWalk(PredictiveScheme):
    """Random walk on a colored graph reinforcing both the color and the edge crossed."""

    def __init__(self, graph: ColoredGraph, increment=1):
        self.graph = graph
        self.exact = graph.exact
        self.increment = increment
        cs = [frozenset(graph.colors_of(v)) for v in graph.vertices if graph.colors_of(v)]
        disjoint = all(a.isdisjoint(b) for a, b in itertools.combinations(cs, 2))
        self.sufficiency = Sufficiency.LAST_ROW if disjoint else Sufficiency.LAST_T

    def next_distribution(self, history: History) -> dict:
        return colored_predictive(self.graph, history, history.last, self.increment)

    def probability(self, history: History, y):
        i = history.last
        if not self.graph.has_edge(i, y):
            if not self.graph.out_edges(i):
                raise ModelError(f"vertex {i!r} has no outgoing edges")
            return 0
        return self.next_distribution(history)[y]


# -- counterexample and table-driven schemes --------------------------------------


class CounterexampleScheme(PredictiveScheme):
    """At step ``n`` move uniformly to one of the first ``n`` non-initial states.

    Labels default to the integers (start ``0``, targets ``1, 2, ...``); pass
    ``labels`` to rename them, ``labels[0]`` being the start.  The rule reads
    only the step number, which the transition table determines, so it is
    one-step sufficient for ``(last, T)`` yet not Markov exchangeable.
    """

    sufficiency = Sufficiency.LAST_T

    def __init__(self, labels: Sequence | None = None):
        self.labels = tuple(labels) if labels is not None else None

    def _label(self, k: int):
        if self.labels is None:
            return k
        if k >= len(self.labels):
            raise ModelError(f"counterexample needs state #{k} but only {len(self.labels)} labels exist")
        return self.labels[k]

    def next_distribution(self, history: History) -> dict:
        n = history.n + 1
        p = Fraction(1, n)
        return {self._label(k): p for k in range(1, n + 1)}

    def probability(self, history: History, y):
        n = history.n + 1
        targets = {self._label(k) for k in range(1, n + 1)}
        return Fraction(1, n) if y in targets else Fraction(0)


def counterexample_scheme(labels: Sequence | None = None) -> CounterexampleScheme:
    return CounterexampleScheme(labels)


class TableScheme(PredictiveScheme):
    """Scheme given by an explicit table ``steps tuple -> distribution``.

    Histories absent from the table fall back to ``default(history)`` when
    supplied, otherwise raise :class:`ModelError`.
    """

    def __init__(self, table: Mapping, default: Callable | None = None,
                 sufficiency: Sufficiency = Sufficiency.FULL, exact: bool = True):
        self.table = {tuple(k): dict(v) for k, v in table.items()}
        self.default = default
        self.sufficiency = sufficiency
        self.exact = exact

    def next_distribution(self, history: History) -> dict:
        key = tuple(history.steps)
        try:
            return self.table[key]
        except KeyError:
            if self.default is not None:
                return self.default(history)
            raise ModelError(f"no table entry for history {key!r}") from None


class FunctionScheme(PredictiveScheme):
    """Wrap a plain callable ``history -> distribution``."""

    def __init__(self, fn: Callable, sufficiency: Sufficiency = Sufficiency.FULL, exact: bool = True):
        self.fn = fn
        self.sufficiency = sufficiency
        self.exact = exact

    def next_distribution(self, history: History) -> dict:
        return self.fn(history)


def table_from_scheme(scheme: PredictiveScheme, space: StateSpace, x0, max_len: int) -> TableScheme:
    """Materialise ``scheme`` on every history of at most ``max_len - 1`` steps."""
    table = {}
    h = History(x0)

    def rec(depth):
        table[tuple(h.steps)] = dict(scheme.next_distribution(h))
        if depth == max_len - 1:
            return
        for s in space:
            h.push(s)
            rec(depth + 1)
            h.pop()

    rec(0)
    return TableScheme(table, exact=scheme.exact)


# -- evaluation and simulation -----------------------------------------------------


def log_path_probability(scheme: PredictiveScheme, path: Path) -> float:
    h = History(path.x0)
    total = 0.0
    for y in path.steps:
        p = scheme.probability(h, y)
        if p <= 0:
            return -math.inf
        total += math.log(p)
        h.push(y)
    return total


def path_probability(scheme: PredictiveScheme, path: Path):
    """Chain-rule probability of ``path``.

    Exact schemes give a :class:`Fraction`; float schemes are accumulated in
    log space.  The empty path has probability one.
    """
    if not scheme.exact:
        return math.exp(log_path_probability(scheme, path))
    h = History(path.x0)
    prob = Fraction(1)
    for y in path.steps:
        p = scheme.probability(h, y)
        if p == 0:
            return Fraction(0)
        prob *= p
        h.push(y)
    return prob


def _kernel_walk(scheme: PredictiveScheme) -> "ColoredWalk | None":
    if isinstance(scheme, ColoredWalk):
        return scheme
    if isinstance(scheme, HoppeScheme) and scheme.params.finite:
        return scheme.as_colored()
    return None


def simulate(scheme: PredictiveScheme, x0, n: int, seed=None) -> Path:
    """Sample ``n`` steps from ``x0``.

    Colored walks and finite Hoppe urns run on the compiled kernel (two
    uniforms per step); other schemes draw one uniform per step and invert the
    exact predictive CDF.  The same inputs always give the same path.
    """
    if n < 0:
        raise InputError("n must be non-negative")
    rng = make_rng(seed)
    if n == 0:
        return Path(x0, ())
    walk = _kernel_walk(scheme)
    if walk is not None:
        g = walk.graph
        path, _, _ = kernels.run_colored_walk(
            g.compiled, g.vertex_index(x0), rng.random(2 * n), float(walk.increment)
        )
        return Path(x0, tuple(g.vertices[k] for k in path.tolist()))
    h = History(x0)
    for _ in range(n):
        h.push(scheme.sample_next(h, rng))
    return h.path()
