"""Conjugate prior for the transition matrix of a colored reinforced walk.

With partitioned colors the walk is a mixture of Markov chains whose random
transition matrix factorises as

    P[i, j] = P_m(c(i, j)) * P(j | i, c(i, j)),

where ``(P_m(c), c in C_m)`` is Dirichlet(alpha) once per color group and
``(P(j | i, c), j in A_{i,c})`` is Dirichlet(beta) per vertex and color.  The
posterior after observing a path is the same family with counts added.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .core import BOUNDARY, History, Path, StateSpace, transition_counts
from .errors import InputError, ModelError
from .exchangeability import color_partition
from .graph import ColoredGraph
from .rng import make_rng, split
from .schemes import ColoredWalk, PredictiveScheme


@dataclass(frozen=True)
class TransitionMatrixSample:
    """A transition matrix with labelled rows and columns.

    ``matrix`` is a float array for sampled matrices, or an object array of
    :class:`Fraction` for exact estimates.
    """

    states: tuple
    matrix: np.ndarray

    def index(self, s) -> int:
        try:
            return self.states.index(s)
        except ValueError:
            raise InputError(f"unknown state {s!r}") from None

    def __getitem__(self, pair):
        i, j = pair
        return self.matrix[self.index(i), self.index(j)]

    def row(self, i) -> dict:
        r = self.matrix[self.index(i)]
        return {s: r[k] for k, s in enumerate(self.states) if r[k] != 0}

    def row_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=1)


class PartitionedPrior:
    """Dirichlet-mixture prior of a colored walk with partitioned colors, started at ``x0``."""

    def __init__(self, graph: ColoredGraph, x0):
        groups = color_partition(graph)
        if groups is None:
            raise ModelError("the graph's outgoing color sets are not partitioned")
        graph.vertex_index(x0)
        self.graph = graph
        self.x0 = x0
        # keep each group's colors in declaration order for reproducible draws
        self.groups: tuple[tuple, ...] = tuple(
            tuple(c for c in graph.alpha if c in g) for g in groups
        )

    def __repr__(self) -> str:
        return f"PartitionedPrior({self.graph!r}, x0={self.x0!r}, groups={len(self.groups)})"

    @property
    def alpha(self) -> dict:
        return dict(self.graph.alpha)

    @property
    def beta(self) -> dict:
        return {(e.src, e.dst): e.beta for e in self.graph.edges}

    def group_of(self, i) -> int | None:
        cs = set(self.graph.colors_of(i))
        for m, g in enumerate(self.groups):
            if cs == set(g):
                return m
        return None

    def scheme(self) -> ColoredWalk:
        """The colored reinforced walk whose de Finetti measure is this prior."""
        return ColoredWalk(self.graph)

    def mean(self) -> np.ndarray:
        """Prior mean of the transition matrix (exact for exact graphs)."""
        g = self.graph
        n = len(g.vertices)
        zero = Fraction(0) if g.exact else 0.0
        out = np.full((n, n), zero, dtype=object if g.exact else np.float64)
        for i in g.vertices:
            a_tot = g.alpha_total(i)
            for e in g.out_edges(i):
                out[g.vertex_index(i), g.vertex_index(e.dst)] = (
                    g.alpha[e.color] / a_tot * e.beta / g.beta_total(i, e.color)
                )
        return out

    def sample(self, size: int, seed=None) -> np.ndarray:
        """``size`` sampled matrices as an array of shape ``(size, n, n)``.

        Dirichlet vectors are normalised independent Gamma draws; cells of
        one-element Dirichlet vectors are set to 1 without drawing.
        """
        rng = make_rng(seed)
        g = self.graph
        comp = g.compiled
        n = comp.n_vertices
        color_p = np.ones((size, comp.n_colors))
        cidx = {c: k for k, c in enumerate(g.alpha)}
        for group in self.groups:
            if len(group) == 1:
                continue
            cols = [cidx[c] for c in group]
            draws = rng.standard_gamma(comp.alpha[cols], size=(size, len(cols)))
            color_p[:, cols] = draws / draws.sum(axis=1, keepdims=True)
        edge_p = np.ones((size, len(comp.edge_dst)))
        for k in range(len(comp.slot_color)):
            lo, hi = comp.slot_ptr[k], comp.slot_ptr[k + 1]
            if hi - lo < 2:
                continue
            draws = rng.standard_gamma(comp.beta[lo:hi], size=(size, hi - lo))
            edge_p[:, lo:hi] = draws / draws.sum(axis=1, keepdims=True)
        out = np.zeros((size, n, n))
        for k in range(len(comp.slot_color)):
            lo, hi = comp.slot_ptr[k], comp.slot_ptr[k + 1]
            c = comp.slot_color[k]
            for e in range(lo, hi):
                out[:, comp.edge_src[e], comp.edge_dst[e]] = color_p[:, c] * edge_p[:, e]
        return out


def sample_transition_matrix(prior: PartitionedPrior, seed=None) -> TransitionMatrixSample:
    return TransitionMatrixSample(prior.graph.vertices, prior.sample(1, seed)[0])


def posterior_update(prior: PartitionedPrior, path: Path) -> PartitionedPrior:
    """Add the path's transition counts to alpha (per color) and beta (per edge)."""
    if path.x0 != prior.x0:
        raise InputError(f"path starts at {path.x0!r} but the prior starts at {prior.x0!r}")
    g = prior.graph
    alpha = dict(g.alpha)
    beta = {}
    for (i, j), c in transition_counts(path).counts.items():
        if not g.has_edge(i, j):
            raise InputError(f"path uses missing edge ({i!r}, {j!r})")
        e = g.edge(i, j)
        alpha[e.color] += c
        beta[(i, j)] = e.beta + c
    return PartitionedPrior(g.with_weights(alpha, beta), path.last)


def estimate_transition_matrix(path: Path, space: StateSpace) -> TransitionMatrixSample:
    """Empirical transition frequencies on ``S`` plus the absorbing symbol.

    Rows of states never left put all their mass on the absorbing symbol,
    which also maps to itself; every row sums to exactly one.
    """
    path.validate(space)
    states = space.enlarged()
    n = len(states)
    idx = {s: k for k, s in enumerate(states)}
    m = np.full((n, n), Fraction(0), dtype=object)
    tc = transition_counts(path)
    for i in space:
        tot = tc.row_sum(i)
        if tot == 0:
            m[idx[i], idx[BOUNDARY]] = Fraction(1)
            continue
        for j, c in tc.row(i).items():
            m[idx[i], idx[j]] = Fraction(c, tot)
    m[idx[BOUNDARY], idx[BOUNDARY]] = Fraction(1)
    return TransitionMatrixSample(states, m)


def hat_t_replicates(
    graph: ColoredGraph, x0, n_steps: int, replicates: int, pairs, seed=None
) -> np.ndarray:
    """Empirical frequencies ``T_ij / T_i.`` after ``n_steps`` steps, one row per replicate.

    Replicate ``k`` runs on child stream ``k`` of ``seed``; entries are NaN
    when ``i`` was never left.
    """
    comp = graph.compiled
    eidx = {}
    for e in range(len(comp.edge_dst)):
        eidx[(int(comp.edge_src[e]), int(comp.edge_dst[e]))] = e
    cols = []
    for i, j in pairs:
        key = (graph.vertex_index(i), graph.vertex_index(j))
        if key not in eidx:
            raise InputError(f"missing edge ({i!r}, {j!r})")
        cols.append((key[0], eidx[key]))
    out = np.empty((replicates, len(cols)))
    start = graph.vertex_index(x0)
    for r, ss in enumerate(split(seed, replicates)):
        rng = make_rng(ss)
        _, _, state = kernels.run_colored_walk(comp, start, rng.random(2 * n_steps))
        row_tot = np.bincount(comp.edge_src, weights=state.edge_counts, minlength=comp.n_vertices)
        for k, (i, e) in enumerate(cols):
            out[r, k] = state.edge_counts[e] / row_tot[i] if row_tot[i] else np.nan
    return out


def successor_predictive_trace(scheme: PredictiveScheme, path: Path, i, j) -> list:
    """``P(next = j | past)`` at every visit of ``path`` to ``i``, the final state included."""
    h = History(path.x0)
    trace = []
    for y in (*path.steps, None):
        if h.last == i:
            trace.append(scheme.probability(h, j))
        if y is not None:
            h.push(y)
    return trace
