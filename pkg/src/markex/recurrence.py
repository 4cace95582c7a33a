"""Single-path recurrence diagnostics.

A walk is recurrent when the predictive mass it puts on returning to ``x0``
sums to infinity along the path.  A finite simulation can only show partial
sums, so every trace here is tagged as a diagnostic rather than a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .core import History
from .errors import InputError
from .rng import make_rng, split
from .schemes import PredictiveScheme, _kernel_walk

TAG = "diagnostic, not proof"


@dataclass
class RecurrenceTrace:
    """``partial_sums[N - 1] = S_N = sum_{n < N} p(x0 | x0, x_1..x_n)``.

    ``returns`` holds the times ``n >= 1`` with ``x_n = x0``.
    """

    x0: object
    summands: np.ndarray
    partial_sums: np.ndarray
    returns: np.ndarray
    tag: str = TAG


@dataclass
class ReturnTrace:
    """Predictive mass on ``j`` at each visit of ``i`` (times ``< n_steps``)."""

    i: object
    j: object
    visit_times: np.ndarray
    summands: np.ndarray
    partial_sums: np.ndarray = field(init=False)
    tag: str = TAG

    def __post_init__(self):
        self.partial_sums = np.cumsum(self.summands)

    @property
    def empty(self) -> bool:
        return len(self.visit_times) == 0


def _walk_with_target(scheme: PredictiveScheme, x0, target, n_steps: int, seed):
    """Simulate ``n_steps`` steps and the predictive mass on ``target`` before each.

    Returns ``(states, summands)`` where ``states[t]`` is the state occupied
    at time ``t`` (length ``n_steps + 1``).  Kernel-backed schemes consume the
    same uniforms as :func:`markex.schemes.simulate`, so the path matches it.
    """
    if n_steps < 1:
        raise InputError("n_steps must be at least 1")
    rng = make_rng(seed)
    walk = _kernel_walk(scheme)
    if walk is not None:
        g = walk.graph
        tgt = g.vertex_index(target) if target in g.vertices else -1
        path, trace, _ = kernels.run_colored_walk(
            g.compiled, g.vertex_index(x0), rng.random(2 * n_steps), float(walk.increment), tgt
        )
        states = [x0] + [g.vertices[k] for k in path.tolist()]
        return states, trace
    h = History(x0)
    summands = np.empty(n_steps)
    for t in range(n_steps):
        summands[t] = float(scheme.probability(h, target))
        h.push(scheme.sample_next(h, rng))
    return h.path().states, summands


def recurrence_sum_trace(scheme: PredictiveScheme, x0, n_steps: int, seed=None) -> RecurrenceTrace:
    """Partial sums of the return-probability series along one simulated path."""
    states, summands = _walk_with_target(scheme, x0, x0, n_steps, seed)
    returns = np.array([t for t in range(1, len(states)) if states[t] == x0], dtype=np.int64)
    return RecurrenceTrace(x0, summands, np.cumsum(summands), returns)


def recurrence_sum_traces(
    scheme: PredictiveScheme, x0, n_steps: int, replicates: int, seed=None
) -> list[RecurrenceTrace]:
    """Independent replicates; replicate ``k`` uses child stream ``k`` of ``seed``."""
    return [recurrence_sum_trace(scheme, x0, n_steps, s) for s in split(seed, replicates)]


def return_diagnostic(scheme: PredictiveScheme, i, j, x0, n_steps: int, seed=None) -> ReturnTrace:
    """Accumulate ``P(next = j | history)`` over the visits of the path to ``i``.

    Divergence of the sum along visits points to one of two outcomes: ``i`` is
    visited finitely often, or ``j`` infinitely often.
    """
    states, summands = _walk_with_target(scheme, x0, j, n_steps, seed)
    times = np.array([t for t in range(n_steps) if states[t] == i], dtype=np.int64)
    return ReturnTrace(i, j, times, summands[times] if len(times) else np.zeros(0))


def is_irreducible(q, atol: float = 1e-9) -> bool:
    """Whether the positive entries of the row-stochastic ``q`` form a strongly connected graph."""
    try:
        m = np.array([[float(x) for x in row] for row in q], dtype=np.float64)
    except (TypeError, ValueError):
        raise InputError("Q must be a square matrix of numbers") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InputError(f"Q must be a non-empty square matrix, got shape {m.shape}")
    if (m < 0).any():
        raise InputError("Q has negative entries")
    sums = m.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        raise InputError(f"row {int(bad[0])} of Q sums to {sums[bad[0]]!r}, not 1")
    n_comp, _ = connected_components(csr_matrix(m > 0), directed=True, connection="strong")
    return n_comp == 1
