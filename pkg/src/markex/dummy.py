"""Dummy states: inflating a colored graph to shape the prior of the observed walk.

Dummy vertices ``i*`` are inserted between ``i`` and ``j`` (the direct edge is
kept) and walked on by the reinforced walk on the augmented graph ``G*``.
Deleting dummy visits gives a walk on the original states whose transition
matrix is ``P[i, j] = P*[i, j] + sum_{i* between i and j} P*[i, i*]``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .bayes import PartitionedPrior, TransitionMatrixSample, posterior_update
from .core import DEFAULT_BUDGET, Path, transition_counts
from .errors import InputError, ModelError, ResourceError
from .exchangeability import is_partitioned_colors
from .graph import ColoredGraph
from .rng import make_rng
from .schemes import ColoredWalk, path_probability


@dataclass(frozen=True)
class Placement:
    """``count`` dummies on edge ``(src, dst)``; edges in/out get ``colors`` and ``betas``."""

    src: object
    dst: object
    count: int = 1
    colors: tuple = ("c_in", "c_out")
    betas: tuple = (1, 1)
    labels: tuple | None = None

    def default_labels(self) -> tuple:
        if self.count == 1:
            return (f"{self.src}*",) if self.src == self.dst else (f"{self.src}*{self.dst}",)
        return tuple(f"{self.src}*{self.dst}.{k}" for k in range(1, self.count + 1))


class AugmentedGraph:
    """A base graph ``G`` together with its dummy-inflated version ``G*``."""

    def __init__(self, base: ColoredGraph, graph: ColoredGraph, dummy_sets: Mapping):
        self.base = base
        self.graph = graph
        self.dummy_sets: dict = {k: tuple(v) for k, v in dummy_sets.items() if v}
        self.dummy_edge = {d: e for e, ds in self.dummy_sets.items() for d in ds}

    def __repr__(self) -> str:
        return f"AugmentedGraph({self.base!r}, dummies={len(self.dummy_edge)})"

    @property
    def dummies(self) -> tuple:
        return tuple(self.dummy_edge)

    def is_dummy(self, s) -> bool:
        return s in self.dummy_edge

    def options(self, i, j) -> tuple:
        """Possible successors of ``i`` in ``G*`` when ``j`` is observed next: ``j`` first."""
        return (j, *self.dummy_sets.get((i, j), ()))

    def is_partitioned(self) -> bool:
        return is_partitioned_colors(self.graph)

    def scheme(self) -> ColoredWalk:
        return ColoredWalk(self.graph)

    def project(self, path: Path) -> Path:
        """Delete dummy visits."""
        if self.is_dummy(path.x0):
            raise InputError("paths must start at an original state")
        return Path(path.x0, tuple(s for s in path.steps if not self.is_dummy(s)))

    def completion(self, x: Path, choices: Sequence[int]) -> Path:
        """Expand ``x`` by choice indices, one per traversal of an inflated edge."""
        out = []
        k = 0
        for i, j in x.transitions():
            opts = self.options(i, j)
            if len(opts) > 1:
                c = choices[k]
                k += 1
                if c:
                    out.append(opts[c])
            out.append(j)
        if k != len(choices):
            raise InputError(f"expected {k} choices, got {len(choices)}")
        return Path(x.x0, tuple(out))


def augment(
    base: ColoredGraph,
    placements: Sequence[Placement] = (),
    alpha: Mapping | None = None,
    require_partitioned: bool = False,
) -> AugmentedGraph:
    """Insert dummy vertices on the placed edges.

    ``alpha`` declares weights of colors that appear only on dummy edges (it
    may also override existing ones).  With ``require_partitioned`` the
    augmented graph must have partitioned colors, which makes its walk Markov
    exchangeable.
    """
    colors = dict(base.alpha)
    colors.update(alpha or {})
    edges = [(e.src, e.dst, e.color, e.beta) for e in base.edges]
    vertices = list(base.vertices)
    taken = set(vertices)
    dummy_sets: dict = {}
    for pl in placements:
        if not base.has_edge(pl.src, pl.dst):
            raise InputError(f"cannot place dummies on missing edge ({pl.src!r}, {pl.dst!r})")
        if pl.count < 0:
            raise InputError(f"dummy count must be non-negative on ({pl.src!r}, {pl.dst!r})")
        if pl.count == 0:
            continue
        if len(pl.colors) != 2 or len(pl.betas) != 2:
            raise InputError("a placement needs two edge colors and two betas")
        for c in pl.colors:
            if c not in colors:
                raise InputError(f"dummy edge color {c!r} has no alpha weight")
        labels = tuple(pl.labels) if pl.labels is not None else pl.default_labels()
        if len(labels) != pl.count:
            raise InputError(f"expected {pl.count} dummy labels on ({pl.src!r}, {pl.dst!r})")
        for d in labels:
            if d in taken:
                raise InputError(f"dummy label {d!r} clashes with an existing vertex")
            taken.add(d)
            vertices.append(d)
            edges.append((pl.src, d, pl.colors[0], pl.betas[0]))
            edges.append((d, pl.dst, pl.colors[1], pl.betas[1]))
        dummy_sets.setdefault((pl.src, pl.dst), ())
        dummy_sets[(pl.src, pl.dst)] += labels
    graph = ColoredGraph(edges, colors, vertices, exact=base.exact)
    aug = AugmentedGraph(base, graph, dummy_sets)
    if require_partitioned and not aug.is_partitioned():
        raise ModelError("the augmented graph does not have partitioned colors")
    return aug


def loop_inflation(base: ColoredGraph, c_in="c2", c_out="c3", alpha_in=1, alpha_out=1,
                   betas=(1, 1)) -> AugmentedGraph:
    """One dummy per vertex on its loop, loop-in edges colored ``c_in``, loop-out ``c_out``.

    Every vertex of ``base`` must carry a loop.  For a monochromatic base the
    result has partitioned colors ``({c, c_in}, {c_out})``.
    """
    placements = [Placement(v, v, 1, (c_in, c_out), betas) for v in base.vertices]
    return augment(base, placements, alpha={c_in: alpha_in, c_out: alpha_out})


# -- completions --------------------------------------------------------------------


def _inflated_counts(aug: AugmentedGraph, x: Path) -> dict:
    t = transition_counts(x).counts
    return {e: t.get(e, 0) for e in aug.dummy_sets}


def count_completions(aug: AugmentedGraph, x: Path) -> int:
    """``|A(x0, x)| = prod (1 + |I*_ij|) ** T_ij``."""
    return math.prod((1 + len(aug.dummy_sets[e])) ** t for e, t in _inflated_counts(aug, x).items())


def consistent_strings(aug: AugmentedGraph, x: Path, budget: int = DEFAULT_BUDGET) -> Iterator[Path]:
    """Every string on ``S*`` that projects to ``x``, in lexicographic order of choices."""
    total = count_completions(aug, x)
    if total > budget:
        raise ResourceError(f"{total} consistent strings exceed the budget of {budget}")
    ranges = [range(len(aug.options(i, j))) for i, j in x.transitions() if len(aug.options(i, j)) > 1]
    return (aug.completion(x, choices) for choices in itertools.product(*ranges))


def class_size(t: Mapping, m: Mapping) -> int:
    """``N_m``: number of completions with the given visit counts per dummy.

    ``t`` maps each inflated edge to its traversal count, ``m`` maps the same
    edges to the visit counts of their dummies (one entry per dummy).
    """
    n = 1
    for e, ms in m.items():
        ms = tuple(ms)
        total = t.get(e, 0)
        if any(k < 0 for k in ms) or sum(ms) > total:
            raise InputError(f"visit counts {ms} are infeasible for {total} traversals of {e!r}")
        n *= math.factorial(total) // (
            math.factorial(total - sum(ms)) * math.prod(math.factorial(k) for k in ms)
        )
    return n


@dataclass(frozen=True)
class CompletionClass:
    """Completions sharing the dummy visit counts ``m``."""

    m: tuple
    representative: Path
    size: int


def completion_classes(aug: AugmentedGraph, x: Path, budget: int = DEFAULT_BUDGET) -> list[CompletionClass]:
    """Every feasible ``m`` with its class size and lexicographically first member.

    ``m`` is a tuple of ``(edge, per-dummy counts)`` pairs in placement order.
    The representative uses the direct edge on the earliest traversals and
    then the dummies in order.
    """
    t = _inflated_counts(aug, x)
    edges = list(aug.dummy_sets)
    per_edge = []
    n_classes = 1
    for e in edges:
        k = len(aug.dummy_sets[e])
        n_classes *= math.comb(t[e] + k, k)
        per_edge.append([ms for ms in itertools.product(range(t[e] + 1), repeat=k) if sum(ms) <= t[e]])
    if n_classes > budget:
        raise ResourceError(f"{n_classes} completion classes exceed the budget of {budget}")
    # traversal slots of each edge, in time order
    slots: dict = {e: [] for e in edges}
    k = 0
    for pair in x.transitions():
        if pair in aug.dummy_sets:
            slots[pair].append(k)
            k += 1
    out = []
    for combo in itertools.product(*per_edge):
        choices = [0] * k
        for e, ms in zip(edges, combo):
            pos = slots[e][t[e] - sum(ms):]
            labels = [d for d, c in enumerate(ms, start=1) for _ in range(c)]
            for p, c in zip(pos, labels):
                choices[p] = c
        m = tuple(zip(edges, combo))
        out.append(CompletionClass(m, aug.completion(x, choices), class_size(t, dict(m))))
    return out


def marginal_probability(
    aug: AugmentedGraph, x: Path, method: str = "grouped", budget: int = DEFAULT_BUDGET
):
    """``p(x)`` of the projected walk.

    ``"enumerate"`` sums ``p*`` over all consistent strings; ``"grouped"``
    sums ``p*(representative) * N_m`` over visit-count classes, which is valid
    when ``G*`` has partitioned colors.
    """
    walk = aug.scheme()
    if method == "enumerate":
        zero = Fraction(0) if walk.exact else 0.0
        return sum((path_probability(walk, s) for s in consistent_strings(aug, x, budget)), zero)
    if method != "grouped":
        raise InputError(f"unknown method {method!r}")
    if not aug.is_partitioned():
        raise ModelError("grouping by visit counts needs partitioned colors on the augmented graph")
    zero = Fraction(0) if walk.exact else 0.0
    return sum(
        (path_probability(walk, cl.representative) * cl.size for cl in completion_classes(aug, x, budget)),
        zero,
    )


def conditional_law(aug: AugmentedGraph, x: Path, budget: int = DEFAULT_BUDGET) -> dict:
    """Exact ``p(x* | x)`` over all consistent strings with positive probability."""
    walk = aug.scheme()
    probs = {s: path_probability(walk, s) for s in consistent_strings(aug, x, budget)}
    total = sum(probs.values())
    if total == 0:
        raise ModelError("the observed path has probability zero")
    return {s: p / total for s, p in probs.items() if p}


# -- transition matrices ------------------------------------------------------------


def fold_dummies(aug: AugmentedGraph, matrices: np.ndarray) -> np.ndarray:
    """Fold dummy mass into the inflated entries; works on stacks ``(..., n*, n*)``."""
    g = aug.graph
    n = len(aug.base.vertices)
    out = np.array(matrices[..., :n, :n], copy=True)
    for (i, j), ds in aug.dummy_sets.items():
        a, b = g.vertex_index(i), g.vertex_index(j)
        for d in ds:
            out[..., a, b] = out[..., a, b] + matrices[..., a, g.vertex_index(d)]
    return out


def induced_transition(aug: AugmentedGraph, sample: TransitionMatrixSample) -> TransitionMatrixSample:
    if tuple(sample.states) != aug.graph.vertices:
        raise InputError("sample states do not match the augmented graph")
    return TransitionMatrixSample(aug.base.vertices, fold_dummies(aug, sample.matrix))


# -- Gibbs sampling of the unobserved dummy visits -------------------------------


@dataclass
class GibbsResult:
    """Recorded sweeps: ``choices[s, k]`` indexes ``aug.options`` at unknown ``k``."""

    aug: AugmentedGraph
    x: Path
    choices: np.ndarray
    burn_in: int
    _cache: dict = field(default_factory=dict, repr=False)

    def completions(self) -> list[Path]:
        return [self.aug.completion(self.x, tuple(c)) for c in self.choices.tolist()]

    def frequencies(self) -> dict:
        if "freq" not in self._cache:
            n = len(self.choices)
            counts = Counter(map(tuple, self.choices.tolist()))
            self._cache["freq"] = {
                self.aug.completion(self.x, c): k / n for c, k in sorted(counts.items())
            }
        return self._cache["freq"]


def _closed_form_weights(graph: ColoredGraph, h_counts: Mapping, i, opts):
    pred = graph.predictive(i, h_counts)
    return [pred.get(k, 0) for k in opts]


def gibbs_successors(
    aug: AugmentedGraph,
    x: Path,
    sweeps: int,
    seed=None,
    burn_in: int | None = None,
) -> GibbsResult:
    """Systematic-scan Gibbs sampler over the unobserved successors of inflated edges.

    Each unknown successor of ``i`` (observed next state ``j``) is redrawn
    among ``j`` and the dummies between ``i`` and ``j`` with weight equal to
    the walk's predictive from ``i`` computed on the counts of every other
    successor.  With partitioned colors on ``G*`` this is the exact full
    conditional (a dummy's only out-edge contributes a factor of one); on
    other graphs the weights are exact joint probabilities instead.  Sweeps
    run left to right; ``burn_in`` defaults to ten times the number of
    unknowns.
    """
    rng = make_rng(seed)
    g = aug.graph
    trans = list(x.transitions())
    unknown = [(t, i, j) for t, (i, j) in enumerate(trans) if len(aug.options(i, j)) > 1]
    n_unknown = len(unknown)
    burn_in = 10 * n_unknown if burn_in is None else burn_in
    if sweeps < 1:
        raise InputError("sweeps must be at least 1")
    state = [0] * n_unknown
    if n_unknown == 0:
        return GibbsResult(aug, x, np.zeros((sweeps, 0), dtype=np.int64), burn_in)
    walk = aug.scheme()
    if path_probability(walk, aug.completion(x, state)) == 0:
        raise ModelError("the observed path is not realizable on the augmented graph")
    closed = aug.is_partitioned()
    joint: dict = {}  # exact joint probabilities, only used without partitioned colors
    # transition counts of the current completion
    counts: Counter = Counter()
    for a, b in aug.completion(x, state).transitions():
        counts[(a, b)] += 1
    out = np.empty((sweeps, n_unknown), dtype=np.int64)
    for s in range(burn_in + sweeps):
        for k, (t, i, j) in enumerate(unknown):
            opts = aug.options(i, j)
            cur = opts[state[k]]
            counts[(i, cur)] -= 1
            if cur != j:
                counts[(cur, j)] -= 1
            if closed:
                w = _closed_form_weights(g, counts, i, opts)
            else:
                w = []
                for c in range(len(opts)):
                    trial = state.copy()
                    trial[k] = c
                    key = tuple(trial)
                    if key not in joint:
                        joint[key] = path_probability(walk, aug.completion(x, trial))
                    w.append(joint[key])
            w = np.asarray([float(v) for v in w])
            c = int(np.searchsorted(np.cumsum(w), rng.random() * w.sum(), side="right"))
            c = min(c, len(opts) - 1)
            state[k] = c
            new = opts[c]
            counts[(i, new)] += 1
            if new != j:
                counts[(new, j)] += 1
        if s >= burn_in:
            out[s - burn_in] = state
    return GibbsResult(aug, x, out, burn_in)


# -- posterior mixtures -------------------------------------------------------------


def posterior_mixture(aug: AugmentedGraph, weights: Mapping[Path, object]) -> list[tuple[PartitionedPrior, object]]:
    """Conjugate posteriors on ``G*``, one per completion, with their mixture weights.

    ``weights`` is either :func:`conditional_law` (exact) or
    :meth:`GibbsResult.frequencies` (Monte Carlo).
    """
    out = []
    for s, w in weights.items():
        prior = PartitionedPrior(aug.graph, s.x0)
        out.append((posterior_update(prior, s), w))
    return out


def posterior_mean_induced(aug: AugmentedGraph, prior: PartitionedPrior) -> np.ndarray:
    """Mean of the induced matrix on ``S`` under one conjugate posterior on ``G*``."""
    return fold_dummies(aug, prior.mean())
