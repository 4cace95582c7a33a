"""State spaces, paths, transition counts and the Markov equivalence relation.

Paths are sequences ``(x0, x1, ..., xn)`` with a fixed start ``x0``; two paths
are equivalent when they share the start and exhibit the same number of
``i -> j`` transitions for every ordered pair.  Everything downstream (checkers,
estimators, dummy-state bookkeeping) is phrased in terms of the objects here.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InputError, ResourceError

State = Hashable

#: Reserved absorbing symbol used by the estimator's enlarged state space.
BOUNDARY = "∂"

#: Default cap on the number of strings an exhaustive enumeration may visit.
DEFAULT_BUDGET = 2_000_000


class StateSpace:
    """Finite ordered set of state labels.

    The order of ``labels`` is the order used for every lexicographic
    comparison (witness selection, canonical representatives).
    """

    __slots__ = ("labels", "has_boundary", "_index")

    def __init__(self, labels: Iterable[State], has_boundary: bool = False):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate state labels in {labels!r}")
        if BOUNDARY in labels:
            raise InputError(f"{BOUNDARY!r} is reserved and cannot be a state label")
        if len(labels) < 2:
            raise InputError("a state space needs at least two states")
        self.labels = labels
        self.has_boundary = has_boundary
        self._index = {s: k for k, s in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[State]:
        return iter(self.labels)

    def __contains__(self, s: object) -> bool:
        try:
            return s in self._index
        except TypeError:
            return False

    def __repr__(self) -> str:
        return f"StateSpace({list(self.labels)!r}, has_boundary={self.has_boundary})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, StateSpace)
            and self.labels == other.labels
            and self.has_boundary == other.has_boundary
        )

    def __hash__(self) -> int:
        return hash((self.labels, self.has_boundary))

    def index(self, s: State) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise InputError(f"unknown state label {s!r}") from None

    def sort_key(self, seq: Sequence[State]) -> tuple[int, ...]:
        """Key ordering sequences lexicographically by label position."""
        return tuple(self._index[s] for s in seq)

    def enlarged(self) -> tuple[State, ...]:
        """Labels of ``S* = S + {∂}``."""
        return self.labels + (BOUNDARY,)

    @classmethod
    def range(cls, n: int) -> "StateSpace":
        return cls(range(n))


@dataclass(frozen=True)
class Path:
    """A finite trajectory ``(x0, steps...)``; ``steps`` may be empty."""

    x0: State
    steps: tuple = ()

    def __post_init__(self):
        if not isinstance(self.steps, tuple):
            object.__setattr__(self, "steps", tuple(self.steps))

    @classmethod
    def of(cls, *states: State) -> "Path":
        """``Path.of(0, 1, 0)`` is the path starting at 0 with steps (1, 0)."""
        if not states:
            raise InputError("a path needs at least its starting state")
        return cls(states[0], tuple(states[1:]))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def states(self) -> tuple:
        return (self.x0,) + self.steps

    @property
    def last(self) -> State:
        return self.steps[-1] if self.steps else self.x0

    def transitions(self) -> Iterator[tuple[State, State]]:
        s = self.states
        return zip(s[:-1], s[1:])

    def validate(self, space: StateSpace) -> "Path":
        for s in self.states:
            if s not in space:
                raise InputError(f"unknown state label {s!r}")
        return self

    def concat(self, steps: Iterable[State]) -> "Path":
        return Path(self.x0, self.steps + tuple(steps))


@dataclass(frozen=True)
class TransitionCounts:
    """Sparse table ``T[i, j]`` together with the start and last states."""

    counts: Mapping[tuple[State, State], int]
    start: State
    last: State
    _rows: dict = field(default=None, repr=False, compare=False)
    _cols: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rows: dict = defaultdict(int)
        cols: dict = defaultdict(int)
        for (i, j), c in self.counts.items():
            rows[i] += c
            cols[j] += c
        object.__setattr__(self, "_rows", dict(rows))
        object.__setattr__(self, "_cols", dict(cols))

    def __getitem__(self, pair: tuple[State, State]) -> int:
        return self.counts.get(pair, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def row(self, i: State) -> dict:
        return {j: c for (a, j), c in self.counts.items() if a == i}

    def row_sum(self, i: State) -> int:
        return self._rows.get(i, 0)

    def col_sum(self, i: State) -> int:
        return self._cols.get(i, 0)

    def states(self) -> set:
        out = {self.start, self.last}
        for i, j in self.counts:
            out.update((i, j))
        return out

    def key(self) -> tuple:
        """Hashable identity of the equivalence class (start + table)."""
        return (self.start, frozenset(self.counts.items()))

    def is_flow_consistent(self) -> bool:
        for s in self.states():
            diff = self.row_sum(s) - self.col_sum(s)
            want = (s == self.start) - (s == self.last)
            if diff != want:
                return False
        return True


def transition_counts(path: Path, space: StateSpace | None = None) -> TransitionCounts:
    """Count adjacent pairs of ``(x0, steps...)``."""
    if space is not None:
        path.validate(space)
    return TransitionCounts(dict(Counter(path.transitions())), path.x0, path.last)


def is_equivalent(p: Path, q: Path) -> bool:
    """True iff ``p`` and ``q`` share the start and the transition-count table."""
    if p.x0 != q.x0 or len(p) != len(q):
        return False
    return Counter(p.transitions()) == Counter(q.transitions())


def _product_size(space: StateSpace, n: int) -> int:
    return len(space) ** n


def enumerate_equivalence_classes(
    space: StateSpace, x0: State, n: int, budget: int = DEFAULT_BUDGET
) -> list[list[tuple]]:
    """Partition all ``|S|**n`` step sequences from ``x0`` into equivalence classes.

    Classes are returned in order of their lexicographically first member, and
    members within a class are sorted the same way.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    space.index(x0)
    size = _product_size(space, n)
    if size > budget:
        raise ResourceError(f"|S|^n = {size} strings exceeds the enumeration budget {budget}")
    classes: dict = {}
    # itertools.product yields in lexicographic label order already
    for steps in itertools.product(space.labels, repeat=n):
        key = frozenset(Counter(zip((x0,) + steps[:-1], steps)).items())
        classes.setdefault(key, []).append(steps)
    return list(classes.values())


@dataclass(frozen=True)
class SuccessorMatrix:
    """Observed successors ``V[i, n]`` and visit times ``tau_n(i)`` of a finite path.

    The final visit to the last state has no successor and is omitted from its
    row; states never visited have empty rows.
    """

    rows: Mapping[State, tuple]
    visit_times: Mapping[State, tuple]
    x0: State

    def row(self, i: State) -> tuple:
        return self.rows.get(i, ())

    def reconstruct(self) -> Path:
        """Rebuild the path by merging rows in visit-time order."""
        timed = []
        for i, times in self.visit_times.items():
            for t, succ in zip(times, self.rows.get(i, ())):
                timed.append((t + 1, succ))
        timed.sort()
        return Path(self.x0, tuple(s for _, s in timed))


def successor_matrix(path: Path) -> SuccessorMatrix:
    states = path.states
    rows: dict = defaultdict(list)
    times: dict = defaultdict(list)
    for t, s in enumerate(states):
        times[s].append(t)
        if t + 1 < len(states):
            rows[s].append(states[t + 1])
    return SuccessorMatrix(
        {k: tuple(v) for k, v in rows.items()},
        {k: tuple(v) for k, v in times.items()},
        path.x0,
    )


@dataclass(frozen=True)
class PatternPair:
    """One instance ``y = (u, w, i, v, w, i)``, ``y' = (v, w, i, u, w, i)``."""

    i: State
    u: tuple
    v: tuple
    w: tuple

    @property
    def y(self) -> tuple:
        return self.u + self.w + (self.i,) + self.v + self.w + (self.i,)

    @property
    def y_prime(self) -> tuple:
        return self.v + self.w + (self.i,) + self.u + self.w + (self.i,)

    @property
    def kind(self) -> str:
        """Which of the bi/bii/biii sub-conditions this instance belongs to."""
        if self.w:
            return "biii"
        return "bii" if self.u and self.v else "bi"

    def __len__(self) -> int:
        return len(self.u) + len(self.v) + 2 * len(self.w) + 2


def _words(symbols: Sequence[State], max_len: int) -> Iterator[tuple]:
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def condition_b_pairs(
    i: State,
    space: StateSpace,
    max_u: int | None = None,
    max_v: int | None = None,
    max_w: int | None = None,
    max_total: int | None = None,
) -> Iterator[PatternPair]:
    """Yield every block-switch pattern pair around ``i`` within the length bounds.

    ``u``, ``v``, ``w`` range over words on ``S - {i}`` with pairwise disjoint
    symbol sets.  Trivial instances (``y == y'``) are skipped and each unordered
    pair is emitted once: ``v`` empty with ``u`` non-empty, or both non-empty
    with ``u`` lexicographically before ``v``.  ``max_total`` bounds ``len(y)``.
    """
    if max_total is None and None in (max_u, max_v, max_w):
        raise InputError("condition_b_pairs needs max_total or all of max_u/max_v/max_w")
    space.index(i)
    big = max_total if max_total is not None else 0
    mu = max_u if max_u is not None else big
    mv = max_v if max_v is not None else big
    mw = max_w if max_w is not None else big // 2
    if max_total is not None:
        mu, mv, mw = min(mu, max_total - 2), min(mv, max_total - 2), min(mw, (max_total - 2) // 2)
    others = [s for s in space.labels if s != i]
    if mu < 0:
        return
    for w in _words(others, max(mw, 0)):
        ws = set(w)
        rest_u = [s for s in others if s not in ws]
        for u in _words(rest_u, mu):
            if not u:
                continue
            if max_total is not None and len(u) + 2 * len(w) + 2 > max_total:
                continue
            us = set(u)
            rest_v = [s for s in rest_u if s not in us]
            for v in _words(rest_v, mv):
                if max_total is not None and len(u) + len(v) + 2 * len(w) + 2 > max_total:
                    continue
                if v and space.sort_key(u) > space.sort_key(v):
                    continue
                yield PatternPair(i, u, v, w)


class History:
    """Running summary of a path prefix handed to predictive schemes.

    Holds the full step sequence plus the transition table and its row/column
    totals.  ``push``/``pop`` mutate in place and are meant for enumeration
    loops; schemes must treat the object as read-only.
    """

    __slots__ = ("x0", "steps", "counts", "out_totals", "in_totals")

    def __init__(self, x0: State, steps: Iterable[State] = ()):
        self.x0 = x0
        self.steps: list = []
        self.counts: dict = defaultdict(int)
        self.out_totals: dict = defaultdict(int)
        self.in_totals: dict = defaultdict(int)
        for s in steps:
            self.push(s)

    @classmethod
    def from_path(cls, path: Path) -> "History":
        return cls(path.x0, path.steps)

    @property
    def last(self) -> State:
        return self.steps[-1] if self.steps else self.x0

    @property
    def n(self) -> int:
        return len(self.steps)

    def push(self, y: State) -> None:
        i = self.last
        self.counts[(i, y)] += 1
        self.out_totals[i] += 1
        self.in_totals[y] += 1
        self.steps.append(y)

    def pop(self) -> State:
        y = self.steps.pop()
        i = self.last
        c = self.counts[(i, y)] - 1
        if c:
            self.counts[(i, y)] = c
        else:
            del self.counts[(i, y)]
        self.out_totals[i] -= 1
        self.in_totals[y] -= 1
        return y

    def count(self, i: State, j: State) -> int:
        return self.counts.get((i, j), 0)

    def row(self, i: State) -> dict:
        return {j: c for (a, j), c in self.counts.items() if a == i and c}

    def extended(self, ys: Iterable[State]) -> "History":
        h = History(self.x0, self.steps)
        for y in ys:
            h.push(y)
        return h

    def path(self) -> Path:
        return Path(self.x0, tuple(self.steps))

    def key(self) -> tuple:
        return (self.x0, frozenset((k, c) for k, c in self.counts.items() if c))

    def __repr__(self) -> str:
        return f"History({self.x0!r}, {self.steps!r})"
