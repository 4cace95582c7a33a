"""Executable checks for Markov exchangeability of a predictive scheme.

Every checker enumerates histories up to a length horizon and compares exact
probabilities.  A ``holds`` verdict certifies the property only up to the
horizon recorded in the report; ``violated`` always comes with witnesses that
re-evaluate to the reported unequal values.

``max_len`` always bounds the length of the full string involved: a
condition-b comparison of ``p(y | x0, x)`` counts ``len(x) + len(y)`` steps.
With the same ``max_len``, conditions a) and b) jointly hold exactly when the
brute-force oracle finds no unequal class.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .core import DEFAULT_BUDGET, History, PatternPair, StateSpace, condition_b_pairs
from .errors import InputError, ResourceError
from .graph import ColoredGraph
from .schemes import PredictiveScheme, Sufficiency

REL_TOL = 1e-9


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive-budget"


@dataclass(frozen=True)
class Witness:
    """Two inputs that should have equal probability but do not.

    ``left``/``right`` are step tuples for whole-path comparisons, or
    ``(history_steps, continuation)`` pairs for conditional comparisons.
    """

    kind: str
    left: tuple
    right: tuple
    p_left: object
    p_right: object
    context: tuple = ()


@dataclass
class CheckReport:
    check: str
    verdict: Verdict
    witnesses: list = field(default_factory=list)
    coverage: dict = field(default_factory=dict)
    numeric: bool = False
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED

    @property
    def witness(self) -> Witness | None:
        return self.witnesses[0] if self.witnesses else None


def _same(a, b, exact: bool) -> bool:
    if exact:
        return a == b
    a, b = float(a), float(b)
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b))


def _finish(check, witnesses, coverage, exact, space, horizon, truncated=False) -> CheckReport:
    def key(w):
        def k(x):
            if x and isinstance(x[0], tuple):
                return tuple(space.sort_key(part) for part in x)
            return (space.sort_key(x),)
        return (len(_flatten(w.left)), k(w.left), k(w.right))

    witnesses.sort(key=key)
    if witnesses:
        verdict = Verdict.VIOLATED
    elif truncated:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.HOLDS
    note = f"certified up to string length {horizon} only"
    return CheckReport(check, verdict, witnesses, coverage, numeric=not exact, note=note)


def _flatten(x):
    if x and isinstance(x[0], tuple):
        return tuple(itertools.chain.from_iterable(x))
    return x


def _check_budget(space: StateSpace, steps: int, budget: int) -> int:
    """Largest horizon ``<= steps`` whose full enumeration fits in ``budget``."""
    total, best = 0, 0
    for n in range(1, steps + 1):
        total += len(space) ** n
        if total > budget:
            break
        best = n
    return best


def reachable_histories(
    scheme: PredictiveScheme, space: StateSpace, x0, max_steps: int
) -> Iterator[tuple[tuple, object, History]]:
    """DFS over histories with positive probability and at most ``max_steps`` steps.

    Yields ``(steps, probability, history)`` in lexicographic order; the
    history object is reused, so copy it before keeping it.
    """
    h = History(x0)

    def rec(prob):
        yield tuple(h.steps), prob, h
        if h.n == max_steps:
            return
        dist = scheme.next_distribution(h)
        for s in space:
            p = dist.get(s, 0)
            if p == 0:
                continue
            h.push(s)
            yield from rec(prob * p)
            h.pop()

    yield from rec(Fraction(1) if scheme.exact else 1.0)


def conditional_probability(scheme: PredictiveScheme, h: History, ys: Sequence):
    """``p(ys | h)`` by the chain rule; ``h`` is restored before returning."""
    prob = Fraction(1) if scheme.exact else 1.0
    pushed = 0
    try:
        for y in ys:
            p = scheme.probability(h, y)
            if p == 0:
                return p * 0
            prob *= p
            h.push(y)
            pushed += 1
    finally:
        for _ in range(pushed):
            h.pop()
    return prob


def brute_force_markov_exchangeable(
    scheme: PredictiveScheme,
    space: StateSpace,
    x0,
    max_len: int,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """Definition-level oracle: equal probability on every equivalence class.

    All ``|S|**n`` strings for ``n <= max_len`` are enumerated (zero-probability
    strings included), grouped by transition table, and each class is checked
    for a single probability value.  One witness is reported per unequal
    class: its lexicographically first minimal-probability member against its
    first maximal-probability member.
    """
    space.index(x0)
    horizon = _check_budget(space, max_len, budget)
    exact = scheme.exact
    classes: dict = {}
    h = History(x0)
    zero = Fraction(0) if exact else 0.0

    def visit(prob):
        if h.n:
            key = (h.n, frozenset(h.counts.items()))
            steps = tuple(h.steps)
            rec = classes.get(key)
            if rec is None:
                classes[key] = [prob, steps, prob, steps, 1]
            else:
                rec[4] += 1
                if prob < rec[0]:
                    rec[0], rec[1] = prob, steps
                if prob > rec[2]:
                    rec[2], rec[3] = prob, steps
        if h.n == horizon:
            return
        dist = scheme.next_distribution(h) if prob != 0 else {}
        for s in space:
            h.push(s)
            visit(prob * dist.get(s, 0) if prob != 0 else zero)
            h.pop()

    visit(Fraction(1) if exact else 1.0)
    witnesses = []
    spread = zero
    for (n, _), (pmin, smin, pmax, smax, _) in classes.items():
        spread = max(spread, pmax - pmin)
        if not _same(pmin, pmax, exact):
            witnesses.append(Witness("class", smin, smax, pmin, pmax))
    coverage = {
        "max_len": horizon,
        "requested_max_len": max_len,
        "strings": sum(len(space) ** n for n in range(1, horizon + 1)),
        "classes": len(classes),
        "max_spread": spread,
    }
    return _finish("brute", witnesses, coverage, exact, space, horizon, horizon < max_len)


def _grouped_histories(scheme, space, x0, max_steps):
    groups: dict = {}
    for steps, prob, h in reachable_histories(scheme, space, x0, max_steps):
        groups.setdefault(h.key(), []).append(steps)
    return groups


def check_condition_a(
    scheme: PredictiveScheme,
    space: StateSpace,
    x0,
    max_len: int,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """One-step sufficiency of ``(last state, transition counts)``.

    Equivalent histories of positive probability (at most ``max_len - 1``
    steps) must give identical next-step laws.
    """
    horizon = _check_budget(space, max_len - 1, budget) if max_len > 1 else 0
    truncated = horizon < max_len - 1
    exact = scheme.exact
    groups = _grouped_histories(scheme, space, x0, horizon)
    witnesses = []
    compared = 0
    for members in groups.values():
        if len(members) < 2:
            continue
        ref = members[0]
        ref_dist = scheme.next_distribution(History(x0, ref))
        for other in members[1:]:
            dist = scheme.next_distribution(History(x0, other))
            compared += 1
            for y in space:
                a, b = ref_dist.get(y, 0), dist.get(y, 0)
                if not _same(a, b, exact):
                    witnesses.append(Witness("a", (ref, (y,)), (other, (y,)), a, b))
                    break
    coverage = {"histories": sum(len(m) for m in groups.values()), "pairs_compared": compared,
                "max_len": horizon + 1}
    return _finish("a", witnesses, coverage, exact, space, horizon + 1, truncated)


def check_condition_b(
    scheme: PredictiveScheme,
    space: StateSpace,
    x0,
    max_len: int,
    max_u: int | None = None,
    max_v: int | None = None,
    max_w: int | None = None,
    require_a: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """Block-switch invariance on disjoint patterns around the last state.

    For every positive-probability history ending at ``i`` and every pattern
    ``y = (u, w, i, v, w, i)``, ``y' = (v, w, i, u, w, i)`` with disjoint
    symbol sets, ``p(y | history) == p(y' | history)``.  The bi/bii/biii
    sub-conditions are tallied separately in ``coverage``.  Pattern lengths
    are limited by ``max_len`` and optionally by ``max_u``/``max_v``/``max_w``.
    """
    if require_a:
        rep_a = check_condition_a(scheme, space, x0, max_len, budget)
        if not rep_a.holds:
            raise InputError(
                f"condition a) is {rep_a.verdict.value}; condition b) assumes it holds"
            )
    horizon = _check_budget(space, max(max_len - 2, 0), budget) if max_len > 2 else 0
    truncated = horizon < max_len - 2
    exact = scheme.exact
    witnesses = []
    kinds = {"bi": 0, "bii": 0, "biii": 0}
    bad = {"bi": 0, "bii": 0, "biii": 0}
    n_hist = 0
    pair_cache: dict = {}
    for steps, prob, h in reachable_histories(scheme, space, x0, horizon):
        n_hist += 1
        i = h.last
        room = max_len - h.n
        key = (i, room)
        if key not in pair_cache:
            pair_cache[key] = list(condition_b_pairs(i, space, max_u, max_v, max_w, max_total=room))
        for pat in pair_cache[key]:
            kinds[pat.kind] += 1
            a = conditional_probability(scheme, h, pat.y)
            b = conditional_probability(scheme, h, pat.y_prime)
            if not _same(a, b, exact):
                bad[pat.kind] += 1
                witnesses.append(
                    Witness(pat.kind, (steps, pat.y), (steps, pat.y_prime), a, b,
                            context=(("u", pat.u), ("v", pat.v), ("w", pat.w)))
                )
    coverage = {"histories": n_hist, "pairs": kinds, "violations": bad, "max_len": max_len,
                "pattern_caps": {"u": max_u, "v": max_v, "w": max_w}}
    return _finish("b", witnesses, coverage, exact, space, max_len, truncated)


def check_one_step_vs_full_sufficiency(
    scheme: PredictiveScheme,
    space: StateSpace,
    x0,
    max_len: int,
    horizon: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """k-step joint predictive laws agree across equivalent histories.

    Histories have at most ``max_len - horizon`` steps; every continuation in
    ``S**horizon`` is compared.
    """
    if horizon < 1:
        raise InputError("horizon must be at least 1")
    steps_max = max(max_len - horizon, 0)
    depth = _check_budget(space, steps_max, budget) if steps_max else 0
    exact = scheme.exact
    groups = _grouped_histories(scheme, space, x0, depth)
    conts = list(itertools.product(space.labels, repeat=horizon))
    witnesses = []
    compared = 0
    for members in groups.values():
        if len(members) < 2:
            continue
        ref = History(x0, members[0])
        ref_joint = [conditional_probability(scheme, ref, y) for y in conts]
        for other in members[1:]:
            h = History(x0, other)
            compared += 1
            for y, a in zip(conts, ref_joint):
                b = conditional_probability(scheme, h, y)
                if not _same(a, b, exact):
                    witnesses.append(Witness(f"k={horizon}", (members[0], y), (other, y), a, b))
                    break
    coverage = {"pairs_compared": compared, "horizon": horizon, "max_len": depth + horizon}
    return _finish("sufficiency", witnesses, coverage, exact, space, depth + horizon,
                   depth < steps_max)


# -- row-sufficient schemes ---------------------------------------------------------


def row_history(i, space: StateSpace, row: Sequence[int]) -> History:
    """Synthetic history standing at ``i`` whose transitions from ``i`` are ``row``.

    Only meaningful for schemes that read ``(last, T_row)``.
    """
    h = History(i)
    for j, c in zip(space.labels, row):
        if c:
            h.counts[(i, j)] = c
            h.out_totals[i] += c
            h.in_totals[j] += c
    return h


def row_rule(scheme: PredictiveScheme, space: StateSpace) -> Callable:
    """Turn a ``(last, T_row)``-sufficient scheme into ``pi(j, T_i, i)``."""
    if scheme.sufficiency is not Sufficiency.LAST_ROW:
        raise InputError(f"scheme reads {scheme.sufficiency.value}, not (last, T_row)")

    def pi(j, row, i):
        return scheme.probability(row_history(i, space, row), j)

    return pi


def check_linear_condition(
    pi: Callable,
    space: StateSpace,
    probe_set: Iterable[Sequence[int]] | None = None,
    max_count: int = 5,
    exact: bool = True,
) -> CheckReport:
    """Commutation of two consecutive draws from the same state.

    ``pi(u | T, i) pi(v | T + e_u, i) == pi(v | T, i) pi(u | T + e_v, i)`` for
    every ``i``, ``u``, ``v`` and probed count row ``T`` (aligned with
    ``space``).  The default probe set is every row with entries in
    ``0..max_count``.
    """
    if probe_set is None:
        probe_set = itertools.product(range(max_count + 1), repeat=len(space))
    probes = [tuple(t) for t in probe_set]
    labels = space.labels
    witnesses = []
    n = 0
    for i in labels:
        for t in probes:
            for a, b in itertools.combinations(range(len(labels)), 2):
                u, v = labels[a], labels[b]
                tu = t[:a] + (t[a] + 1,) + t[a + 1:]
                tv = t[:b] + (t[b] + 1,) + t[b + 1:]
                lhs = pi(u, t, i) * pi(v, tu, i)
                rhs = pi(v, t, i) * pi(u, tv, i)
                n += 1
                if not _same(lhs, rhs, exact):
                    witnesses.append(Witness("linear", (i, t, u, v), (i, t, v, u), lhs, rhs))
    coverage = {"probes": len(probes), "comparisons": n}
    report = CheckReport("linear", Verdict.VIOLATED if witnesses else Verdict.HOLDS,
                         witnesses, coverage, numeric=not exact,
                         note=f"certified on {len(probes)} probed count rows only")
    return report


# -- colored walks ------------------------------------------------------------------


def color_partition(graph: ColoredGraph) -> list[frozenset] | None:
    """The groups ``{C(i)}`` when any two are equal or disjoint, else ``None``."""
    groups: list[frozenset] = []
    for v in graph.vertices:
        cs = frozenset(graph.colors_of(v))
        if not cs or cs in groups:
            continue
        if any(not cs.isdisjoint(g) for g in groups):
            return None
        groups.append(cs)
    return groups


def is_partitioned_colors(graph: ColoredGraph) -> bool:
    return color_partition(graph) is not None


def _graph_histories(graph: ColoredGraph, x0, max_steps: int) -> Iterator[History]:
    h = History(x0)

    def rec():
        yield h
        if h.n == max_steps:
            return
        for e in graph.out_edges(h.last):
            h.push(e.dst)
            yield from rec()
            h.pop()

    yield from rec()


def _realizable(graph: ColoredGraph, start, ys: Sequence) -> bool:
    prev = start
    for y in ys:
        if not graph.has_edge(prev, y):
            return False
        prev = y
    return True


def _denominator_product(graph: ColoredGraph, h: History, ys: Sequence, increment=1):
    """prod_{l=2..m} [alpha_C(y_{l-1}) + T_C(y_{l-1})] along ``ys`` after ``h``."""
    prod = Fraction(1) if graph.exact else 1.0
    pushed = 0
    try:
        for y in ys[:-1]:
            h.push(y)
            pushed += 1
            prod *= graph.color_denominator(y, h.counts, increment)
    finally:
        for _ in range(pushed):
            h.pop()
    return prod


def check_colored_condition(
    graph: ColoredGraph,
    x0,
    max_len: int,
    max_u: int | None = None,
    max_v: int | None = None,
    max_w: int | None = None,
    increment=1,
) -> CheckReport:
    """Color-denominator products agree on every realizable block-switch pair.

    For a colored reinforced walk this is equivalent to Markov
    exchangeability (up to the horizon): edge factors always commute, so only
    the color normalisers can break the symmetry.
    """
    space = StateSpace(graph.vertices)
    space.index(x0)
    exact = graph.exact
    witnesses = []
    n_hist = 0
    n_pairs = 0
    for h in _graph_histories(graph, x0, max(max_len - 2, 0)):
        n_hist += 1
        i = h.last
        room = max_len - h.n
        steps = tuple(h.steps)
        for pat in condition_b_pairs(i, space, max_u, max_v, max_w, max_total=room):
            if not _realizable(graph, i, pat.y):
                continue
            n_pairs += 1
            a = _denominator_product(graph, h, pat.y, increment)
            b = _denominator_product(graph, h, pat.y_prime, increment)
            if not _same(a, b, exact):
                witnesses.append(Witness(pat.kind, (steps, pat.y), (steps, pat.y_prime), a, b,
                                         context=(("u", pat.u), ("v", pat.v), ("w", pat.w))))
    coverage = {"histories": n_hist, "pairs": n_pairs, "max_len": max_len}
    return _finish("colored", witnesses, coverage, exact, space, max_len)
