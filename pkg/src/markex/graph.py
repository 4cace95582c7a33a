"""Directed graphs with colored, weighted edges."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Hashable, Iterable, Mapping

import numpy as np

from .errors import InputError, ModelError

Color = Hashable


def to_number(x, exact: bool = True):
    """Parse a non-negative number.  Strings like ``"3/2"`` or ``"0.1"`` are read exactly."""
    if isinstance(x, bool):
        raise InputError(f"invalid weight {x!r}")
    if exact:
        try:
            if isinstance(x, float):
                w = Fraction(repr(x))
            elif isinstance(x, (Rational, str)):
                w = Fraction(x)
            else:
                w = Fraction(str(x))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"invalid weight {x!r}") from None
    else:
        try:
            w = float(Fraction(x)) if isinstance(x, str) else float(x)
        except (ValueError, ZeroDivisionError, TypeError):
            raise InputError(f"invalid weight {x!r}") from None
    if not w >= 0:
        raise InputError(f"expected a non-negative number, got {x!r}")
    return w


def to_weight(x, exact: bool = True):
    """Parse a strictly positive weight."""
    w = to_number(x, exact)
    if not w > 0:
        raise InputError(f"weights must be positive, got {x!r}")
    return w


@dataclass(frozen=True)
class Edge:
    src: Hashable
    dst: Hashable
    color: Color
    beta: object


@dataclass(frozen=True)
class CompiledGraph:
    """Flat integer/float arrays consumed by the walk kernel.

    Out-edges of vertex ``i`` are grouped by color into *slots*: vertex ``i``
    owns slots ``vc_ptr[i]:vc_ptr[i+1]``, slot ``k`` has color ``slot_color[k]``
    and edges ``slot_ptr[k]:slot_ptr[k+1]`` (destinations ``edge_dst``).
    """

    vc_ptr: np.ndarray
    slot_color: np.ndarray
    slot_ptr: np.ndarray
    edge_dst: np.ndarray
    edge_src: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    n_vertices: int
    n_colors: int


class ColoredGraph:
    """Directed graph whose edges carry a color ``c(i, j)`` and a weight ``beta[i, j]``.

    Each color has a weight ``alpha[c]``.  Derived quantities follow the usual
    notation: ``colors_of(i)`` is C(i), ``edges_of_color(c)`` is E_c and
    ``targets(i, c)`` is A_{i,c}.

    Parameters
    ----------
    edges : iterable of (src, dst, color, beta)
    alpha : mapping color -> weight
    vertices : optional explicit vertex order; defaults to first appearance
    exact : keep weights as :class:`fractions.Fraction` (default) or floats
    """

    def __init__(
        self,
        edges: Iterable,
        alpha: Mapping,
        vertices: Iterable | None = None,
        exact: bool = True,
    ):
        self.exact = exact
        self.alpha = {c: to_weight(a, exact) for c, a in alpha.items()}
        parsed = []
        seen = set()
        for e in edges:
            if isinstance(e, Edge):
                src, dst, color, beta = e.src, e.dst, e.color, e.beta
            else:
                src, dst, color, beta = e
            if (src, dst) in seen:
                raise InputError(f"duplicate edge ({src!r}, {dst!r})")
            if color not in self.alpha:
                raise InputError(f"edge ({src!r}, {dst!r}) uses undeclared color {color!r}")
            seen.add((src, dst))
            parsed.append(Edge(src, dst, color, to_weight(beta, exact)))
        self.edges: tuple[Edge, ...] = tuple(parsed)
        order = list(vertices) if vertices is not None else []
        known = set(order)
        if len(known) != len(order):
            raise InputError("duplicate vertex labels")
        for e in self.edges:
            for v in (e.src, e.dst):
                if v not in known:
                    if vertices is not None:
                        raise InputError(f"edge endpoint {v!r} is not a declared vertex")
                    known.add(v)
                    order.append(v)
        self.vertices: tuple = tuple(order)
        self._vindex = {v: k for k, v in enumerate(self.vertices)}
        self._edge = {(e.src, e.dst): e for e in self.edges}
        self._cindex = {c: k for k, c in enumerate(self.alpha)}

    # -- structure ---------------------------------------------------------

    def __repr__(self) -> str:
        return f"ColoredGraph({len(self.vertices)} vertices, {len(self.edges)} edges, {len(self.alpha)} colors)"

    def vertex_index(self, v) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def has_edge(self, i, j) -> bool:
        return (i, j) in self._edge

    def edge(self, i, j) -> Edge:
        try:
            return self._edge[(i, j)]
        except KeyError:
            raise InputError(f"missing edge ({i!r}, {j!r})") from None

    def color(self, i, j) -> Color:
        return self.edge(i, j).color

    def beta(self, i, j):
        return self.edge(i, j).beta

    @cached_property
    def _out(self) -> dict:
        out: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return out

    def out_edges(self, i) -> list[Edge]:
        return self._out.get(i, [])

    def successors(self, i) -> list:
        return [e.dst for e in self.out_edges(i)]

    @cached_property
    def _colors_of(self) -> dict:
        res = {}
        for v in self.vertices:
            cs = {e.color for e in self._out[v]}
            res[v] = tuple(c for c in self.alpha if c in cs)
        return res

    def colors_of(self, i) -> tuple:
        """C(i): colors of the edges leaving ``i``, in declaration order."""
        return self._colors_of.get(i, ())

    @cached_property
    def _by_color(self) -> dict:
        res: dict = {c: [] for c in self.alpha}
        for e in self.edges:
            res[e.color].append((e.src, e.dst))
        return res

    def edges_of_color(self, c) -> list:
        """E_c."""
        return self._by_color[c]

    def targets(self, i, c) -> tuple:
        """A_{i,c}: destinations of color-``c`` edges leaving ``i``."""
        return tuple(e.dst for e in self.out_edges(i) if e.color == c)

    def alpha_total(self, i):
        """alpha_{C(i)}."""
        return sum((self.alpha[c] for c in self.colors_of(i)), self._zero)

    def beta_total(self, i, c):
        """beta_{i, E_c}."""
        return sum((e.beta for e in self.out_edges(i) if e.color == c), self._zero)

    @property
    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def sinks(self) -> list:
        return [v for v in self.vertices if not self._out[v]]

    def weight_matrix(self) -> np.ndarray:
        """Q with ``Q[i, j] = beta[i, j] / sum_j' beta[i, j']`` (zero rows for sinks)."""
        n = len(self.vertices)
        q = np.zeros((n, n))
        for v in self.vertices:
            out = self._out[v]
            tot = sum(float(e.beta) for e in out)
            for e in out:
                q[self._vindex[v], self._vindex[e.dst]] = float(e.beta) / tot
        return q

    # -- predictive --------------------------------------------------------

    def _aggregates(self, i, counts: Mapping, increment=1):
        color_tot = {}
        for c in self.colors_of(i):
            color_tot[c] = self.alpha[c] + increment * sum(
                counts.get(pair, 0) for pair in self._by_color[c]
            )
        return color_tot

    def predictive(self, i, counts: Mapping, increment=1) -> dict:
        """Next-state distribution from ``i`` given transition counts ``counts``.

        Two-stage rule: pick a color among C(i) with probability proportional
        to its reinforced color weight, then an edge of that color from ``i``
        proportionally to its reinforced edge weight.
        """
        out = self.out_edges(i)
        if not out:
            raise ModelError(f"vertex {i!r} has no outgoing edges")
        color_w = self._aggregates(i, counts, increment)
        color_den = sum(color_w.values(), self._zero)
        edge_w = {e.dst: e.beta + increment * counts.get((i, e.dst), 0) for e in out}
        slot_den: dict = {}
        for e in out:
            slot_den[e.color] = slot_den.get(e.color, self._zero) + edge_w[e.dst]
        return {
            e.dst: (color_w[e.color] / color_den) * (edge_w[e.dst] / slot_den[e.color])
            for e in out
        }

    def color_denominator(self, i, counts: Mapping, increment=1):
        """alpha_{C(i)} + T_{C(i)}."""
        return sum(self._aggregates(i, counts, increment).values(), self._zero)

    # -- transformations ---------------------------------------------------

    def with_weights(self, alpha: Mapping | None = None, beta: Mapping | None = None) -> "ColoredGraph":
        alpha = dict(self.alpha) if alpha is None else dict(alpha)
        beta = beta or {}
        edges = [(e.src, e.dst, e.color, beta.get((e.src, e.dst), e.beta)) for e in self.edges]
        return ColoredGraph(edges, alpha, self.vertices, self.exact)

    def as_float(self) -> "ColoredGraph":
        edges = [(e.src, e.dst, e.color, float(e.beta)) for e in self.edges]
        return ColoredGraph(edges, {c: float(a) for c, a in self.alpha.items()}, self.vertices, False)

    @cached_property
    def compiled(self) -> CompiledGraph:
        vc_ptr = [0]
        slot_color, slot_ptr, edge_dst, edge_src = [], [0], [], []
        beta = []
        for v in self.vertices:
            for c in self.colors_of(v):
                slot_color.append(self._cindex[c])
                for e in self._out[v]:
                    if e.color == c:
                        edge_dst.append(self._vindex[e.dst])
                        edge_src.append(self._vindex[v])
                        beta.append(float(e.beta))
                slot_ptr.append(len(edge_dst))
            vc_ptr.append(len(slot_color))
        i64 = np.int64
        return CompiledGraph(
            vc_ptr=np.asarray(vc_ptr, dtype=i64),
            slot_color=np.asarray(slot_color, dtype=i64),
            slot_ptr=np.asarray(slot_ptr, dtype=i64),
            edge_dst=np.asarray(edge_dst, dtype=i64),
            edge_src=np.asarray(edge_src, dtype=i64),
            alpha=np.asarray([float(a) for a in self.alpha.values()], dtype=np.float64),
            beta=np.asarray(beta, dtype=np.float64),
            n_vertices=len(self.vertices),
            n_colors=len(self.alpha),
        )
