"""JSON graph spec files.

A spec looks like::

    {
      "vertices": ["a", "b"],
      "edges": [{"from": "a", "to": "b", "color": "red", "beta": "3/2"}, ...],
      "colors": [{"name": "red", "alpha": 1}, ...],
      "x0": "a",
      "dummies": [{"from": "a", "to": "b", "count": 1, "edge_colors": ["in", "out"]}]
    }

Weights may be integers, decimal strings or rationals like ``"3/2"``; they
are read exactly and written back as rational strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FsPath

from .errors import InputError
from .graph import ColoredGraph, to_weight


@dataclass(frozen=True)
class DummySpec:
    src: object
    dst: object
    count: int
    edge_colors: tuple
    betas: tuple = (Fraction(1), Fraction(1))


@dataclass(frozen=True)
class GraphSpec:
    vertices: tuple
    edges: tuple  # (src, dst, color, beta)
    colors: tuple  # (name, alpha)
    x0: object
    dummies: tuple = field(default=())

    @property
    def alpha(self) -> dict:
        return dict(self.colors)

    def graph(self, exact: bool = True, with_dummy_colors: bool = False) -> ColoredGraph:
        """The base graph; dummy-only colors are left out unless asked for."""
        used = {c for _, _, c, _ in self.edges}
        alpha = {c: a for c, a in self.colors if with_dummy_colors or c in used}
        g = ColoredGraph(self.edges, alpha, self.vertices, exact=True)
        return g if exact else g.as_float()

    def augmented(self, exact: bool = True):
        from .dummy import Placement, augment

        base = self.graph(exact)
        placements = [Placement(d.src, d.dst, d.count, d.edge_colors, d.betas) for d in self.dummies]
        extra = {c: a for c, a in self.colors if c not in base.alpha}
        if not exact:
            extra = {c: float(a) for c, a in extra.items()}
        return augment(base, placements, alpha=extra)

    def to_dict(self) -> dict:
        out = {
            "vertices": list(self.vertices),
            "edges": [{"from": i, "to": j, "color": c, "beta": str(b)} for i, j, c, b in self.edges],
            "colors": [{"name": c, "alpha": str(a)} for c, a in self.colors],
            "x0": self.x0,
        }
        if self.dummies:
            out["dummies"] = [
                {"from": d.src, "to": d.dst, "count": d.count, "edge_colors": list(d.edge_colors),
                 "betas": [str(b) for b in d.betas]}
                for d in self.dummies
            ]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def with_graph(self, graph: ColoredGraph, x0) -> "GraphSpec":
        """Same layout with weights (and start) taken from ``graph``."""
        edges = tuple((i, j, c, graph.beta(i, j)) for i, j, c, _ in self.edges)
        colors = tuple((c, graph.alpha.get(c, a)) for c, a in self.colors)
        return GraphSpec(self.vertices, edges, colors, x0, self.dummies)


def _label(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise InputError(f"{where}: labels must be strings or integers, got {value!r}")
    return value


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    return obj[key]


def _weight(value, where: str) -> Fraction:
    try:
        return to_weight(value, exact=True)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def from_dict(doc) -> GraphSpec:
    """Validate a decoded JSON document."""
    if not isinstance(doc, dict):
        raise InputError("spec: top level must be an object")
    unknown = set(doc) - {"vertices", "edges", "colors", "x0", "dummies"}
    if unknown:
        raise InputError(f"spec: unknown field(s) {sorted(unknown)}")
    raw_vertices = _field(doc, "vertices", "spec")
    if not isinstance(raw_vertices, list) or not raw_vertices:
        raise InputError("vertices: expected a non-empty list")
    vertices = tuple(_label(v, f"vertices[{k}]") for k, v in enumerate(raw_vertices))
    if len(set(vertices)) != len(vertices):
        raise InputError("vertices: labels must be distinct")
    known = set(vertices)

    raw_colors = _field(doc, "colors", "spec")
    if not isinstance(raw_colors, list):
        raise InputError("colors: expected a list")
    colors = []
    for k, c in enumerate(raw_colors):
        where = f"colors[{k}]"
        name = _label(_field(c, "name", where), f"{where}.name")
        if name in dict(colors):
            raise InputError(f"{where}.name: duplicate color {name!r}")
        colors.append((name, _weight(_field(c, "alpha", where), f"{where}.alpha")))
    color_names = dict(colors)

    raw_edges = _field(doc, "edges", "spec")
    if not isinstance(raw_edges, list):
        raise InputError("edges: expected a list")
    edges = []
    seen = set()
    for k, e in enumerate(raw_edges):
        where = f"edges[{k}]"
        src = _field(e, "from", where)
        dst = _field(e, "to", where)
        for key, v in (("from", src), ("to", dst)):
            if v not in known:
                raise InputError(f"{where}.{key}: undeclared vertex {v!r}")
        color = _field(e, "color", where)
        if color not in color_names:
            raise InputError(f"{where}.color: undeclared color {color!r}")
        if (src, dst) in seen:
            raise InputError(f"{where}: duplicate edge ({src!r}, {dst!r})")
        seen.add((src, dst))
        edges.append((src, dst, color, _weight(e.get("beta", 1), f"{where}.beta")))

    x0 = _field(doc, "x0", "spec")
    if x0 not in known:
        raise InputError(f"x0: undeclared vertex {x0!r}")

    dummies = []
    for k, d in enumerate(doc.get("dummies", []) or []):
        where = f"dummies[{k}]"
        src, dst = _field(d, "from", where), _field(d, "to", where)
        if (src, dst) not in seen:
            raise InputError(f"{where}: no edge ({src!r}, {dst!r}) to place dummies on")
        count = _field(d, "count", where)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise InputError(f"{where}.count: expected a positive integer, got {count!r}")
        ec = _field(d, "edge_colors", where)
        if not isinstance(ec, list) or len(ec) != 2:
            raise InputError(f"{where}.edge_colors: expected [in_color, out_color]")
        for c in ec:
            if c not in color_names:
                raise InputError(f"{where}.edge_colors: undeclared color {c!r}")
        betas = d.get("betas", [1, 1])
        if not isinstance(betas, list) or len(betas) != 2:
            raise InputError(f"{where}.betas: expected two weights")
        dummies.append(DummySpec(src, dst, count, tuple(ec),
                                 tuple(_weight(b, f"{where}.betas") for b in betas)))
    return GraphSpec(vertices, tuple(edges), tuple(colors), x0, tuple(dummies))


def loads(text: str) -> GraphSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"spec: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(doc)


def load(path) -> GraphSpec:
    try:
        text = FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read spec {path}: {exc.strerror}") from None
    return loads(text)
