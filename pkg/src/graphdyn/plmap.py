"""Continuous edge-piecewise-linear self-maps of a graph.

Every piece sends ``[t_lo, t_hi]`` on one edge affinely into a single target
edge via ``t -> a*t + b``. Maps are validated at construction (coverage,
image containment, continuity at breakpoints and vertices) and are immutable
afterwards.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .errors import StructuralError, ValidationError
from .topograph import (
    Arc,
    Edge,
    GraphPoint,
    GraphSpace,
    Region,
    as_rational,
    circle_graph,
    format_rational,
    interval_graph,
    parse_rational,
    star_graph,
)


@dataclass(frozen=True)
class Piece:
    edge: str
    t_lo: Fraction
    t_hi: Fraction
    target_edge: str
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("t_lo", "t_hi", "a", "b"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def __call__(self, t: Fraction) -> Fraction:
        return self.a * t + self.b

    @property
    def constant(self) -> bool:
        return self.a == 0

    def image_bounds(self, lo=None, hi=None) -> tuple:
        lo = self.t_lo if lo is None else lo
        hi = self.t_hi if hi is None else hi
        x, y = self(lo), self(hi)
        return (x, y) if x <= y else (y, x)

    def describe(self) -> str:
        return (f"piece on {self.edge} [{format_rational(self.t_lo)}, {format_rational(self.t_hi)}]"
                f" -> {self.target_edge}")


class PLGraphMap:
    """Validated piecewise-linear map ``graph -> graph``."""

    def __init__(self, graph: GraphSpace, pieces: Iterable[Piece], name: str = "", notes: str = ""):
        self.graph = graph
        self.name = name
        self.notes = notes
        order = graph.edge_index
        pieces = list(pieces)
        for pc in pieces:
            if pc.edge not in order:
                raise ValidationError(f"{pc.describe()}: unknown source edge")
            if pc.target_edge not in order:
                raise ValidationError(f"{pc.describe()}: unknown target edge")
            if not 0 <= pc.t_lo < pc.t_hi <= 1:
                raise ValidationError(f"{pc.describe()}: needs 0 <= t_lo < t_hi <= 1")
            lo, hi = pc.image_bounds()
            if lo < 0 or hi > 1:
                raise ValidationError(f"{pc.describe()}: image [{lo}, {hi}] leaves the target edge")
        pieces.sort(key=lambda pc: (order[pc.edge], pc.t_lo))
        self.pieces = tuple(pieces)
        by_edge = {e.id: [] for e in graph.edges}
        for pc in self.pieces:
            by_edge[pc.edge].append(pc)
        self._by_edge = {e: tuple(v) for e, v in by_edge.items()}
        self._starts = {e: [pc.t_lo for pc in v] for e, v in self._by_edge.items()}
        self._validate()

    def _validate(self):
        G = self.graph
        for e, pcs in self._by_edge.items():
            if not pcs:
                raise ValidationError(f"edge {e!r} has no pieces")
            if pcs[0].t_lo != 0:
                raise ValidationError(f"{pcs[0].describe()}: edge {e!r} not covered from 0")
            if pcs[-1].t_hi != 1:
                raise ValidationError(f"{pcs[-1].describe()}: edge {e!r} not covered up to 1")
            for left, right in zip(pcs, pcs[1:]):
                if left.t_hi != right.t_lo:
                    raise ValidationError(f"{right.describe()}: gap or overlap after {left.describe()}")
                p = G.normalize(GraphPoint(left.target_edge, left(left.t_hi)))
                q = G.normalize(GraphPoint(right.target_edge, right(right.t_lo)))
                if p != q:
                    raise ValidationError(f"{right.describe()}: discontinuous at t={right.t_lo} ({p} vs {q})")
        for v in G.vertices:
            images = set()
            for edge_id, end in G.incident[v]:
                pcs = self._by_edge[edge_id]
                pc = pcs[0] if end == 0 else pcs[-1]
                images.add(G.normalize(GraphPoint(pc.target_edge, pc(end))))
            if len(images) > 1:
                raise ValidationError(f"map is discontinuous at vertex {v!r}: images {sorted(map(str, images))}")

    def __eq__(self, other):
        return isinstance(other, PLGraphMap) and self.graph == other.graph and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"PLGraphMap({self.name or '<anonymous>'}, {len(self.pieces)} pieces)"

    def pieces_on(self, edge_id: str) -> tuple:
        return self._by_edge[edge_id]

    def piece_at(self, p: GraphPoint) -> Piece:
        pcs = self._by_edge[p.edge]
        i = bisect.bisect_right(self._starts[p.edge], p.t) - 1
        return pcs[max(i, 0)]

    def breakpoints(self) -> list:
        """Interior breakpoints as points, in edge order."""
        return [GraphPoint(pc.edge, pc.t_lo) for pc in self.pieces if pc.t_lo != 0]

    @cached_property
    def max_slope(self) -> Fraction:
        G = self.graph
        return max(abs(pc.a) * G.edge(pc.target_edge).length / G.edge(pc.edge).length for pc in self.pieces)

    def __call__(self, p: GraphPoint) -> GraphPoint:
        return evaluate(self, p)

    def to_spec(self) -> "MapSpec":
        return MapSpec(self.graph, self.pieces, self.name, self.notes)


def evaluate(f: PLGraphMap, p: GraphPoint) -> GraphPoint:
    f.graph.edge(p.edge)
    pc = f.piece_at(p)
    return f.graph.normalize(GraphPoint(pc.target_edge, pc(p.t)))


def iterate(f: PLGraphMap, p: GraphPoint, n: int) -> list:
    if n < 0:
        raise ValueError("n must be non-negative")
    out = [f.graph.normalize(p)]
    for _ in range(n):
        out.append(evaluate(f, out[-1]))
    return out


def preimages_with_arcs(f: PLGraphMap, q: GraphPoint) -> tuple:
    """Return ``(points, arcs)``: isolated preimages and whole preimage arcs of constant pieces."""
    G = f.graph
    reps = G.representations(q)
    pts, arcs = set(), []
    for pc in f.pieces:
        for edge_id, tq in reps:
            if edge_id != pc.target_edge:
                continue
            if pc.a == 0:
                if pc.b == tq:
                    arcs.append(Arc(pc.edge, pc.t_lo, pc.t_hi))
                continue
            t = (tq - pc.b) / pc.a
            if pc.t_lo <= t <= pc.t_hi:
                pts.add(G.normalize(GraphPoint(pc.edge, t)))
    return G.point_set(pts), Region(G, arcs).arcs()


def preimages(f: PLGraphMap, q: GraphPoint) -> tuple:
    return preimages_with_arcs(f, q)[0]


def image_region(f: PLGraphMap, region: Region) -> Region:
    out = []
    for e, lo, hi in region.intervals():
        for pc in f.pieces_on(e):
            x, y = max(lo, pc.t_lo), min(hi, pc.t_hi)
            if x <= y:
                a, b = pc.image_bounds(x, y)
                out.append(Arc(pc.target_edge, a, b))
    return Region(f.graph, out)


def image_of_arcs(f: PLGraphMap, arcs: Iterable[Arc]) -> list:
    return image_region(f, Region(f.graph, arcs)).arcs()


# -- construction helpers ---------------------------------------------------


def interval_map(breakpoints, values, name: str = "", notes: str = "") -> PLGraphMap:
    """PL map of the unit interval through the points ``(breakpoints[i], values[i])``."""
    xs = [as_rational(x) for x in breakpoints]
    ys = [as_rational(y) for y in values]
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValidationError("breakpoints and values must have equal length >= 2")
    pieces = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if x1 <= x0:
            raise ValidationError(f"breakpoints must increase ({x0} then {x1})")
        a = (y1 - y0) / (x1 - x0)
        pieces.append(Piece("e0", x0, x1, "e0", a, y0 - a * x0))
    return PLGraphMap(interval_graph(), pieces, name, notes)


def circle_map(breakpoints, lift_values, name: str = "", notes: str = "") -> PLGraphMap:
    """PL circle map from a PL lift; pieces are split where the lift crosses an integer."""
    xs = [as_rational(x) for x in breakpoints]
    ys = [as_rational(y) for y in lift_values]
    if xs[0] != 0 or xs[-1] != 1 or (ys[-1] - ys[0]).denominator != 1:
        raise ValidationError("a circle lift must run over [0, 1] with integer degree")
    pieces = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        slope = (y1 - y0) / (x1 - x0)
        cuts = [x0, x1]
        if slope:
            lo, hi = min(y0, y1), max(y0, y1)
            for k in range(math.floor(lo) + 1, math.ceil(hi)):
                cuts.append(x0 + (k - y0) / slope)
        cuts = sorted(set(cuts))
        for c0, c1 in zip(cuts, cuts[1:]):
            mid = y0 + slope * ((c0 + c1) / 2 - x0)
            n = math.floor(mid)
            pieces.append(Piece("e0", c0, c1, "e0", slope, y0 - slope * x0 - n))
    return PLGraphMap(circle_graph(), pieces, name, notes)


# -- builtins ---------------------------------------------------------------


def tent() -> PLGraphMap:
    return interval_map([0, Fraction(1, 2), 1], [0, 1, 0], "tent", "T(x) = min(2x, 2-2x)")


def doubling_circle() -> PLGraphMap:
    return circle_map([0, 1], [0, 2], "doubling_circle", "x -> 2x mod 1 on a unit loop")


def star3_mix() -> PLGraphMap:
    """Mixing Markov map of the 3-star (centre at t = 0 of every edge).

    On edge ``e_i`` (indices mod 3):
    ``[0, 1/3] -> e_{i+1}: 3t``, ``[1/3, 2/3] -> e_{i+1}: 2 - 3t``,
    ``[2/3, 1] -> e_{i+2}: 3t - 2``. The centre is fixed and the leaves form
    a 3-cycle.
    """
    G = star_graph(3)
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    pieces = []
    for i in range(3):
        e, e1, e2 = f"e{i}", f"e{(i + 1) % 3}", f"e{(i + 2) % 3}"
        pieces += [
            Piece(e, 0, third, e1, 3, 0),
            Piece(e, third, two_thirds, e1, -3, 2),
            Piece(e, two_thirds, 1, e2, 3, -2),
        ]
    return PLGraphMap(G, pieces, "star3_mix", "centre fixed, leaves cycle with period 3")


def figure2() -> PLGraphMap:
    return interval_map(
        [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1],
        [0, 1, Fraction(1, 2), 1, 0],
        "figure2",
        "p = 1/2 fixed, approached only from the right; q = 1/8 and r = 7/8 are its outer preimages",
    )


def cantor_levels(k: int) -> list:
    """Middle-thirds intervals per depth: ``levels[j]`` holds the 2^j depth-j intervals."""
    levels = [[(Fraction(0), Fraction(1))]]
    for _ in range(k):
        nxt = []
        for c, d in levels[-1]:
            w = (d - c) / 3
            nxt += [(c, c + w), (d - w, d)]
        levels.append(nxt)
    return levels


def cantor_bumps(k: int = 3) -> PLGraphMap:
    """Depth-``k`` Cantor structure on the unit interval with bumps over the gaps.

    The 2^k depth-k intervals are fixed pointwise. A gap ``(g1, g2)`` cut out
    of a depth-(j-1) interval ``[c, d]`` carries a tent bump rising from
    ``g1`` to the peak ``d`` at the gap's midpoint and falling back to ``g2``.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k <= 0:
        raise ValidationError(f"cantor_bumps needs an integer depth k >= 1, got {k!r}")
    levels = cantor_levels(k)
    xs, ys = [Fraction(0)], [Fraction(0)]
    nodes = {}
    for c, d in levels[k]:
        nodes[c] = c
        nodes[d] = d
    for j in range(1, k + 1):
        for c, d in levels[j - 1]:
            w = (d - c) / 3
            nodes[(c + w + d - w) / 2] = d
    for x in sorted(nodes):
        if x != 0:
            xs.append(x)
            ys.append(nodes[x])
    return interval_map(xs, ys, f"cantor_bumps:{k}",
                        f"depth-{k} Cantor intervals fixed; gap bumps peak at the right end of the parent interval")


BUILTINS = {
    "tent": tent,
    "doubling_circle": doubling_circle,
    "star3_mix": star3_mix,
    "figure2": figure2,
    "cantor_bumps": cantor_bumps,
}


def builtin(name: str, *params) -> PLGraphMap:
    """Build a named example. ``"cantor_bumps:3"`` and ``builtin("cantor_bumps", 3)`` agree."""
    if ":" in name:
        name, _, rest = name.partition(":")
        params = tuple(rest.split(",")) + params
    if name not in BUILTINS:
        raise ValidationError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    args = []
    for p in params:
        try:
            args.append(int(p))
        except (TypeError, ValueError):
            raise ValidationError(f"bad parameter {p!r} for builtin {name!r}") from None
    try:
        return BUILTINS[name](*args)
    except TypeError:
        raise ValidationError(f"builtin {name!r} does not take parameters {params!r}") from None


# -- serialization ----------------------------------------------------------


@dataclass(frozen=True)
class MapSpec:
    graph: GraphSpace
    pieces: tuple
    name: str = ""
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "notes": self.notes,
            "graph": {
                "vertices": list(self.graph.vertices),
                "edges": [
                    {"id": e.id, "from": e.u, "to": e.v, "length": format_rational(e.length)}
                    for e in self.graph.edges
                ],
            },
            "map": {
                "pieces": [
                    {
                        "edge": pc.edge,
                        "t_lo": format_rational(pc.t_lo),
                        "t_hi": format_rational(pc.t_hi),
                        "target_edge": pc.target_edge,
                        "a": format_rational(pc.a),
                        "b": format_rational(pc.b),
                    }
                    for pc in self.pieces
                ]
            },
        }

    @classmethod
    def from_dict(cls, doc) -> "MapSpec":
        if not isinstance(doc, dict):
            raise ValidationError("map spec must be a JSON object")
        try:
            g = doc["graph"]
            edges = tuple(
                Edge(str(e["id"]), str(e["from"]), str(e["to"]), parse_rational(str(e.get("length", "1"))))
                for e in g["edges"]
            )
            graph = GraphSpace(tuple(str(v) for v in g["vertices"]), edges)
            raw = doc["map"]["pieces"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"map spec is missing field {exc}") from None
        pieces = []
        for i, pc in enumerate(raw):
            try:
                pieces.append(Piece(
                    str(pc["edge"]),
                    parse_rational(str(pc["t_lo"])),
                    parse_rational(str(pc["t_hi"])),
                    str(pc["target_edge"]),
                    parse_rational(str(pc["a"])),
                    parse_rational(str(pc["b"])),
                ))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"piece #{i}: missing field {exc}") from None
            except ValidationError as exc:
                raise ValidationError(f"piece #{i}: {exc}") from None
        return cls(graph, tuple(pieces), str(doc.get("name", "")), str(doc.get("notes", "")))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MapSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"map spec is not valid JSON: {exc}") from None
        return cls.from_dict(doc)

    def build(self) -> PLGraphMap:
        return PLGraphMap(self.graph, self.pieces, self.name, self.notes)


def load_map(path) -> PLGraphMap:
    with open(path, encoding="utf-8") as fh:
        return MapSpec.from_json(fh.read()).build()


def map_hash(f: PLGraphMap) -> str:
    doc = f.to_spec().to_dict()
    doc.pop("notes")
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
