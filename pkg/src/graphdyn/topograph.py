"""Finite metric graphs with exact rational coordinates.

A graph is a list of vertices and metric edges. A point lives on an edge at
a rational position ``t`` in ``[0, 1]`` measured from the edge's ``u`` end to
its ``v`` end. Vertex positions have one canonical representative: the
smallest incident edge (in declaration order) at the matching endpoint.

Distances are geodesic (shortest path) and exact.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from .errors import DomainError, StructuralError, ValidationError

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(-?\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction; ``q`` must be positive."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValidationError(f"expected a rational string 'p/q', got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValidationError(f"malformed rational {text!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) is not None else 1
    if q <= 0:
        raise ValidationError(f"malformed rational {text!r}: denominator must be positive")
    return Fraction(p, q)


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def as_rational(x) -> Fraction:
    if isinstance(x, float):
        raise StructuralError(f"floats are not accepted as exact coordinates: {x!r}")
    return parse_rational(x)


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "length", as_rational(self.length))
        if self.length <= 0:
            raise StructuralError(f"edge {self.id!r} has non-positive length {self.length}")

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class GraphPoint:
    edge: str
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", as_rational(self.t))
        if not 0 <= self.t <= 1:
            raise StructuralError(f"coordinate {self.t} outside [0, 1] on edge {self.edge!r}")

    def __str__(self):
        return f"{self.edge}:{format_rational(self.t)}"

    @classmethod
    def parse(cls, text: str) -> "GraphPoint":
        """Parse ``"edge:p/q"``."""
        edge, sep, rest = str(text).rpartition(":")
        if not sep or not edge:
            raise ValidationError(f"malformed point {text!r}, expected 'edge:p/q'")
        return cls(edge, parse_rational(rest))


@dataclass(frozen=True)
class Arc:
    """Closed sub-interval ``[lo, hi]`` of a single edge."""

    edge: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if not 0 <= self.lo <= self.hi <= 1:
            raise StructuralError(f"bad arc [{self.lo}, {self.hi}] on edge {self.edge!r}")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __str__(self):
        return f"{self.edge}:[{format_rational(self.lo)},{format_rational(self.hi)}]"


PointSet = tuple  # tuple[GraphPoint, ...], normalized, sorted, no duplicates


@dataclass(frozen=True)
class GraphSpace:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.edges:
            raise StructuralError("a graph needs at least one edge")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise StructuralError("duplicate edge ids")
        if len(set(self.vertices)) != len(self.vertices):
            raise StructuralError("duplicate vertex ids")
        known = set(self.vertices)
        for e in self.edges:
            if e.u not in known or e.v not in known:
                raise StructuralError(f"edge {e.id!r} references an unknown vertex")
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((e.u, e.v) for e in self.edges)
        if not nx.is_connected(g):
            raise StructuralError("graph is not connected")

    # -- lookup tables ---------------------------------------------------

    @cached_property
    def edge_index(self) -> dict:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def _edge_by_id(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def incident(self) -> dict:
        """vertex -> list of (edge id, endpoint coordinate), in edge order."""
        inc = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append((e.id, Fraction(0)))
            inc[e.v].append((e.id, Fraction(1)))
        return inc

    @cached_property
    def vertex_distance(self) -> dict:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.u, e.v, length=e.length)
        raw = nx.floyd_warshall(g, weight="length")
        return {a: {b: Fraction(raw[a][b]) for b in self.vertices} for a in self.vertices}

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise StructuralError(f"unknown edge id {edge_id!r}") from None

    # -- points ----------------------------------------------------------

    def vertex_at(self, p: GraphPoint):
        """Vertex id located at ``p``, or None for interior points."""
        e = self.edge(p.edge)
        if p.t == 0:
            return e.u
        if p.t == 1:
            return e.v
        return None

    def vertex_point(self, v: str) -> GraphPoint:
        if v not in self.incident:
            raise StructuralError(f"unknown vertex {v!r}")
        edge_id, t = self.incident[v][0]
        return GraphPoint(edge_id, t)

    def normalize(self, p: GraphPoint) -> GraphPoint:
        v = self.vertex_at(p)
        return p if v is None else self.vertex_point(v)

    def representations(self, p: GraphPoint) -> list:
        """Every (edge id, t) pair naming the same location as ``p``."""
        v = self.vertex_at(p)
        if v is None:
            return [(p.edge, p.t)]
        return list(self.incident[v])

    def key(self, p: GraphPoint) -> tuple:
        return (self.edge_index[p.edge], p.t)

    def point_set(self, points: Iterable[GraphPoint]) -> PointSet:
        uniq = {self.normalize(p) for p in points}
        return tuple(sorted(uniq, key=self.key))

    def degree(self, v: str) -> int:
        if v not in self.incident:
            raise StructuralError(f"unknown vertex {v!r}")
        return len(self.incident[v])

    def endpoints(self) -> list:
        return [v for v in self.vertices if self.degree(v) == 1]

    def branch_points(self) -> list:
        return [v for v in self.vertices if self.degree(v) >= 3]

    # -- metric ----------------------------------------------------------

    def distance_to_vertex(self, p: GraphPoint, w: str) -> Fraction:
        e = self.edge(p.edge)
        d = self.vertex_distance
        return min(d[w][e.u] + p.t * e.length, d[w][e.v] + (1 - p.t) * e.length)

    def distance(self, p: GraphPoint, q: GraphPoint) -> Fraction:
        ep, eq = self.edge(p.edge), self.edge(q.edge)
        best = None
        if p.edge == q.edge:
            best = abs(p.t - q.t) * ep.length
        d = self.vertex_distance
        for a, da in ((ep.u, p.t * ep.length), (ep.v, (1 - p.t) * ep.length)):
            for b, db in ((eq.u, q.t * eq.length), (eq.v, (1 - q.t) * eq.length)):
                c = da + d[a][b] + db
                if best is None or c < best:
                    best = c
        return best

    def ball(self, p: GraphPoint, r) -> "Region":
        """Closed ball ``{y : d(p, y) <= r}`` as an exact region."""
        r = as_rational(r)
        if r < 0:
            raise DomainError("radius must be non-negative")
        p = self.normalize(p)
        arcs = []
        for e in self.edges:
            L = e.length
            du = self.distance_to_vertex(p, e.u)
            dv = self.distance_to_vertex(p, e.v)
            if r >= du:
                arcs.append(Arc(e.id, 0, min(Fraction(1), (r - du) / L)))
            if r >= dv:
                arcs.append(Arc(e.id, max(Fraction(0), 1 - (r - dv) / L), 1))
            if e.id == p.edge:
                arcs.append(Arc(e.id, max(Fraction(0), p.t - r / L), min(Fraction(1), p.t + r / L)))
        return Region(self, arcs)

    def whole(self) -> list:
        return [Arc(e.id, 0, 1) for e in self.edges]

    def max_distance_between(self, a: tuple, b: tuple) -> Fraction:
        """Exact ``max d(x, y)`` for x in interval ``a`` and y in interval ``b``.

        ``a`` and ``b`` are ``(edge, lo, hi)`` triples. The distance is a
        minimum of affine route lengths in the two coordinates, so its maximum
        over the box sits on a vertex of the arrangement of the box sides and
        the lines where two routes tie.
        """
        e1, lo1, hi1 = a
        e2, lo2, hi2 = b
        E1, E2 = self.edge(e1), self.edge(e2)
        L1, L2 = E1.length, E2.length
        d = self.vertex_distance
        routes = []
        for end1, w1 in ((0, E1.u), (1, E1.v)):
            cs, c0 = (L1, Fraction(0)) if end1 == 0 else (-L1, L1)
            for end2, w2 in ((0, E2.u), (1, E2.v)):
                ct, c1 = (L2, Fraction(0)) if end2 == 0 else (-L2, L2)
                routes.append((cs, ct, c0 + c1 + d[w1][w2]))
        lines = [(Fraction(1), Fraction(0), -lo1), (Fraction(1), Fraction(0), -hi1),
                 (Fraction(0), Fraction(1), -lo2), (Fraction(0), Fraction(1), -hi2)]
        if e1 == e2:
            routes.append((L1, -L1, Fraction(0)))
            routes.append((-L1, L1, Fraction(0)))
        for i in range(len(routes)):
            for j in range(i + 1, len(routes)):
                al = routes[i][0] - routes[j][0]
                be = routes[i][1] - routes[j][1]
                if al or be:
                    lines.append((al, be, routes[i][2] - routes[j][2]))
        best = Fraction(0)
        seen = set()
        for i in range(len(lines)):
            a1, b1, g1 = lines[i]
            for j in range(i + 1, len(lines)):
                a2, b2, g2 = lines[j]
                det = a1 * b2 - a2 * b1
                if det == 0:
                    continue
                s = (b1 * g2 - g1 * b2) / det
                t = (g1 * a2 - a1 * g2) / det
                if not (lo1 <= s <= hi1 and lo2 <= t <= hi2) or (s, t) in seen:
                    continue
                seen.add((s, t))
                best = max(best, self.distance(GraphPoint(e1, s), GraphPoint(e2, t)))
        return best


class Region:
    """A closed finite union of arcs, kept in canonical form.

    Intervals on each edge are merged; a lone vertex is stored once at its
    canonical representative and dropped when an incident interval already
    reaches it.
    """

    def __init__(self, graph: GraphSpace, arcs: Iterable[Arc] = ()):
        self.graph = graph
        per = defaultdict(list)
        for a in arcs:
            graph.edge(a.edge)
            per[a.edge].append((a.lo, a.hi))
        merged = {}
        for e, ivs in per.items():
            ivs.sort()
            out = []
            for lo, hi in ivs:
                if out and lo <= out[-1][1]:
                    if hi > out[-1][1]:
                        out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
            merged[e] = out
        covered = set()
        for e, ivs in merged.items():
            edge = graph.edge(e)
            for lo, hi in ivs:
                if lo < hi:
                    if lo == 0:
                        covered.add(edge.u)
                    if hi == 1:
                        covered.add(edge.v)
        final = defaultdict(list)
        lone = set()
        for e, ivs in merged.items():
            edge = graph.edge(e)
            for lo, hi in ivs:
                if lo == hi and lo in (0, 1):
                    w = edge.u if lo == 0 else edge.v
                    if w not in covered:
                        lone.add(w)
                else:
                    final[e].append((lo, hi))
        for w in lone:
            p = graph.vertex_point(w)
            final[p.edge].append((p.t, p.t))
        self._iv = {e: tuple(sorted(v)) for e, v in final.items() if v}

    @classmethod
    def from_points(cls, graph, points):
        return cls(graph, [Arc(p.edge, p.t, p.t) for p in points])

    def intervals(self):
        order = self.graph.edge_index
        for e in sorted(self._iv, key=order.__getitem__):
            for lo, hi in self._iv[e]:
                yield e, lo, hi

    def arcs(self) -> list:
        return [Arc(e, lo, hi) for e, lo, hi in self.intervals()]

    def is_empty(self) -> bool:
        return not self._iv

    def __eq__(self, other):
        return isinstance(other, Region) and self.graph == other.graph and self._iv == other._iv

    def __hash__(self):
        return hash(tuple(self.intervals()))

    def __repr__(self):
        return "Region(" + ", ".join(str(a) for a in self.arcs()) + ")"

    def touches(self, w: str) -> bool:
        for edge_id, end in self.graph.incident[w]:
            for lo, hi in self._iv.get(edge_id, ()):
                if (end == 0 and lo == 0) or (end == 1 and hi == 1):
                    return True
        return False

    def contains_point(self, p: GraphPoint) -> bool:
        w = self.graph.vertex_at(p)
        if w is not None:
            return self.touches(w)
        return any(lo <= p.t <= hi for lo, hi in self._iv.get(p.edge, ()))

    def interior_contains(self, p: GraphPoint) -> bool:
        """True when a whole neighbourhood of ``p`` in the graph lies inside."""
        w = self.graph.vertex_at(p)
        if w is None:
            return any(lo < p.t < hi for lo, hi in self._iv.get(p.edge, ()))
        for edge_id, end in self.graph.incident[w]:
            ivs = self._iv.get(edge_id, ())
            if end == 0 and not any(lo == 0 < hi for lo, hi in ivs):
                return False
            if end == 1 and not any(lo < hi == 1 for lo, hi in ivs):
                return False
        return True

    def contains(self, other: "Region") -> bool:
        for e, lo, hi in other.intervals():
            if lo == hi:
                if not self.contains_point(GraphPoint(e, lo)):
                    return False
            elif not any(a <= lo and hi <= b for a, b in self._iv.get(e, ())):
                return False
        return True

    def union(self, other: "Region") -> "Region":
        return Region(self.graph, self.arcs() + other.arcs())

    def intersection(self, other: "Region") -> "Region":
        arcs = []
        for e, ivs in self._iv.items():
            for a, b in ivs:
                for c, d in other._iv.get(e, ()):
                    lo, hi = max(a, c), min(b, d)
                    if lo <= hi:
                        arcs.append(Arc(e, lo, hi))
        for w in self.graph.vertices:
            if self.touches(w) and other.touches(w):
                p = self.graph.vertex_point(w)
                arcs.append(Arc(p.edge, p.t, p.t))
        return Region(self.graph, arcs)

    def clip(self, edge_id: str, lo, hi) -> list:
        """Sub-intervals of ``[lo, hi]`` on ``edge_id`` lying in the region."""
        out = []
        for a, b in self._iv.get(edge_id, ()):
            x, y = max(a, lo), min(b, hi)
            if x <= y:
                out.append((x, y))
        e = self.graph.edge(edge_id)
        if lo == 0 and self.touches(e.u):
            out.append((Fraction(0), Fraction(0)))
        if hi == 1 and self.touches(e.v):
            out.append((Fraction(1), Fraction(1)))
        return out

    def components(self) -> list:
        ivs = list(self.intervals())
        parent = list(range(len(ivs)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        at_vertex = defaultdict(list)
        for i, (e, lo, hi) in enumerate(ivs):
            edge = self.graph.edge(e)
            if lo == 0:
                at_vertex[edge.u].append(i)
            if hi == 1:
                at_vertex[edge.v].append(i)
        for members in at_vertex.values():
            for i in members[1:]:
                parent[find(i)] = find(members[0])
        groups = defaultdict(list)
        for i, iv in enumerate(ivs):
            groups[find(i)].append(Arc(*iv))
        return [Region(self.graph, arcs) for _, arcs in sorted(groups.items())]

    def component_containing(self, p: GraphPoint) -> "Region":
        for comp in self.components():
            if comp.contains_point(p):
                return comp
        return Region(self.graph)

    def diameter(self) -> Fraction:
        ivs = list(self.intervals())
        best = Fraction(0)
        for i in range(len(ivs)):
            for j in range(i, len(ivs)):
                best = max(best, self.graph.max_distance_between(ivs[i], ivs[j]))
        return best


# -- module-level API -------------------------------------------------------


def normalize(p: GraphPoint, G: GraphSpace) -> GraphPoint:
    return G.normalize(p)


def path_distance(p: GraphPoint, q: GraphPoint, G: GraphSpace) -> Fraction:
    return G.distance(p, q)


def set_distance(p: GraphPoint, S: Sequence[GraphPoint], G: GraphSpace) -> Fraction:
    return min(G.distance(p, q) for q in S)


def hausdorff_distance(A: Sequence[GraphPoint], B: Sequence[GraphPoint], G: GraphSpace) -> Fraction:
    """Hausdorff distance between two non-empty finite point sets."""
    if not A or not B:
        raise DomainError("Hausdorff distance needs two non-empty sets")
    return max(max(set_distance(a, B, G) for a in A), max(set_distance(b, A, G) for b in B))


def degree(v: str, G: GraphSpace) -> int:
    return G.degree(v)


def interval_graph(length=1) -> GraphSpace:
    return GraphSpace(("v0", "v1"), (Edge("e0", "v0", "v1", as_rational(length)),))


def circle_graph(length=1) -> GraphSpace:
    return GraphSpace(("v0",), (Edge("e0", "v0", "v0", as_rational(length)),))


def star_graph(arms: int = 3, length=1) -> GraphSpace:
    """``arms`` edges from the centre ``c`` (t = 0) out to leaves ``l0, l1, ...``."""
    leaves = [f"l{i}" for i in range(arms)]
    edges = [Edge(f"e{i}", "c", leaves[i], as_rational(length)) for i in range(arms)]
    return GraphSpace(("c", *leaves), tuple(edges))
