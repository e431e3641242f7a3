"""Backward branches: preimage trees, steered branches, alpha-limit estimates
and finite chain-transitivity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx

from .errors import DomainError, InvariantError, ResourceError
from .orbits import (
    ALPHA_TAIL,
    CoveringChain,
    LimitSetEstimate,
    PeriodicOrbit,
    bowen_ball_region,
    epsilon_net,
    itinerary_cap,
    iterate_region,
    orbit_of,
    periodic_arcs,
    periodic_points,
    verify_chain,
)
from .plmap import PLGraphMap, evaluate, preimages, preimages_with_arcs
from .topograph import Arc, GraphPoint, Region, as_rational, format_rational, hausdorff_distance

GREEDY = "greedy_nearest"
LOOKAHEAD = "greedy_with_lookahead"


@dataclass(frozen=True)
class TreeNode:
    point: GraphPoint
    parent: int  # index into the previous level, -1 for the root


@dataclass
class PreimageTree:
    root: GraphPoint
    levels: list
    arc_preimages: list = field(default_factory=list)  # (level, parent index, Arc)

    @property
    def flagged(self) -> bool:
        return bool(self.arc_preimages)

    def level_points(self, j: int) -> list:
        return [n.point for n in self.levels[j]]

    def size(self) -> int:
        return sum(len(lv) for lv in self.levels)


def backward_tree(f: PLGraphMap, x: GraphPoint, depth: int, cap: Optional[int] = None) -> PreimageTree:
    """Full preimage tree; children of a node are ordered by (edge, coordinate)."""
    if depth < 0:
        raise DomainError("depth must be non-negative")
    cap = itinerary_cap() if cap is None else cap
    x = f.graph.normalize(x)
    tree = PreimageTree(x, [[TreeNode(x, -1)]])
    total = 1
    for j in range(1, depth + 1):
        level = []
        for i, node in enumerate(tree.levels[-1]):
            pts, arcs = preimages_with_arcs(f, node.point)
            for a in arcs:
                tree.arc_preimages.append((j, i, a))
            for p in pts:
                level.append(TreeNode(p, i))
            total += len(pts)
            if total > cap:
                raise ResourceError(f"preimage tree exceeded the node cap {cap} at level {j}")
        tree.levels.append(level)
    return tree


@dataclass(frozen=True)
class SteeringPlan:
    waypoints: tuple
    dwell: int = 3
    strategy: str = GREEDY
    lookahead: int = 1
    tolerance: Fraction = Fraction(1, 256)

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "tolerance", as_rational(self.tolerance))
        if not self.waypoints:
            raise DomainError("a steering plan needs at least one waypoint")
        if self.dwell < 1:
            raise DomainError("dwell must be at least 1")
        if self.strategy not in (GREEDY, LOOKAHEAD):
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if self.lookahead < 1:
            raise DomainError("lookahead must be at least 1")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")

    def waypoint(self, step: int) -> GraphPoint:
        return self.waypoints[(step // self.dwell) % len(self.waypoints)]

    def to_dict(self) -> dict:
        return {
            "waypoints": [str(p) for p in self.waypoints],
            "dwell": self.dwell,
            "strategy": self.strategy if self.strategy == GREEDY else f"{LOOKAHEAD}({self.lookahead})",
            "tolerance": format_rational(self.tolerance),
        }


@dataclass
class BackwardBranch:
    points: tuple  # x_0, x_-1, ..., x_-N
    f: PLGraphMap = field(repr=False)
    verified: bool = False
    dead_end: bool = False
    requested_depth: int = 0
    note: str = ""

    @property
    def depth(self) -> int:
        return len(self.points) - 1

    def verify(self) -> "BackwardBranch":
        for j in range(1, len(self.points)):
            if evaluate(self.f, self.points[j]) != self.points[j - 1]:
                raise InvariantError(f"branch broken at index -{j}: f({self.points[j]}) != {self.points[j - 1]}")
        self.verified = True
        return self

    def export_lines(self, plan: Optional[SteeringPlan] = None) -> list:
        lines = []
        if plan is not None:
            d = plan.to_dict()
            lines.append("# waypoints=" + ",".join(d["waypoints"]))
            lines.append(f"# dwell={d['dwell']} strategy={d['strategy']} tolerance={d['tolerance']}")
        lines.append(f"# depth={self.depth} requested={self.requested_depth} dead_end={str(self.dead_end).lower()}")
        lines += [f"{-j}:{p}" for j, p in enumerate(self.points)]
        return lines

    def csv_lines(self) -> list:
        G = self.f.graph
        out = ["index,edge,t,t_float"]
        for j, p in enumerate(self.points):
            out.append(f"{-j},{p.edge},{format_rational(p.t)},{float(p.t):.12g}")
        return out


def _score(G, c: GraphPoint, plan: SteeringPlan, step: int) -> tuple:
    near = min(G.distance(c, w) for w in plan.waypoints)
    return (near // plan.tolerance, G.distance(c, plan.waypoint(step)))


def _lookahead_score(f, c, plan, step, k, memo):
    """Best summed score over backward paths of length k starting at c."""
    key = (c, step, k)
    if key in memo:
        return memo[key]
    s = _score(f.graph, c, plan, step)
    if k == 1:
        res = s
    else:
        best = None
        for d in preimages(f, c):
            sub = _lookahead_score(f, d, plan, step + 1, k - 1, memo)
            if best is None or sub < best:
                best = sub
        if best is None:
            res = (math.inf, math.inf)
        else:
            res = (s[0] + best[0], s[1] + best[1])
    memo[key] = res
    return res


def steer_branch(f: PLGraphMap, x: GraphPoint, plan: SteeringPlan, depth: int) -> BackwardBranch:
    """Backward branch chosen step by step to shadow the plan's waypoints.

    Each candidate preimage is scored first by its distance to the whole
    waypoint set (in units of ``plan.tolerance``), then by its distance to
    the currently scheduled waypoint; remaining ties go to the smallest
    (edge, coordinate). The lookahead strategy sums these scores along the
    best continuation of ``plan.lookahead`` levels.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    G = f.graph
    pts = [G.normalize(x)]
    k = plan.lookahead if plan.strategy == LOOKAHEAD else 1
    dead = False
    for j in range(depth):
        cands = preimages(f, pts[-1])
        if not cands:
            dead = True
            break
        memo = {}
        best = min(cands, key=lambda c: (_lookahead_score(f, c, plan, j, k, memo), G.key(c)))
        pts.append(best)
    br = BackwardBranch(tuple(pts), f, dead_end=dead, requested_depth=depth)
    return br.verify()


def alpha_estimate(branch: BackwardBranch, tail_fraction=Fraction(1, 2), eps=Fraction(1, 256)) -> LimitSetEstimate:
    """Greedy eps-net (deepest point first) of the deepest ceil(tail_fraction * N) points."""
    tail_fraction, eps = as_rational(tail_fraction), as_rational(eps)
    if not 0 < tail_fraction <= 1:
        raise DomainError("tail_fraction must lie in (0, 1]")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not branch.verified:
        branch.verify()
    m = max(1, math.ceil(tail_fraction * branch.depth))
    tail = list(reversed(branch.points))[:m]
    G = branch.f.graph
    pts = G.point_set(epsilon_net(G, tail, eps))
    return LimitSetEstimate(pts, eps, ALPHA_TAIL,
                            {"depth": branch.depth, "tail_fraction": tail_fraction})


def chain_transitive(S: Sequence[GraphPoint], f: PLGraphMap, eps) -> bool:
    eps = as_rational(eps)
    if not S:
        raise DomainError("S must be non-empty")
    if eps <= 0:
        raise DomainError("eps must be positive")
    G = f.graph
    S = G.point_set(S)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(S)))
    for i, u in enumerate(S):
        fu = evaluate(f, u)
        for j, v in enumerate(S):
            if G.distance(fu, v) < eps:
                dg.add_edge(i, j)
    return nx.is_strongly_connected(dg)


def isolated_periodic_violation(S: LimitSetEstimate, f: PLGraphMap, eps, max_period: int = 4,
                                gap_factor: int = 4) -> Optional[PeriodicOrbit]:
    """A periodic orbit shadowed by part of ``S`` but split off from the rest.

    An orbit of period <= ``max_period`` matches when each of its points has
    a point of ``S`` within ``eps``. It is a witness when the remaining points
    of ``S`` exist and all stay farther than ``gap_factor * eps`` from it.
    """
    eps = as_rational(eps)
    G = f.graph
    pts = S.points
    for orb in periodic_points(f, max_period):
        if not all(any(G.distance(o, s) <= eps for s in pts) for o in orb.points):
            continue
        rest = [s for s in pts if all(G.distance(s, o) > eps for o in orb.points)]
        if not rest:
            continue
        gap = min(G.distance(s, o) for s in rest for o in orb.points)
        if gap > gap_factor * eps:
            return orb
    return None


def recurrent_branch(f: PLGraphMap, x: GraphPoint, depth: int, max_period: int = 64) -> BackwardBranch:
    """Branch with ``x`` in its alpha-limit set.

    For periodic ``x`` the branch walks the cycle backwards, so ``x`` recurs
    exactly. Otherwise this falls back to steering toward ``{x}``, which only
    keeps the branch near ``x`` heuristically.
    """
    G = f.graph
    x = G.normalize(x)
    found = orbit_of(f, x, max_period)
    if found is not None:
        n, cycle = found
        pts = tuple(cycle[(-j) % n] for j in range(depth + 1))
        return BackwardBranch(pts, f, requested_depth=depth, note="periodic cycle").verify()
    br = steer_branch(f, x, SteeringPlan((x,), dwell=1), depth)
    br.note = "steered toward x; recurrence not certified"
    return br


def branches_avoiding(f: PLGraphMap, x: GraphPoint, inside, depth: int, cap: Optional[int] = None):
    """Depth-first search of backward branches from ``x`` while they stay in ``inside``.

    ``inside`` is a predicate on points. Returns ``(survivors, exits)`` where
    survivors are branches of full ``depth`` that never leave, and exits are
    ``(branch_prefix, first_point_outside)`` pairs.
    """
    cap = itinerary_cap() if cap is None else cap
    survivors, exits = [], []
    stack = [(f.graph.normalize(x),)]
    count = 0
    while stack:
        path = stack.pop()
        if len(path) - 1 == depth:
            survivors.append(path)
            continue
        for p in reversed(preimages(f, path[-1])):
            count += 1
            if count > cap:
                raise ResourceError(f"branch search exceeded the node cap {cap}")
            if inside(p):
                stack.append(path + (p,))
            else:
                exits.append((path, p))
    return survivors, exits


def match_periodic(S: Sequence[GraphPoint], f: PLGraphMap, tol, max_period: int = 4):
    """First exact periodic orbit (or point of an arc fixed by some iterate)
    within Hausdorff distance ``tol`` of ``S``; returns ``(orbit_points, distance)`` or None."""
    tol = as_rational(tol)
    G = f.graph
    best = None
    for orb in periodic_points(f, max_period):
        d = hausdorff_distance(S, orb.points, G)
        if d < tol and (best is None or d < best[1]):
            best = (orb.points, d)
    if best is None:
        for m, arc in periodic_arcs(f, max_period):
            for s in S:
                if Region(G, [arc]).contains_point(s):
                    orbit = G.point_set(_cycle(f, s, m))
                    d = hausdorff_distance(S, orbit, G)
                    if d < tol and (best is None or d < best[1]):
                        best = (orbit, d)
    return best


def _cycle(f, s, m):
    out = [s]
    for _ in range(m - 1):
        out.append(evaluate(f, out[-1]))
    return out


def covering_chain_from_branch(f: PLGraphMap, branch: BackwardBranch, max_return: int = 8,
                               radius=Fraction(1, 64), tail: int = 8) -> Optional[CoveringChain]:
    """Look for a one-arc covering chain around the deep end of the branch.

    For a tail point ``z`` and return time ``n``, ``J`` is the Bowen
    component ``B'_n(z, radius)`` cut down to ``z``'s edge; the chain is
    accepted when ``f^n(J)`` contains ``J``.
    """
    G = f.graph
    radius = as_rational(radius)
    for idx in range(branch.depth, max(branch.depth - tail, 0) - 1, -1):
        z = branch.points[idx]
        for n in range(1, max_return + 1):
            comp = bowen_ball_region(f, z, n, radius)
            ivs = [(lo, hi) for e, lo, hi in comp.intervals() if e == z.edge and lo <= z.t <= hi]
            if not ivs:
                continue
            lo, hi = ivs[0]
            if lo == hi:
                continue
            J = Arc(z.edge, lo, hi)
            if iterate_region(f, Region(G, [J]), n).contains(Region(G, [J])):
                return verify_chain(f, (J,), (n,))
    return None
