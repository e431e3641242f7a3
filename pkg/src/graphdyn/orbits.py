"""Forward dynamics: omega-limit estimates, periodic orbits, Bowen balls and
covering-chain certificates.

Most routines here track *branches*: a source interval ``[lo, hi]`` on edge
``src`` on which an iterate of the map is one affine function ``A*t + B``
into a single edge ``tgt``. Refining a branch by one more application of the
map splits it along the pieces it meets.
"""

from __future__ import annotations

import os
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import ContractError, DomainError, InvariantError, ResourceError, StructuralError
from .plmap import PLGraphMap, evaluate, image_region, iterate
from .topograph import Arc, GraphPoint, Region, as_rational, format_rational

DEFAULT_ITINERARY_CAP = 2_000_000
DENOMINATOR_CAP = 2 ** 512

OMEGA_TAIL = "omega_tail"
ALPHA_TAIL = "alpha_tail"
EXACT_PERIODIC = "exact_periodic"
EXACT_SOLVE = "exact_solve"
COVERING_CHAIN = "covering_chain"


def itinerary_cap() -> int:
    raw = os.environ.get("GRAPHDYN_CAP")
    if raw is None:
        return DEFAULT_ITINERARY_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise StructuralError(f"GRAPHDYN_CAP must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise StructuralError("GRAPHDYN_CAP must be positive")
    return cap


@dataclass(frozen=True)
class LimitSetEstimate:
    points: tuple
    resolution: Fraction
    provenance: str
    parameters: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not self.points:
            raise InvariantError("a limit-set estimate cannot be empty")
        if self.resolution <= 0:
            raise InvariantError("resolution must be positive")

    def to_dict(self) -> dict:
        return {
            "points": [str(p) for p in self.points],
            "resolution": format_rational(self.resolution),
            "provenance": self.provenance,
            "parameters": {k: (format_rational(v) if isinstance(v, Fraction) else v)
                           for k, v in self.parameters.items()},
        }


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple
    certificate: str = EXACT_SOLVE

    def to_dict(self) -> dict:
        return {"period": self.period, "points": [str(p) for p in self.points],
                "certificate": self.certificate}


@dataclass(frozen=True)
class CoveringChain:
    arcs: tuple
    exponents: tuple
    verified: tuple = ()

    def to_dict(self) -> dict:
        return {"arcs": [str(a) for a in self.arcs], "exponents": list(self.exponents),
                "verified": list(self.verified)}


class Branch(NamedTuple):
    src: str
    lo: Fraction
    hi: Fraction
    tgt: str
    A: Fraction
    B: Fraction

    def image(self) -> Arc:
        x, y = self.A * self.lo + self.B, self.A * self.hi + self.B
        return Arc(self.tgt, min(x, y), max(x, y))


def identity_branches(region: Region) -> list:
    return [Branch(e, lo, hi, e, Fraction(1), Fraction(0)) for e, lo, hi in region.intervals()]


def _check_size(x: Fraction):
    if x.denominator > DENOMINATOR_CAP:
        raise ResourceError(f"denominator cap 2^512 exceeded ({x.denominator.bit_length()} bits)")


def refine(f: PLGraphMap, br: Branch) -> list:
    """Split ``br`` along the pieces its image meets and compose one more step."""
    img = br.image()
    out = []
    for pc in f.pieces_on(br.tgt):
        c, d = max(img.lo, pc.t_lo), min(img.hi, pc.t_hi)
        if c > d:
            continue
        if br.A == 0:
            lo, hi = br.lo, br.hi
        else:
            u, v = (c - br.B) / br.A, (d - br.B) / br.A
            lo, hi = min(u, v), max(u, v)
        A, B = pc.a * br.A, pc.a * br.B + pc.b
        _check_size(A)
        _check_size(B)
        out.append(Branch(br.src, lo, hi, pc.target_edge, A, B))
    return out


def restrict(br: Branch, region: Region) -> list:
    """Sub-branches of ``br`` whose image lies in ``region``."""
    out = []
    for c, d in region.clip(br.tgt, Fraction(0), Fraction(1)):
        if br.A == 0:
            if c <= br.B <= d:
                out.append(br)
            continue
        u, v = (c - br.B) / br.A, (d - br.B) / br.A
        lo, hi = max(br.lo, min(u, v)), min(br.hi, max(u, v))
        if lo <= hi:
            out.append(br._replace(lo=lo, hi=hi))
    return out


def source_region(f: PLGraphMap, branches) -> Region:
    return Region(f.graph, [Arc(b.src, b.lo, b.hi) for b in branches])


def image_of_branches(f: PLGraphMap, branches) -> Region:
    return Region(f.graph, [b.image() for b in branches])


def _dedupe(branches) -> list:
    return sorted(set(branches))


# -- omega estimates --------------------------------------------------------


def epsilon_net(G, points: Sequence[GraphPoint], eps) -> tuple:
    """Greedy net: keep a point iff it is at least ``eps`` from every kept point."""
    kept = []
    for p in points:
        if all(G.distance(p, q) >= eps for q in kept):
            kept.append(p)
    return tuple(kept)


def omega_estimate(f: PLGraphMap, x: GraphPoint, burn_in: int = 40, samples: int = 200,
                   eps=Fraction(1, 256)) -> LimitSetEstimate:
    eps = as_rational(eps)
    if samples < 1:
        raise DomainError("samples must be at least 1")
    if eps <= 0:
        raise DomainError("eps must be positive")
    orbit = iterate(f, x, burn_in + samples)
    tail = orbit[burn_in:]
    net = epsilon_net(f.graph, tail, eps)
    pts = f.graph.point_set(net)
    image = f.graph.point_set(evaluate(f, p) for p in pts)
    provenance = EXACT_PERIODIC if image == pts and set(pts) == set(tail) else OMEGA_TAIL
    return LimitSetEstimate(pts, eps, provenance,
                            {"burn_in": burn_in, "samples": samples})


# -- periodic points --------------------------------------------------------


def orbit_of(f: PLGraphMap, p: GraphPoint, max_period: int):
    """Minimal period and cycle (in orbit order) of ``p``, or None if not periodic within ``max_period``."""
    p = f.graph.normalize(p)
    cycle = [p]
    q = p
    for n in range(1, max_period + 1):
        q = evaluate(f, q)
        if q == p:
            return n, cycle
        cycle.append(q)
    return None


def _make_orbit(f, cycle, certificate):
    return PeriodicOrbit(len(cycle), f.graph.point_set(cycle), certificate)


def _sort_orbits(f, orbits):
    key = f.graph.key
    return sorted(orbits, key=lambda o: (o.period, key(o.points[0])))


def _periodic_search(f: PLGraphMap, p: int):
    if p < 1:
        raise DomainError("period bound must be at least 1")
    G = f.graph
    cap = itinerary_cap()
    candidates = set()
    arcs = set()
    count = 0
    stack = [(Branch(pc.edge, pc.t_lo, pc.t_hi, pc.target_edge, pc.a, pc.b), 1) for pc in f.pieces]
    while stack:
        br, m = stack.pop()
        count += 1
        if count > cap:
            raise ResourceError(f"itinerary cap {cap} exceeded while searching periods <= {p}")
        if br.lo == br.hi:
            candidates.add(G.normalize(GraphPoint(br.src, br.lo)))
            continue
        if br.tgt == br.src:
            if br.A != 1:
                t = br.B / (1 - br.A)
                if br.lo <= t <= br.hi:
                    candidates.add(G.normalize(GraphPoint(br.src, t)))
            elif br.B == 0:
                arcs.add((m, Arc(br.src, br.lo, br.hi)))
        if m < p:
            stack.extend((b, m + 1) for b in refine(f, br))
    for v in G.vertices:
        candidates.add(G.vertex_point(v))
    return candidates, arcs


def periodic_points(f: PLGraphMap, p: int) -> list:
    """All isolated periodic orbits of minimal period <= ``p``, solved exactly.

    Arcs on which an iterate is the identity are not expanded into points;
    see :func:`periodic_arcs`.
    """
    return list(_periodic_points(f, p, itinerary_cap()))


@lru_cache(maxsize=64)
def _periodic_points(f: PLGraphMap, p: int, cap: int) -> tuple:
    candidates, arcs = _periodic_search(f, p)
    fixed_arc_region = Region(f.graph, [a for _, a in arcs])
    seen = {}
    for c in sorted(candidates, key=f.graph.key):
        found = orbit_of(f, c, p)
        if found is None:
            continue
        n, cycle = found
        pts = f.graph.point_set(cycle)
        if pts in seen:
            continue
        if any(fixed_arc_region.interior_contains(q) for q in pts):
            continue
        seen[pts] = _make_orbit(f, cycle, EXACT_SOLVE)
    return tuple(_sort_orbits(f, seen.values()))


def periodic_arcs(f: PLGraphMap, p: int) -> list:
    """Pairs ``(m, arc)`` where ``f^m`` is the identity on the non-degenerate ``arc``."""
    return list(_periodic_arcs(f, p, itinerary_cap()))


@lru_cache(maxsize=64)
def _periodic_arcs(f: PLGraphMap, p: int, cap: int) -> tuple:
    _, arcs = _periodic_search(f, p)
    key = f.graph.edge_index
    return tuple(sorted(arcs, key=lambda ma: (ma[0], key[ma[1].edge], ma[1].lo, ma[1].hi)))


# -- Bowen balls ------------------------------------------------------------


def bowen_steps(f: PLGraphMap, x: GraphPoint, n: int, eps):
    """Yield ``(i, branches)`` for i = 0..n; the branch sources form B'_i(x, eps)
    and their affine data give f^i on it."""
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if n < 0:
        raise DomainError("n must be non-negative")
    G = f.graph
    x = G.normalize(x)
    comp = G.ball(x, eps).component_containing(x)
    branches = identity_branches(comp)
    yield 0, branches
    fx = x
    for i in range(1, n + 1):
        fx = evaluate(f, fx)
        ball = G.ball(fx, eps)
        nxt = []
        for br in branches:
            for sub in refine(f, br):
                nxt.extend(restrict(sub, ball))
        comp = source_region(f, nxt).component_containing(x)
        branches = _dedupe(b for b in nxt
                           if comp.contains_point(GraphPoint(b.src, (b.lo + b.hi) / 2)))
        yield i, branches


def bowen_ball_region(f: PLGraphMap, x: GraphPoint, n: int, eps) -> Region:
    for i, branches in bowen_steps(f, x, n, eps):
        pass
    return source_region(f, branches)


def bowen_ball_component(f: PLGraphMap, x: GraphPoint, n: int, eps) -> list:
    return bowen_ball_region(f, x, n, eps).arcs()


def expansion_constant(f: PLGraphMap, eps, n_max: int, sample_points: Sequence[GraphPoint]) -> Fraction:
    """Smallest ``diam f^n(B'_n(x, eps))`` over the samples and 0 <= n <= n_max."""
    if not sample_points:
        raise DomainError("need at least one sample point")
    best = None
    for x in sample_points:
        for _, branches in bowen_steps(f, x, n_max, eps):
            d = image_of_branches(f, branches).diameter()
            if best is None or d < best:
                best = d
    return best


# -- covering chains --------------------------------------------------------


def iterate_region(f: PLGraphMap, region: Region, n: int) -> Region:
    for _ in range(n):
        region = image_region(f, region)
    return region


def verify_chain(f: PLGraphMap, arcs, exponents) -> CoveringChain:
    arcs, exponents = tuple(arcs), tuple(int(n) for n in exponents)
    if not arcs or len(arcs) != len(exponents):
        raise ContractError("a covering chain needs one positive exponent per arc")
    flags = []
    for i, (J, n) in enumerate(zip(arcs, exponents)):
        if n < 1:
            raise ContractError("exponents must be positive")
        img = iterate_region(f, Region(f.graph, [J]), n)
        flags.append(img.contains(Region(f.graph, [arcs[(i + 1) % len(arcs)]])))
    return CoveringChain(arcs, exponents, tuple(flags))


def certify_covering(f: PLGraphMap, chain: CoveringChain) -> PeriodicOrbit:
    """Exact periodic point following a verified covering chain.

    Returns the orbit of the smallest ``z`` in ``J_0`` with
    ``f^(n_0+...+n_i)(z)`` in ``J_(i+1)`` and ``f^N(z) = z``.
    """
    checked = verify_chain(f, chain.arcs, chain.exponents)
    if not all(checked.verified):
        bad = [i for i, ok in enumerate(checked.verified) if not ok]
        raise ContractError(f"covering inclusions fail at links {bad}")
    G = f.graph
    k = len(chain.arcs)
    total = sum(chain.exponents)
    targets = [Region(G, [chain.arcs[(i + 1) % k]]) for i in range(k)]
    J0 = chain.arcs[0]
    cap = itinerary_cap()
    count = 0
    branches = [Branch(J0.edge, J0.lo, J0.hi, J0.edge, Fraction(1), Fraction(0))]
    for i, n in enumerate(chain.exponents):
        for _ in range(n):
            branches = [s for b in branches for s in refine(f, b)]
            count += len(branches)
            if count > cap:
                raise ResourceError(f"itinerary cap {cap} exceeded while certifying a covering chain")
        branches = [s for b in branches for s in restrict(b, targets[i])]
    candidates = set()
    for br in branches:
        for t in (br.lo, br.hi):
            candidates.add(GraphPoint(br.src, t))
        if br.tgt == br.src:
            if br.A != 1:
                t = br.B / (1 - br.A)
                if br.lo <= t <= br.hi:
                    candidates.add(GraphPoint(br.src, t))
    solutions = []
    for z in candidates:
        if _follows_chain(f, z, chain):
            solutions.append(z)
    if not solutions:
        raise InvariantError("no periodic point found although every covering inclusion holds")
    z = min(solutions, key=lambda p: p.t)
    n, cycle = orbit_of(f, z, total)
    return _make_orbit(f, cycle, COVERING_CHAIN)


def _follows_chain(f, z, chain) -> bool:
    G = f.graph
    J0 = Region(G, [chain.arcs[0]])
    if not J0.contains_point(z):
        return False
    y = z
    k = len(chain.arcs)
    for i, n in enumerate(chain.exponents):
        for _ in range(n):
            y = evaluate(f, y)
        if not Region(G, [chain.arcs[(i + 1) % k]]).contains_point(y):
            return False
    return G.normalize(y) == G.normalize(z)
