"""Verification suites: batches of measured assertions about a map.

Every assertion records what was measured and, on failure, a witness that
reproduces it. Suites are deterministic for a given map, budget and seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .backward import (
    LOOKAHEAD,
    BackwardBranch,
    SteeringPlan,
    alpha_estimate,
    branches_avoiding,
    chain_transitive,
    covering_chain_from_branch,
    isolated_periodic_violation,
    match_periodic,
    recurrent_branch,
    steer_branch,
)
from .orbits import bowen_steps, certify_covering, expansion_constant, periodic_points, source_region
from .plmap import PLGraphMap, builtin, preimages
from .structure import entropy, grid_points, is_mixing, markov_partition, spectral_radius
from .topograph import GraphPoint, format_rational, hausdorff_distance

SUITES = ("mixing", "zero-entropy", "figure2", "chain")
DEFAULT_MAPS = {"mixing": "tent", "zero-entropy": "cantor_bumps:3", "figure2": "figure2", "chain": "tent"}
DEFAULT_BUDGETS = {"mixing": 20, "zero-entropy": 200, "figure2": 12, "chain": 0}


def _q(x) -> str:
    return format_rational(x)


def _pts(points) -> list:
    return [str(p) for p in points]


@dataclass
class Assertion:
    id: str
    passed: bool
    measured: dict = field(default_factory=dict)
    witness: object = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "passed": self.passed, "measured": self.measured}
        if not self.passed:
            d["witness"] = self.witness
        return d


@dataclass
class SuiteResult:
    suite: str
    map_name: str
    assertions: list = field(default_factory=list)
    estimates: list = field(default_factory=list)  # (case id, LimitSetEstimate)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def add(self, id, passed, measured=None, witness=None):
        self.assertions.append(Assertion(id, bool(passed), measured or {}, witness))

    def by_prefix(self, prefix: str) -> list:
        return [a for a in self.assertions if a.id.startswith(prefix)]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "map": self.map_name,
            "passed": self.passed,
            "counts": {"total": len(self.assertions),
                       "failed": sum(not a.passed for a in self.assertions)},
            "assertions": [a.to_dict() for a in sorted(self.assertions, key=lambda a: a.id)],
        }


def standard_starts(f: PLGraphMap) -> list:
    e = f.graph.edges[0].id
    return [GraphPoint(e, Fraction(1, 2)), GraphPoint(e, Fraction(1, 3)), GraphPoint(e, Fraction(7, 16))]


def _chain_checks(res: SuiteResult, f: PLGraphMap):
    for case, est in res.estimates:
        eps = 4 * est.resolution
        ok = chain_transitive(est.points, f, eps)
        res.add(f"chain/{case}/transitive", ok, {"epsilon": _q(eps), "size": len(est.points)},
                _pts(est.points))
        orb = isolated_periodic_violation(est, f, est.resolution)
        res.add(f"chain/{case}/isolated-periodic", orb is None, {"max_period": 4},
                None if orb is None else {"orbit": _pts(orb.points), "estimate": _pts(est.points)})


def steering_cases(f: PLGraphMap, res: SuiteResult, depth: int = 80, tol=Fraction(1, 64)):
    """Steer from the standard starts toward every periodic orbit of period <= 3."""
    G = f.graph
    targets = periodic_points(f, 3)
    for i, x in enumerate(standard_starts(f)):
        for j, orb in enumerate(targets):
            case = f"steer/{i:02d}-{j:02d}"
            br = steer_branch(f, x, SteeringPlan(orb.points, dwell=3), depth)
            est = alpha_estimate(br)
            d = hausdorff_distance(est.points, orb.points, G)
            res.add(case, d < tol and not br.dead_end,
                    {"start": str(x), "target": _pts(orb.points), "hausdorff": _q(d),
                     "hausdorff_float": float(d), "depth": br.depth},
                    {"alpha": _pts(est.points), "tail": _pts(br.points[-4:])})
            res.estimates.append((case, est))


def mixing_suite(f: PLGraphMap, budget: int = 20, seed: int = 0) -> SuiteResult:
    G = f.graph
    res = SuiteResult("mixing", f.name)
    part = markov_partition(f)
    h = entropy(part.matrix)
    res.add("entropy/positive", h > 0, {"entropy": h})
    res.add("entropy/primitive", is_mixing(part.matrix), {"cells": len(part.cells)}, part.to_dict()["matrix"])

    steering_cases(f, res)

    rng = random.Random(seed)
    orbits = periodic_points(f, 4)
    grid = grid_points(f, Fraction(1, 64))
    for k in range(budget):
        case = f"cover/{k:03d}"
        x = rng.choice(grid)
        orb = rng.choice(orbits)
        br = steer_branch(f, x, SteeringPlan(orb.points, dwell=3), 80)
        est = alpha_estimate(br)
        res.estimates.append((case, est))
        chain = covering_chain_from_branch(f, br)
        if chain is None:
            res.add(case, False, {"start": str(x), "target": _pts(orb.points)}, {"alpha": _pts(est.points)})
            continue
        cert = certify_covering(f, chain)
        d = hausdorff_distance(cert.points, est.points, G)
        res.add(case, d < Fraction(1, 16),
                {"start": str(x), "target": _pts(orb.points), "chain": chain.to_dict(),
                 "orbit": _pts(cert.points), "hausdorff_float": float(d)},
                {"alpha": _pts(est.points)})

    eps, delta = Fraction(1, 10), Fraction(1, 100)
    sample = grid_points(f, Fraction(1, 16))
    for i, x in enumerate(sample):
        prev, hit, antitone = None, None, True
        for n, branches in bowen_steps(f, x, 20, eps):
            reg = source_region(f, branches)
            if prev is not None and not prev.contains(reg):
                antitone = False
            d = reg.diameter()
            if hit is None and d < delta:
                hit = n
            prev = reg
        res.add(f"bowen/{i:02d}", antitone and hit is not None,
                {"point": str(x), "antitone": antitone, "first_n_below_delta": hit})
    eta = expansion_constant(f, eps, 10, sample)
    res.add("bowen/expansion", eta > 0, {"eta": _q(eta), "eta_float": float(eta)})
    _chain_checks(res, f)
    return res


def zero_entropy_suite(f: PLGraphMap, budget: int = 200, seed: int = 0, baseline: float = 0.0) -> SuiteResult:
    res = SuiteResult("zero-entropy", f.name)
    part = markov_partition(f)
    h = entropy(part.matrix)
    res.add("entropy/baseline", h == baseline, {"entropy": h, "baseline": baseline,
                                                "spectral_radius": spectral_radius(part.matrix)})
    rng = random.Random(seed)
    grid = grid_points(f, Fraction(1, 256))
    G = f.graph
    for k in range(budget):
        case = f"branch/{k:03d}"
        x = rng.choice(grid)
        pts = [G.normalize(x)]
        for _ in range(60):
            cands = preimages(f, pts[-1])
            if not cands:
                break
            pts.append(rng.choice(cands))
        br = BackwardBranch(tuple(pts), f, requested_depth=60).verify()
        est = alpha_estimate(br)
        res.estimates.append((case, est))
        m = match_periodic(est.points, f, Fraction(1, 64))
        res.add(case, m is not None and br.depth == 60,
                {"start": str(x), "alpha": _pts(est.points),
                 "orbit": None if m is None else _pts(m[0]),
                 "hausdorff": None if m is None else _q(m[1])},
                {"tail": _pts(br.points[-6:])})
    _chain_checks(res, f)
    return res


def figure2_suite(f: PLGraphMap, budget: int = 12) -> SuiteResult:
    res = SuiteResult("figure2", f.name)
    e = f.graph.edges[0].id
    half, q, r, w = Fraction(1, 2), Fraction(1, 8), Fraction(7, 8), Fraction(1, 16)
    x0 = GraphPoint(e, Fraction(31, 64))
    survivors, exits = branches_avoiding(f, x0, lambda p: q + w < p.t < half, budget)
    res.add("left/no-branch-stays", not survivors,
            {"start": str(x0), "depth": budget, "exits": len(exits)},
            [_pts(s) for s in survivors[:3]])
    bad = [(path, p) for path, p in exits
           if not (abs(p.t - q) <= w or (p.t > 1 - 3 * w and abs(p.t - r) <= w))]
    res.add("left/exits-near-q-or-r", not bad,
            {"exit_points": sorted({str(p) for _, p in exits})},
            [{"branch": _pts(path), "exit": str(p)} for path, p in bad[:3]])
    x1 = GraphPoint(e, Fraction(33, 64))
    plan = SteeringPlan((GraphPoint(e, half),), dwell=1, strategy=LOOKAHEAD, lookahead=2)
    br = steer_branch(f, x1, plan, 40)
    gaps = [p.t - half for p in br.points]
    halving = all(gaps[j + 1] == gaps[j] / 2 for j in range(len(gaps) - 1)) and gaps[0] > 0
    res.add("right/halving", halving and br.depth == 40,
            {"start": str(x1), "depth": br.depth, "last_gap": _q(gaps[-1])}, _pts(br.points[:8]))
    res.estimates.append(("right", alpha_estimate(br)))
    rb = recurrent_branch(f, GraphPoint(e, half), 20)
    res.add("fixed/recurrent", all(p.t == half for p in rb.points), {"depth": rb.depth})
    _chain_checks(res, f)
    return res


def chain_suite(f: PLGraphMap, budget: int = 0, seed: int = 0) -> SuiteResult:
    res = SuiteResult("chain", f.name)
    steering_cases(f, res)
    for j, orb in enumerate(periodic_points(f, 3)):
        br = recurrent_branch(f, orb.points[0], 30)
        res.estimates.append((f"recurrent/{j:02d}", alpha_estimate(br)))
    rng = random.Random(seed)
    grid = grid_points(f, Fraction(1, 64))
    for k in range(budget):
        x = rng.choice(grid)
        orb = rng.choice(periodic_points(f, 4))
        br = steer_branch(f, x, SteeringPlan(orb.points, dwell=3), 80)
        res.estimates.append((f"random/{k:03d}", alpha_estimate(br)))
    res.assertions = [a for a in res.assertions if not a.id.startswith("steer/")]
    _chain_checks(res, f)
    return res


def run_suite(name: str, f: PLGraphMap = None, budget: int = None, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {list(SUITES)}")
    f = builtin(DEFAULT_MAPS[name]) if f is None else f
    budget = DEFAULT_BUDGETS[name] if budget is None else budget
    if name == "mixing":
        return mixing_suite(f, budget, seed)
    if name == "zero-entropy":
        return zero_entropy_suite(f, budget, seed)
    if name == "figure2":
        return figure2_suite(f, budget)
    return chain_suite(f, budget, seed)
