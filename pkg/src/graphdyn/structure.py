"""Markov partitions, transition matrices, entropy and recurrence structure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from .errors import DomainError, InvariantError, NotMarkovError
from .plmap import PLGraphMap, evaluate, image_region
from .topograph import Arc, GraphPoint, Region, as_rational

ENTROPY_TOL = 1e-9
MAX_POWER_ITERATIONS = 100_000


@dataclass(frozen=True)
class MarkovPartition:
    cells: tuple
    cut: tuple
    matrix: tuple  # row-major 0/1 tuples
    depth: int

    def to_dict(self) -> dict:
        return {
            "cells": [str(c) for c in self.cells],
            "cut": [str(p) for p in self.cut],
            "matrix": [list(r) for r in self.matrix],
            "depth": self.depth,
        }


def markov_partition(f: PLGraphMap, depth: int = 32) -> MarkovPartition:
    """Cells cut at vertices, breakpoints and their forward images.

    Raises NotMarkovError when the forward orbit of the cut set has not
    closed after ``depth`` steps.
    """
    G = f.graph
    cut = {G.vertex_point(v) for v in G.vertices}
    cut |= {G.normalize(p) for p in f.breakpoints()}
    frontier = set(cut)
    used = 0
    while frontier:
        if used == depth:
            raise NotMarkovError(f"breakpoint orbits not closed after {depth} steps")
        frontier = {evaluate(f, p) for p in frontier} - cut
        cut |= frontier
        used += 1
    cuts = {e.id: {Fraction(0), Fraction(1)} for e in G.edges}
    for p in cut:
        cuts[p.edge].add(p.t)
    cells = []
    for e in G.edges:
        ts = sorted(cuts[e.id])
        cells += [Arc(e.id, a, b) for a, b in zip(ts, ts[1:])]
    regions = [Region(G, [c]) for c in cells]
    rows = []
    for i, cell in enumerate(cells):
        img = image_region(f, regions[i])
        row = tuple(int(img.contains(r)) for r in regions)
        covered = Region(G, [c for c, bit in zip(cells, row) if bit])
        if covered != img:
            if all(lo == hi for _, lo, hi in img.intervals()):
                raise NotMarkovError(f"cell {cell} is collapsed to a point")
            raise InvariantError(f"image of cell {cell} is not a union of cells")
        rows.append(row)
    return MarkovPartition(tuple(cells), G.point_set(cut), tuple(rows), used)


def _as_array(A) -> np.ndarray:
    M = np.array(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("transition matrix must be square")
    if (M < 0).any():
        raise DomainError("transition matrix must be nonnegative")
    return M


def _block_radius(B: np.ndarray) -> float:
    """Spectral radius of an irreducible nonnegative block.

    Equal row sums give the answer exactly. Otherwise iterate with B + I
    (primitive, same Perron vector) until the Collatz-Wielandt bounds
    ``min (Mx)_i/x_i <= rho <= max (Mx)_i/x_i`` agree to within the tolerance.
    """
    sums = B.sum(axis=1)
    if np.all(sums == sums[0]):
        return float(sums[0])
    M = B + np.eye(len(B))
    x = np.ones(len(B)) / len(B)
    lo = hi = 0.0
    for _ in range(MAX_POWER_ITERATIONS):
        y = M @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo < ENTROPY_TOL * 1e-3:
            break
        x = y / y.sum()
    return (lo + hi) / 2 - 1.0


def spectral_radius(A) -> float:
    M = _as_array(A)
    n = len(M)
    if n == 0:
        return 0.0
    dg = nx.DiGraph()
    dg.add_nodes_from(range(n))
    dg.add_edges_from(zip(*np.nonzero(M)))
    best = 0.0
    for comp in nx.strongly_connected_components(dg):
        idx = sorted(comp)
        B = M[np.ix_(idx, idx)]
        if len(idx) == 1 and B[0, 0] == 0:
            continue
        best = max(best, _block_radius(B))
    return best


def entropy(A) -> float:
    """Natural log of the spectral radius; 0 for nilpotent (e.g. zero) matrices."""
    rho = spectral_radius(A)
    return max(0.0, math.log(rho)) if rho > 0 else 0.0


def _graph(A) -> nx.DiGraph:
    M = _as_array(A)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(M)))
    dg.add_edges_from(zip(*np.nonzero(M)))
    return dg


def is_transitive(A) -> bool:
    """Irreducibility: the transition graph is strongly connected and has an edge."""
    dg = _graph(A)
    return dg.number_of_nodes() > 0 and dg.number_of_edges() > 0 and nx.is_strongly_connected(dg)


def _bool_power(M: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(len(M), dtype=np.int64)
    base = (M > 0).astype(np.int64)
    while k:
        if k & 1:
            result = np.minimum(result @ base, 1)
        base = np.minimum(base @ base, 1)
        k >>= 1
    return result


def is_mixing(A) -> bool:
    """Primitivity, tested at the Wielandt exponent (n-1)^2 + 1."""
    M = _as_array(A)
    n = len(M)
    if n == 0:
        return False
    return bool(_bool_power(M, (n - 1) ** 2 + 1).all())


def grid_points(f: PLGraphMap, spacing) -> tuple:
    spacing = as_rational(spacing)
    if spacing <= 0 or spacing > 1:
        raise DomainError("grid spacing must lie in (0, 1]")
    G = f.graph
    pts = []
    for e in G.edges:
        i = 0
        while i * spacing <= 1:
            pts.append(GraphPoint(e.id, i * spacing))
            i += 1
        if (i - 1) * spacing != 1:
            pts.append(GraphPoint(e.id, Fraction(1)))
    return G.point_set(pts)


@dataclass(frozen=True)
class InaccessibleEstimate:
    points: tuple
    authoritative: bool
    seed_scale: Fraction
    horizon: int

    def to_dict(self) -> dict:
        return {"points": [str(p) for p in self.points], "authoritative": self.authoritative,
                "seed_scale": f"{self.seed_scale.numerator}/{self.seed_scale.denominator}",
                "horizon": self.horizon}


def inaccessible_estimate(f: PLGraphMap, seed_scale=Fraction(1, 64), horizon: int = 12,
                          grid=Fraction(1, 64), markov_depth: int = 32) -> InaccessibleEstimate:
    """Grid points missed by the iterated interiors of some seed neighbourhood.

    Seeds are closed balls of diameter ``seed_scale`` around the grid points.
    A grid point is reported when, for at least one seed ``U``, it lies in no
    ``interior(f^k(U))`` with ``0 <= k <= horizon``. The result is labeled
    authoritative only when the map has a Markov partition with a primitive
    transition matrix.
    """
    seed_scale = as_rational(seed_scale)
    if seed_scale <= 0:
        raise DomainError("seed_scale must be positive")
    if horizon < 0:
        raise DomainError("horizon must be non-negative")
    G = f.graph
    try:
        authoritative = is_mixing(markov_partition(f, markov_depth).matrix)
    except NotMarkovError:
        authoritative = False
    pts = grid_points(f, grid)
    missed = set()
    for c in pts:
        images = [G.ball(c, seed_scale / 2)]
        for _ in range(horizon):
            images.append(image_region(f, images[-1]))
        for p in pts:
            if p not in missed and not any(r.interior_contains(p) for r in images):
                missed.add(p)
    return InaccessibleEstimate(G.point_set(missed), authoritative, seed_scale, horizon)
