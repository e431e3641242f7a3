"""Independent reference computations used to cross-check the library.

None of these reuse graphdyn's own algorithms: distances go through an
explicit subdivided graph and Dijkstra, tent-map facts come from closed
forms, and spectral radii from characteristic polynomials.
"""

from fractions import Fraction

import networkx as nx
import sympy


def subdivided_distance(G, p, q):
    """Shortest path after inserting p and q as extra nodes."""
    h = nx.MultiGraph()
    h.add_nodes_from(G.vertices)
    extra = {}
    for name, pt in (("P", p), ("Q", q)):
        extra.setdefault(pt.edge, []).append((pt.t, name))
    for e in G.edges:
        stops = [(Fraction(0), e.u)] + sorted(extra.get(e.id, [])) + [(Fraction(1), e.v)]
        for (t0, a), (t1, b) in zip(stops, stops[1:]):
            h.add_edge(a, b, weight=(t1 - t0) * e.length)
    return nx.dijkstra_path_length(h, "P", "Q", weight="weight")


def tent_value(x):
    return 2 * x if x <= Fraction(1, 2) else 2 - 2 * x


def tent_preimages(y):
    return sorted({y / 2, 1 - y / 2})


def tent_periodic_points(n):
    """All solutions of T^n(x) = x from the lap formula of T^n."""
    m = 2 ** n
    sols = set()
    for k in range(m):
        lo, hi = Fraction(k, m), Fraction(k + 1, m)
        x = Fraction(k, m - 1) if k % 2 == 0 else Fraction(k + 1, m + 1)
        if lo <= x <= hi:
            sols.add(x)
    return sols


def spectral_radius_exact(A):
    lam = sympy.symbols("lam")
    poly = sympy.Matrix(A).charpoly(lam)
    # Perron-Frobenius: for a nonnegative matrix the radius is a real root
    roots = sympy.Poly(poly.as_expr(), lam).real_roots()
    return max(float(r) for r in roots) if roots else 0.0


def grid_bowen_members(f_eval, G, x, n, eps, grid):
    """Grid points y with d(f^i x, f^i y) <= eps for i = 0..n (no component selection)."""
    out = []
    for y in grid:
        a, b, ok = x, y, True
        for i in range(n + 1):
            if G.distance(a, b) > eps:
                ok = False
                break
            a, b = f_eval(a), f_eval(b)
        if ok:
            out.append(y)
    return out
