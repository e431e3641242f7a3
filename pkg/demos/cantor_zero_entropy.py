"""Random backward branches of a zero-entropy map land on periodic orbits."""

import random
from collections import Counter
from fractions import Fraction

from graphdyn.backward import BackwardBranch, alpha_estimate, match_periodic
from graphdyn.plmap import builtin, preimages
from graphdyn.structure import entropy, grid_points, markov_partition


def main(n=50, depth=60, seed=0):
    f = builtin("cantor_bumps:3")
    print(f"{f.name}: {len(f.pieces)} pieces, entropy {entropy(markov_partition(f).matrix)}")
    rng = random.Random(seed)
    grid = grid_points(f, Fraction(1, 256))
    periods = Counter()
    for _ in range(n):
        pts = [f.graph.normalize(rng.choice(grid))]
        for _ in range(depth):
            pts.append(rng.choice(preimages(f, pts[-1])))
        est = alpha_estimate(BackwardBranch(tuple(pts), f).verify())
        m = match_periodic(est.points, f, Fraction(1, 64))
        periods["unmatched" if m is None else len(m[0])] += 1
    print("matched alpha estimates by orbit size:", dict(periods))


if __name__ == "__main__":
    main()
