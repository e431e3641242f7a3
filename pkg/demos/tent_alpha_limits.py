"""Steer backward branches of the tent map toward chosen periodic orbits.

For a mixing map every periodic orbit is the alpha-limit set of some point,
and a covering chain read off the branch certifies the orbit exactly.
"""

from fractions import Fraction

from graphdyn.backward import SteeringPlan, alpha_estimate, covering_chain_from_branch, steer_branch
from graphdyn.orbits import certify_covering
from graphdyn.plmap import builtin
from graphdyn.structure import entropy, is_mixing, markov_partition
from graphdyn.topograph import GraphPoint, hausdorff_distance


def P(x):
    return GraphPoint("e0", Fraction(x))


def main():
    tent = builtin("tent")
    part = markov_partition(tent)
    print(f"entropy {entropy(part.matrix):.12f}, mixing {is_mixing(part.matrix)}")

    for target in [(P("2/3"),), (P("2/5"), P("4/5")), (P("2/9"), P("4/9"), P("8/9"))]:
        br = steer_branch(tent, P("7/16"), SteeringPlan(target, dwell=3), 80)
        est = alpha_estimate(br)
        d = hausdorff_distance(est.points, target, tent.graph)
        chain = covering_chain_from_branch(tent, br)
        orbit = certify_covering(tent, chain)
        print(f"target {[str(p) for p in target]}: d_H = {float(d):.2e}, "
              f"certified period {orbit.period} at {[str(p) for p in orbit.points]}")


if __name__ == "__main__":
    main()
