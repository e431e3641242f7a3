"""The fixed point 1/2 of the figure-2 map is approached from one side only.

Backward branches starting just left of 1/2 must leave (3/16, 1/2), while a
lookahead-steered branch starting on the right halves its distance each step.
"""

from fractions import Fraction

from graphdyn.backward import LOOKAHEAD, SteeringPlan, branches_avoiding, steer_branch
from graphdyn.orbits import periodic_points
from graphdyn.plmap import builtin
from graphdyn.topograph import GraphPoint


def P(x):
    return GraphPoint("e0", Fraction(x))


def main():
    f = builtin("figure2")
    print("fixed points:", [str(o.points[0]) for o in periodic_points(f, 1)])

    inside = lambda p: Fraction(3, 16) < p.t < Fraction(1, 2)
    survivors, exits = branches_avoiding(f, P("31/64"), inside, 12)
    print(f"left start: {len(survivors)} branches stay inside, exits at {[str(p) for _, p in exits]}")

    plan = SteeringPlan((P("1/2"),), dwell=1, strategy=LOOKAHEAD, lookahead=2)
    br = steer_branch(f, P("33/64"), plan, 12)
    print("right start:", " ".join(str(p.t - Fraction(1, 2)) for p in br.points))


if __name__ == "__main__":
    main()
