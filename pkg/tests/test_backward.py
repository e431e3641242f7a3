from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import P
from graphdyn.backward import (
    LOOKAHEAD,
    BackwardBranch,
    SteeringPlan,
    alpha_estimate,
    backward_tree,
    branches_avoiding,
    chain_transitive,
    covering_chain_from_branch,
    isolated_periodic_violation,
    match_periodic,
    recurrent_branch,
    steer_branch,
)
from graphdyn.errors import DomainError, InvariantError, ResourceError
from graphdyn.orbits import ALPHA_TAIL, LimitSetEstimate
from graphdyn.plmap import Piece, PLGraphMap, builtin, evaluate
from graphdyn.topograph import GraphPoint, hausdorff_distance, interval_graph


def ts(points):
    return [p.t for p in points]


def test_tree_examples(tent):
    assert ts(backward_tree(tent, P(0), 1).level_points(1)) == [0, 1]
    assert ts(backward_tree(tent, P("2/3"), 2).level_points(2)) == [
        Fraction(1, 6), Fraction(5, 6), Fraction(1, 3), Fraction(2, 3)]
    assert ts(backward_tree(tent, P(1), 1).level_points(1)) == [Fraction(1, 2)]


def test_tree_links_and_cap(tent):
    tree = backward_tree(tent, P("1/3"), 6)
    for j in range(1, 7):
        assert tree.levels[j]
        for node in tree.levels[j]:
            assert evaluate(tent, node.point) == tree.levels[j - 1][node.parent].point
    with pytest.raises(ResourceError):
        backward_tree(tent, P("1/3"), 10, cap=100)


def test_tree_flags_arc_preimages():
    half = Fraction(1, 2)
    f = PLGraphMap(interval_graph(), [Piece("e0", 0, half, "e0", 2, 0), Piece("e0", half, 1, "e0", 0, 1)])
    tree = backward_tree(f, P(1), 1)
    assert tree.flagged and ts(tree.level_points(1)) == [half]


def test_steer_toward_fixed_point(tent):
    br = steer_branch(tent, P("1/2"), SteeringPlan((P("2/3"),), dwell=1), 20)
    assert br.verified and br.depth == 20
    assert abs(br.points[-1].t - Fraction(2, 3)) < Fraction(1, 2 ** 10)
    # regression baseline: greedy takes the right preimage 3/4 first
    assert br.points[1] == P("3/4")


def test_steer_stays_on_fixed_point(tent):
    br = steer_branch(tent, P("2/3"), SteeringPlan((P("2/3"),)), 10)
    assert set(br.points) == {P("2/3")}
    assert alpha_estimate(br).points == (P("2/3"),)


def test_steer_period_two(tent):
    target = (P("2/5"), P("4/5"))
    br = steer_branch(tent, P("1/2"), SteeringPlan(target, dwell=3), 60)
    est = alpha_estimate(br, eps=Fraction(1, 100))
    assert hausdorff_distance(est.points, target, tent.graph) < Fraction(1, 100)
    assert len(est.points) == 2


def test_steering_is_deterministic(tent):
    plan = SteeringPlan((P("2/9"), P("4/9"), P("8/9")), dwell=3)
    a = steer_branch(tent, P("7/16"), plan, 40)
    b = steer_branch(tent, P("7/16"), plan, 40)
    assert a.points == b.points


def test_dead_end_reports_depth():
    f = PLGraphMap(interval_graph(), [Piece("e0", 0, 1, "e0", Fraction(1, 2), 0)])
    br = steer_branch(f, P("3/4"), SteeringPlan((P(0),)), 5)
    assert br.dead_end and br.depth == 0 and br.requested_depth == 5


def test_plan_validation():
    with pytest.raises(DomainError):
        SteeringPlan(())
    with pytest.raises(DomainError):
        SteeringPlan((P(0),), dwell=0)
    with pytest.raises(DomainError):
        SteeringPlan((P(0),), strategy="random")


def test_broken_branch_detected(tent):
    with pytest.raises(InvariantError):
        BackwardBranch((P("1/2"), P("1/3")), tent).verify()


def test_alpha_examples(tent):
    alt = BackwardBranch(tuple(P("2/5") if j % 2 == 0 else P("4/5") for j in range(21)), tent).verify()
    est = alpha_estimate(alt)
    assert est.points == (P("2/5"), P("4/5")) and est.provenance == ALPHA_TAIL
    with pytest.raises(DomainError):
        alpha_estimate(alt, tail_fraction=0)


def test_chain_examples(tent):
    eps = Fraction(1, 100)
    assert chain_transitive([P("2/5"), P("4/5")], tent, eps)
    assert not chain_transitive([P(0), P("2/3")], tent, eps)
    assert chain_transitive([P("2/3")], tent, Fraction(1, 10 ** 6))


def est(points, eps=Fraction(1, 256)):
    return LimitSetEstimate(tuple(points), eps, ALPHA_TAIL)


def test_isolated_periodic_examples(tent):
    eps = Fraction(1, 256)
    assert isolated_periodic_violation(est([P("2/3")]), tent, eps) is None
    assert isolated_periodic_violation(est([P("2/5"), P("4/5")]), tent, eps) is None
    near = [P(Fraction(2, 3) + Fraction(k, 1024)) for k in (-1, 0, 1)]
    w = isolated_periodic_violation(est([P(0)] + near), tent, eps)
    assert w is not None and w.points == (P(0),)


def test_recurrent_examples(tent, fig2):
    br = recurrent_branch(tent, P("2/3"), 10)
    assert set(br.points) == {P("2/3")}
    br = recurrent_branch(tent, P("2/5"), 10)
    assert br.points[:3] == (P("2/5"), P("4/5"), P("2/5"))
    assert P("2/5") in alpha_estimate(br).points
    br = recurrent_branch(fig2, P("1/2"), 10)
    assert set(br.points) == {P("1/2")}


def test_recurrent_fallback_for_nonperiodic(tent):
    br = recurrent_branch(tent, P("1/7"), 10, max_period=1)
    assert "steered" in br.note and br.verified


def test_figure2_left_side(fig2):
    survivors, exits = branches_avoiding(fig2, P("31/64"), lambda p: Fraction(3, 16) < p.t < Fraction(1, 2), 12)
    assert survivors == []
    assert sorted(ts(p for _, p in exits)) == [Fraction(31, 256), Fraction(225, 256)]


def test_figure2_right_side_needs_lookahead(fig2):
    greedy = steer_branch(fig2, P("33/64"), SteeringPlan((P("1/2"),), dwell=1), 5)
    assert greedy.points[1] == P("63/128")  # tie between 1/2 -+ 1/128 goes left
    plan = SteeringPlan((P("1/2"),), dwell=1, strategy=LOOKAHEAD, lookahead=2)
    br = steer_branch(fig2, P("33/64"), plan, 30)
    gaps = [p.t - Fraction(1, 2) for p in br.points]
    assert all(g > 0 for g in gaps)
    assert all(b == a / 2 for a, b in zip(gaps, gaps[1:]))


def test_covering_chain_from_branch(tent):
    target = (P("2/5"), P("4/5"))
    br = steer_branch(tent, P("1/3"), SteeringPlan(target, dwell=3), 60)
    chain = covering_chain_from_branch(tent, br)
    assert chain is not None and all(chain.verified) and chain.exponents == (2,)


def test_match_periodic_uses_fixed_arcs():
    f = builtin("cantor_bumps:2")
    m = match_periodic([P("1/20")], f, Fraction(1, 64))
    assert m is not None and m[0] == (P("1/20"),)
    assert match_periodic([P("1/2")], f, Fraction(1, 64)) is None


# -- properties -------------------------------------------------------------

starts = st.fractions(min_value=0, max_value=1, max_denominator=128)


@given(starts, st.sampled_from([(Fraction(2, 3),), (Fraction(2, 5), Fraction(4, 5)), (0,)]))
def test_steered_alpha_is_chain_transitive(x, target):
    tent = builtin("tent")
    plan = SteeringPlan(tuple(P(t) for t in target), dwell=3)
    br = steer_branch(tent, P(x), plan, 40)
    assert br.verified
    a = alpha_estimate(br)
    assert chain_transitive(a.points, tent, 4 * a.resolution)


@given(st.sampled_from(["tent", "doubling_circle", "star3_mix", "figure2"]), st.integers(0, 16), st.integers(0, 5))
def test_tree_levels_nonempty_for_surjective_maps(name, k, depth):
    f = builtin(name)
    x = GraphPoint(f.graph.edges[-1].id, Fraction(k, 16))
    tree = backward_tree(f, x, depth)
    assert all(tree.levels[j] for j in range(depth + 1))
