"""Command-line driver: ``graphdyn {analyze,steer,entropy,verify}``.

Every command prints one JSON report to stdout. Exit codes: 0 success
(including reported heuristic shortfalls), 1 input error, 2 resource cap,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import time
from fractions import Fraction

from .backward import GREEDY, LOOKAHEAD, SteeringPlan, alpha_estimate, steer_branch
from .errors import (
    ContractError,
    DomainError,
    InvariantError,
    NotMarkovError,
    ResourceError,
    StructuralError,
)
from .orbits import omega_estimate, orbit_of
from .plmap import builtin, iterate, load_map, map_hash
from .structure import entropy, inaccessible_estimate, is_mixing, is_transitive, markov_partition
from .suites import DEFAULT_MAPS, SUITES, run_suite
from .topograph import GraphPoint, format_rational, hausdorff_distance, parse_rational

SCHEMA_VERSION = 1


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _rational(text):
    try:
        return parse_rational(text)
    except StructuralError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_rational(text):
    x = _rational(text)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive rational, got {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphdyn", description="Limit sets of piecewise-linear graph maps.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_map(sp, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--builtin", help="builtin map name, parameters after a colon (cantor_bumps:3)")
        g.add_argument("--map", metavar="FILE", help="JSON map spec")

    def add_common(sp):
        sp.add_argument("--no-timestamp", action="store_true", help="omit timestamp and wall-clock fields")

    a = sub.add_parser("analyze", help="forward orbit, omega estimate, periodicity")
    add_map(a)
    a.add_argument("--point", required=True, help="edge:p/q")
    a.add_argument("--iters", type=int, default=200)
    a.add_argument("--burn-in", type=int, default=None)
    a.add_argument("--samples", type=int, default=None)
    a.add_argument("--epsilon", type=_positive_rational, default=Fraction(1, 256))
    add_common(a)

    s = sub.add_parser("steer", help="steered backward branch and its alpha estimate")
    add_map(s)
    s.add_argument("--start", required=True, help="edge:p/q")
    t = s.add_mutually_exclusive_group(required=True)
    t.add_argument("--target-orbit", metavar="POINT", help="periodic orbit through POINT")
    t.add_argument("--target-omega", metavar="POINT", help="omega estimate of POINT")
    t.add_argument("--target-set", metavar="POINTS", help="comma-separated edge:p/q list")
    s.add_argument("--depth", type=int, default=60)
    s.add_argument("--dwell", type=int, default=3)
    s.add_argument("--strategy", default=GREEDY, help="greedy or lookahead:K")
    s.add_argument("--epsilon", type=_positive_rational, default=Fraction(1, 256))
    s.add_argument("--burn-in", type=int, default=40)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--out", metavar="FILE", help="branch export; a CSV sidecar goes to FILE.csv")
    add_common(s)

    e = sub.add_parser("entropy", help="Markov partition, matrix, entropy, mixing")
    add_map(e)
    e.add_argument("--depth", type=int, default=32)
    e.add_argument("--inaccessible", action="store_true", help="also estimate inaccessible points")
    e.add_argument("--epsilon", type=_positive_rational, default=Fraction(1, 64),
                   help="seed scale for the inaccessible-point estimate")
    e.add_argument("--horizon", type=int, default=12)
    add_common(e)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    add_map(v, required=False)
    v.add_argument("--budget", type=int, default=None, help="suite-specific case count or depth")
    v.add_argument("--seed", type=int, default=0)
    add_common(v)
    return p


def _load(args):
    if args.map:
        try:
            return load_map(args.map)
        except OSError as exc:
            raise InputError(f"cannot read map file: {exc}") from None
    return builtin(args.builtin)


def _point(f, text):
    text = str(text)
    if ":" not in text and len(f.graph.edges) == 1:
        text = f"{f.graph.edges[0].id}:{text}"
    p = GraphPoint.parse(text)
    f.graph.edge(p.edge)
    return p


def _points(f, text):
    pts = [_point(f, s) for s in text.split(",") if s.strip()]
    if not pts:
        raise InputError("empty point list")
    return f.graph.point_set(pts)


def cmd_analyze(args):
    f = _load(args)
    x = _point(f, args.point)
    samples = args.samples if args.samples is not None else max(1, args.iters // 2)
    burn_in = args.burn_in if args.burn_in is not None else args.iters - samples
    orbit = iterate(f, x, args.iters)
    est = omega_estimate(f, x, burn_in, samples, args.epsilon)
    per = orbit_of(f, x, args.iters)
    return f, {
        "point": str(f.graph.normalize(x)),
        "orbit_head": [str(p) for p in orbit[:33]],
        "omega": est.to_dict(),
        "periodic": None if per is None else {"period": per[0], "cycle": [str(p) for p in per[1]]},
    }


def _strategy(text):
    if text in (GREEDY, "greedy"):
        return GREEDY, 1
    name, _, k = text.partition(":")
    if name in (LOOKAHEAD, "lookahead"):
        try:
            return LOOKAHEAD, int(k or 2)
        except ValueError:
            pass
    raise InputError(f"bad strategy {text!r}; use greedy or lookahead:K")


def cmd_steer(args):
    f = _load(args)
    x = _point(f, args.start)
    if args.target_orbit:
        y = _point(f, args.target_orbit)
        found = orbit_of(f, y, 4096)
        if found is None:
            raise InputError(f"{y} is not periodic with period <= 4096")
        target = f.graph.point_set(found[1])
    elif args.target_omega:
        target = omega_estimate(f, _point(f, args.target_omega), args.burn_in, args.samples, args.epsilon).points
    else:
        target = _points(f, args.target_set)
    strategy, k = _strategy(args.strategy)
    plan = SteeringPlan(target, dwell=args.dwell, strategy=strategy, lookahead=k)
    br = steer_branch(f, x, plan, args.depth)
    est = alpha_estimate(br, eps=args.epsilon)
    d = hausdorff_distance(est.points, target, f.graph)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(br.export_lines(plan)) + "\n")
        with open(args.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write("\n".join(br.csv_lines()) + "\n")
    return f, {
        "plan": plan.to_dict(),
        "target": [str(p) for p in target],
        "branch": {"depth": br.depth, "requested_depth": br.requested_depth, "dead_end": br.dead_end,
                   "verified": br.verified, "tail": [str(p) for p in br.points[-5:]]},
        "alpha": est.to_dict(),
        "hausdorff": format_rational(d),
        "hausdorff_float": float(d),
        "export": args.out,
    }


def cmd_entropy(args):
    f = _load(args)
    part = markov_partition(f, args.depth)
    out = {
        "partition": part.to_dict(),
        "entropy": entropy(part.matrix),
        "transitive": is_transitive(part.matrix),
        "mixing": is_mixing(part.matrix),
    }
    if args.inaccessible:
        out["inaccessible"] = inaccessible_estimate(f, args.epsilon, args.horizon).to_dict()
    return f, out


def cmd_verify(args):
    if args.map or args.builtin:
        f = _load(args)
    else:
        f = builtin(DEFAULT_MAPS[args.suite])
    res = run_suite(args.suite, f, args.budget, args.seed)
    return f, res.to_dict()


COMMANDS = {"analyze": cmd_analyze, "steer": cmd_steer, "entropy": cmd_entropy, "verify": cmd_verify}


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k == "no_timestamp":
            continue
        out[k] = format_rational(v) if isinstance(v, Fraction) else v
    return out


def main(argv=None) -> int:
    started = time.perf_counter()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        f, result = COMMANDS[args.command](args)
    except (InputError, StructuralError, DomainError, ContractError, NotMarkovError) as exc:
        print(f"graphdyn: error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"graphdyn: resource cap: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"graphdyn: internal invariant violated: {exc}", file=sys.stderr)
        return 3
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": _echo(args),
        "map": {"name": f.name, "hash": map_hash(f)},
        "result": result,
    }
    if not args.no_timestamp:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        report["wall_clock_seconds"] = round(time.perf_counter() - started, 3)
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
