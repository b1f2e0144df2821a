"""Command-line front end.

Subcommands: ``solve`` (one TE run), ``sweep`` (K / M / method sweeps as CSV),
``centrality`` (ranked node table), ``oracle`` (brute-force property suites).

stdout carries exactly one JSON document or one CSV table; every diagnostic
goes to stderr. Exit codes: 0 optimal / all-pass, 2 infeasible / suite
failure, 1 usage or IO error. With a fixed seed all output is byte-identical
across runs; measured solve times are reported only under ``--timing`` since
they would break that guarantee (the field is null otherwise).
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from typing import Optional, Sequence

from . import centrality as centrality_mod
from . import oracles
from .graph import (
    Commodity,
    DemandMatrix,
    FlowNetwork,
    generate_gravity_demands,
    parse_demands,
    parse_topology,
    random_digraph,
)
from .lp import LpStatus
from .paths import ShortestPathCache
from .selection import (
    BudgetExceededError,
    DEFAULT_SUBPROBLEM_BUDGET,
    SelectionResult,
    centrality_select,
    greedy_select,
    optimal_select,
    solve_with_middlepoints,
)
from .te import (
    LU,
    MF,
    NoTunnelError,
    TeSolution,
    build_mp_baseline,
    solve_mp,
)

SELECTION_METHODS = (
    "sp", "gsp", "degree", "random", "optimal", "greedy", "mp-baseline",
    "all-nodes",
)


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _load_inputs(args) -> tuple[FlowNetwork, DemandMatrix]:
    try:
        with open(args.topology) as fh:
            network = parse_topology(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read topology: {exc}") from exc
    if args.demands is not None:
        try:
            with open(args.demands) as fh:
                parsed = parse_demands(fh.read(), scale=args.scale)
        except OSError as exc:
            raise UsageError(f"cannot read demands: {exc}") from exc
        demands = parsed.bind(network)
    elif args.gravity is not None:
        demands = generate_gravity_demands(network, args.gravity, args.seed)
        if args.scale != 1.0:
            demands = demands.scaled(args.scale)
    else:
        raise UsageError("either --demands or --gravity is required")
    return network, demands


def _run_method(
    network: FlowNetwork,
    demands: DemandMatrix,
    method: str,
    objective: str,
    k: int,
    m: int,
    weighted: bool,
    seed: int,
    budget: int,
    single_middlepoint: bool,
    cache: Optional[ShortestPathCache] = None,
) -> tuple[TeSolution, list[int], int, int]:
    """Returns (solution, middlepoints, used_count, subproblems)."""
    cache = cache or ShortestPathCache(network)
    if method == "mp-baseline":
        solution = solve_mp(build_mp_baseline(network, demands, objective))
        return solution, [], 0, 1
    if method == "all-nodes":
        mids = list(range(network.node_count))
        solution = solve_with_middlepoints(
            cache, demands, mids, m, objective, single_middlepoint
        )
        return solution, mids, len(mids), 1
    if method in ("optimal", "greedy"):
        if objective != LU:
            raise UsageError(f"--method {method} supports only --objective lu")
        candidates = list(range(network.node_count))
        if method == "optimal":
            result = optimal_select(
                network, demands, candidates, k, m, budget=budget, cache=cache
            )
        else:
            result = greedy_select(network, demands, candidates, k, m, cache=cache)
        return (
            result.solution,
            result.middlepoints,
            result.used_count,
            result.subproblems_solved,
        )
    result = centrality_select(
        network, demands, method, k, m,
        weighted=weighted, seed=seed, objective=objective, cache=cache,
    )
    return result.solution, result.middlepoints, result.used_count, 1


def _solution_document(
    network: FlowNetwork,
    solution: TeSolution,
    middlepoints: Sequence[int],
    used_count: int,
    subproblems: int,
    timing: bool,
) -> dict:
    doc: dict = {"objective": solution.kind}
    if solution.kind == LU:
        doc["theta"] = solution.theta
    else:
        doc["satisfaction_ratio"] = solution.satisfaction_ratio
    doc["middlepoints"] = [network.node_names[v] for v in middlepoints]
    doc["used_count"] = used_count
    split: dict[str, dict[str, float]] = {}
    for tun, ratio in sorted(
        solution.split_ratios.items(), key=lambda kv: kv[0].waypoints
    ):
        names = [network.node_names[w] for w in tun.waypoints]
        pair = f"{names[0]}->{names[-1]}"
        split.setdefault(pair, {})[f"tunnel({','.join(names)})"] = ratio
    doc["split_ratios"] = split
    doc["edge_utilization"] = {
        f"{network.node_names[network.edges[eid].tail]}->"
        f"{network.node_names[network.edges[eid].head]}": util
        for eid, util in sorted(solution.edge_utilization.items())
    }
    doc["solve_ms"] = solution.solve_ms if timing else None
    doc["subproblems"] = subproblems
    return doc


def cmd_solve(args) -> int:
    network, demands = _load_inputs(args)
    try:
        solution, mids, used, subproblems = _run_method(
            network, demands, args.method, args.objective, args.k, args.m,
            args.weighted, args.seed, args.budget, args.single_middlepoint,
        )
    except (NoTunnelError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if solution.status is not LpStatus.OPTIMAL:
        print(f"error: program is {solution.status.value}", file=sys.stderr)
        return 2
    doc = _solution_document(network, solution, mids, used, subproblems, args.timing)
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        objective_value = doc.get("theta", doc.get("satisfaction_ratio"))
        print("objective,value,middlepoints,used_count,solve_ms,subproblems")
        ms = _fmt(solution.solve_ms) if args.timing else ""
        print(
            f"{solution.kind},{_fmt(objective_value)},"
            f"{';'.join(doc['middlepoints'])},{used},{ms},{subproblems}"
        )
    return 0


def _parse_axis(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def cmd_sweep(args) -> int:
    network, demands = _load_inputs(args)
    cache = ShortestPathCache(network)
    points: list[tuple[str, dict]] = []
    if args.sweep_k:
        for k in _parse_axis(args.sweep_k):
            points.append((str(k), {"k": k}))
    elif args.sweep_m:
        for m in _parse_axis(args.sweep_m):
            points.append((str(m), {"m": m}))
    elif args.sweep_methods:
        for token in args.sweep_methods.split(","):
            method, _, seed = token.partition(":")
            override = {"method": method}
            if seed:
                override["seed"] = int(seed)
            points.append((token, override))
    else:
        raise UsageError("one of --sweep-k / --sweep-m / --sweep-methods required")

    print("point,status,objective,solve_ms,subproblems")
    worst = 0
    for label, override in points:
        method = override.get("method", args.method)
        if method not in SELECTION_METHODS:
            raise UsageError(f"unknown method {method!r}")
        try:
            solution, _, _, subproblems = _run_method(
                network, demands, method, args.objective,
                override.get("k", args.k), override.get("m", args.m),
                args.weighted, override.get("seed", args.seed), args.budget,
                args.single_middlepoint, cache=cache,
            )
            status = solution.status.value
            value = solution.objective
        except (NoTunnelError, BudgetExceededError) as exc:
            print(f"point {label}: {exc}", file=sys.stderr)
            solution, status, value, subproblems = None, "error", None, 0
        if status != "optimal":
            worst = 2
        ms = (
            _fmt(solution.solve_ms)
            if args.timing and solution is not None and status == "optimal"
            else ""
        )
        print(
            f"{label},{status},{_fmt(value) if value is not None else ''},"
            f"{ms},{subproblems}"
        )
    return worst


def cmd_centrality(args) -> int:
    try:
        with open(args.topology) as fh:
            network = parse_topology(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read topology: {exc}") from exc
    print("node,score,rank")
    if args.method == "gsp":
        order = centrality_mod.greedy_group_select(
            network, args.k or network.node_count, args.weighted
        )
        cache = None
        for rank, v in enumerate(order, start=1):
            score = centrality_mod.group_betweenness(
                network.inverse_capacity_costs() if args.weighted else network,
                order[:rank],
            )
            print(f"{network.node_names[v]},{_fmt(float(score))},{rank}")
        return 0
    if args.method == "sp":
        scores = centrality_mod.betweenness(network, args.weighted)
    elif args.method == "degree":
        scores = centrality_mod.degree_centrality(network, args.weighted)
    else:
        raise UsageError(f"unknown centrality method {args.method!r}")
    for rank, v in enumerate(scores.ordering, start=1):
        print(f"{network.node_names[v]},{_fmt(float(scores.scores[v]))},{rank}")
    return 0


def _random_swt(rng: random.Random, n: int) -> tuple[int, int, int]:
    s, w, t = rng.sample(range(n), 3)
    return s, w, t


def _suite_maxflow_mincut(args) -> list[str]:
    failures = []
    for trial in range(args.trials):
        net = random_digraph(args.nodes, 0.3, args.seed + trial, max_capacity=3)
        rng = random.Random(args.seed * 1000 + trial)
        s, w, t = _random_swt(rng, args.nodes)
        flow = oracles.max_swt_flow(net, s, w, t)
        _, cut_value = oracles.min_swt_cut(net, s, w, t)
        if abs(flow.value - float(cut_value)) > 1e-6:
            failures.append(
                f"trial {trial}: flow {flow.value} != cut {float(cut_value)}"
            )
        elif flow.value > 0 and not flow.integral:
            failures.append(f"trial {trial}: no integral optimum exhibited")
    return failures


def _suite_submodularity(args) -> list[str]:
    failures = []
    for trial in range(args.trials):
        net = random_digraph(args.nodes, 0.35, args.seed + trial, max_capacity=4)
        rng = random.Random(args.seed * 7919 + trial)
        s, t = rng.sample(range(args.nodes), 2)
        demands = DemandMatrix((Commodity(s, t, float(args.nodes)),))
        eligible = [v for v in range(args.nodes) if v not in (s, t)]
        values = {
            frozenset(sub): oracles.group_flow(net, demands, sub)
            for size in range(len(eligible) + 1)
            for sub in itertools.combinations(eligible, size)
        }
        for sub, value in values.items():
            for v in eligible:
                if v in sub:
                    continue
                if values[sub | {v}] < value - 1e-6:
                    failures.append(f"trial {trial}: monotonicity violated")
        for a in values:
            for b in values:
                if a <= b:
                    for v in eligible:
                        if v in b:
                            continue
                        gain_small = values[a | {v}] - values[a]
                        gain_big = values[b | {v}] - values[b]
                        if gain_small < gain_big - 1e-6:
                            failures.append(
                                f"trial {trial}: submodularity violated"
                            )
    return failures


def _suite_lemma1(args) -> list[str]:
    failures = []
    for trial in range(args.trials):
        net = random_digraph(args.nodes, 0.35, args.seed + trial, max_capacity=5)
        rng = random.Random(args.seed * 104729 + trial)
        commodities = []
        pairs = set()
        for _ in range(rng.randint(1, 3)):
            s, t = rng.sample(range(args.nodes), 2)
            if (s, t) in pairs:
                continue
            pairs.add((s, t))
            commodities.append(Commodity(s, t, float(rng.randint(1, 4))))
        demands = DemandMatrix(tuple(commodities))
        mf = solve_mp(build_mp_baseline(net, demands, MF))
        lu = solve_mp(build_mp_baseline(net, demands, LU))
        saturated = abs(mf.satisfied_total - demands.total_demand()) <= 1e-7
        lu_ok = (
            lu.status is LpStatus.OPTIMAL and lu.theta is not None
            and lu.theta <= 1 + 1e-7
        )
        if saturated != lu_ok:
            failures.append(
                f"trial {trial}: max-flow saturation {saturated} but "
                f"TE_LU theta<=1 is {lu_ok}"
            )
    return failures


_SUITES = {
    "maxflow-mincut": _suite_maxflow_mincut,
    "submodularity": _suite_submodularity,
    "lemma1": _suite_lemma1,
}


def cmd_oracle(args) -> int:
    suite = _SUITES.get(args.suite)
    if suite is None:
        raise UsageError(f"unknown suite {args.suite!r}")
    failures = suite(args)
    for line in failures:
        print(f"FAIL {line}", file=sys.stderr)
    verdict = "pass" if not failures else "fail"
    print(f"{args.suite},{args.trials},{len(failures)},{verdict}")
    return 0 if not failures else 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--topology", required=True)
    parser.add_argument("--demands")
    parser.add_argument("--gravity", type=int, help="generate N gravity demands")
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--objective", choices=(LU, MF), default=LU)
    parser.add_argument("--method", choices=SELECTION_METHODS, default="gsp")
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--m", type=int, default=1)
    parser.add_argument("--weighted", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=DEFAULT_SUBPROBLEM_BUDGET)
    parser.add_argument(
        "--single-middlepoint", action="store_true",
        help="exclude the direct tunnel and force exactly one middlepoint",
    )
    parser.add_argument(
        "--timing", action="store_true",
        help="report measured solve times (breaks byte-for-byte determinism)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srte",
        description="Traffic engineering with shortest-path segment routing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one TE solve")
    _add_common(p_solve)
    p_solve.add_argument("--format", choices=("json", "csv"), default="json")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="sweep K, M, or methods; CSV output")
    _add_common(p_sweep)
    p_sweep.add_argument("--sweep-k", help="K axis, e.g. 1:6 or 1,2,4")
    p_sweep.add_argument("--sweep-m", help="M axis, e.g. 1,2")
    p_sweep.add_argument(
        "--sweep-methods",
        help="comma-separated methods; random may carry a seed as random:7",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_cent = sub.add_parser("centrality", help="ranked node table")
    p_cent.add_argument("--topology", required=True)
    p_cent.add_argument("--method", choices=("sp", "gsp", "degree"), default="sp")
    p_cent.add_argument("--weighted", action="store_true")
    p_cent.add_argument("--k", type=int, help="GSP selection length")
    p_cent.set_defaults(func=cmd_centrality)

    p_oracle = sub.add_parser("oracle", help="brute-force property suites")
    p_oracle.add_argument("suite", choices=sorted(_SUITES))
    p_oracle.add_argument("--nodes", type=int, default=6)
    p_oracle.add_argument("--trials", type=int, default=10)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
