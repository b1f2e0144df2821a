"""Tunnel enumeration and the segment-routing TE programs.

A tunnel is an ordered waypoint sequence (source, middlepoints..., sink);
flow on each segment splits over the segment's ECMP shortest paths per the
exact fractions from paths.py. Tunnel segments may reuse an edge, in which
case the loads add up on that edge (no acyclicity filtering).

Builders produce a TeProgram wrapping the generic LinearProgram together with
the variable layout, so solutions can be decoded back into tunnel flows,
split ratios, and edge utilizations.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import Commodity, DemandMatrix, FlowNetwork
from .lp import EQ, GE, LE, LinearProgram, LpStatus, solve_lp
from .paths import ShortestPathCache

LU = "lu"
MF = "mf"

UTILIZATION_TOL = 1e-6


class NoTunnelError(Exception):
    """A positive-demand commodity has no usable tunnel."""

    def __init__(self, commodity: Commodity):
        super().__init__(
            f"no tunnel connects commodity {commodity.source} -> {commodity.sink}"
        )
        self.commodity = commodity


@dataclass(frozen=True)
class Tunnel:
    """Ordered waypoint sequence for one commodity."""

    commodity: int
    waypoints: tuple[int, ...]

    @property
    def middlepoints(self) -> tuple[int, ...]:
        return self.waypoints[1:-1]

    @property
    def segments(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.waypoints, self.waypoints[1:]))


def enumerate_tunnels(
    cache: ShortestPathCache,
    commodity: Commodity,
    commodity_index: int,
    middlepoints: Iterable[int],
    max_middlepoints: int,
    single_middlepoint: bool = False,
) -> list[Tunnel]:
    """All tunnels over ordered selections of <= max_middlepoints middlepoints.

    Middlepoints equal to the commodity's endpoints are skipped; every segment
    must be reachable. The direct 0-middlepoint tunnel is included when the
    sink is reachable, unless single_middlepoint forces exactly one.
    Returns tunnels sorted by waypoint tuple; empty list when nothing connects.
    """
    s, t = commodity.source, commodity.sink
    candidates = sorted(
        {m for m in middlepoints if m != s and m != t}
    )
    sizes = (
        (1,) if single_middlepoint
        else tuple(range(0, max_middlepoints + 1))
    )
    tunnels = []
    for j in sizes:
        for perm in itertools.permutations(candidates, j):
            waypoints = (s, *perm, t)
            if all(cache.reachable(a, b) for a, b in zip(waypoints, waypoints[1:])):
                tunnels.append(Tunnel(commodity_index, waypoints))
    tunnels.sort(key=lambda tun: tun.waypoints)
    return tunnels


def tunnels_for_middlepoints(
    cache: ShortestPathCache,
    demands: DemandMatrix,
    middlepoints: Iterable[int],
    max_middlepoints: int,
    single_middlepoint: bool = False,
) -> list[list[Tunnel]]:
    mids = sorted(set(middlepoints))
    return [
        enumerate_tunnels(cache, c, i, mids, max_middlepoints, single_middlepoint)
        for i, c in enumerate(demands.commodities)
    ]


@dataclass
class TeProgram:
    """A built TE LP plus the layout needed to decode its solution."""

    kind: str
    lp: LinearProgram
    network: FlowNetwork
    demands: DemandMatrix
    tunnels: list[Tunnel]
    tunnel_vars: list[int]
    theta_var: Optional[int]
    edge_loads: list[dict[int, Fraction]]  # per tunnel: edge -> exact load coeff


@dataclass
class TeSolution:
    """Decoded TE result; theta for LU, satisfied totals for MF."""

    kind: str
    status: LpStatus
    theta: Optional[float] = None
    satisfied_total: Optional[float] = None
    satisfaction_ratio: Optional[float] = None
    tunnel_flows: dict[Tunnel, float] = field(default_factory=dict)
    split_ratios: dict[Tunnel, float] = field(default_factory=dict)
    edge_utilization: dict[int, float] = field(default_factory=dict)
    solve_ms: float = 0.0

    @property
    def objective(self) -> Optional[float]:
        return self.theta if self.kind == LU else self.satisfaction_ratio


def _tunnel_edge_loads(
    cache: ShortestPathCache, tunnel: Tunnel
) -> dict[int, Fraction]:
    """Exact per-edge load for one unit of flow on the tunnel (segments add)."""
    loads: dict[int, Fraction] = {}
    for a, b in tunnel.segments:
        for eid, frac in cache.fractions(a, b).fractions.items():
            loads[eid] = loads.get(eid, Fraction(0)) + frac
    return loads


def _build_tunnel_program(
    kind: str,
    cache: ShortestPathCache,
    demands: DemandMatrix,
    tunnels_by_commodity: Sequence[Sequence[Tunnel]],
) -> TeProgram:
    network = cache.network
    lp = LinearProgram(maximize=(kind == MF))
    theta_var = lp.add_var("theta", objective=1.0) if kind == LU else None

    tunnels: list[Tunnel] = []
    tunnel_vars: list[int] = []
    edge_loads: list[dict[int, Fraction]] = []
    per_commodity_vars: list[list[int]] = [[] for _ in demands.commodities]

    for i, commodity in enumerate(demands.commodities):
        group = tunnels_by_commodity[i]
        if kind == LU and commodity.demand > 0 and not group:
            raise NoTunnelError(commodity)
        for tun in group:
            label = "f[{}:{}]".format(
                i, "-".join(network.node_names[w] for w in tun.waypoints)
            )
            var = lp.add_var(label, objective=(1.0 if kind == MF else 0.0))
            tunnels.append(tun)
            tunnel_vars.append(var)
            edge_loads.append(_tunnel_edge_loads(cache, tun))
            per_commodity_vars[i].append(var)

    # Capacity rows: total tunnel load on e <= theta * c(e) (LU) or c(e) (MF).
    per_edge: dict[int, dict[int, float]] = {}
    for var, loads in zip(tunnel_vars, edge_loads):
        for eid, coeff in loads.items():
            per_edge.setdefault(eid, {})[var] = float(coeff)
    for eid in range(network.edge_count):
        coeffs = dict(per_edge.get(eid, {}))
        cap = float(network.edges[eid].capacity)
        if kind == LU:
            coeffs[theta_var] = coeffs.get(theta_var, 0.0) - cap
            lp.add_row(coeffs, LE, 0.0)
        elif coeffs:
            lp.add_row(coeffs, LE, cap)

    for i, commodity in enumerate(demands.commodities):
        coeffs = {var: 1.0 for var in per_commodity_vars[i]}
        if kind == LU:
            if commodity.demand > 0:
                lp.add_row(coeffs, GE, commodity.demand)
        elif coeffs:
            lp.add_row(coeffs, LE, commodity.demand)

    return TeProgram(
        kind, lp, network, demands, tunnels, tunnel_vars, theta_var, edge_loads
    )


def build_te_lu(
    cache: ShortestPathCache,
    demands: DemandMatrix,
    tunnels_by_commodity: Sequence[Sequence[Tunnel]],
) -> TeProgram:
    """Min-max-utilization program over the given tunnels (demands must be met)."""
    return _build_tunnel_program(LU, cache, demands, tunnels_by_commodity)


def build_te_mf(
    cache: ShortestPathCache,
    demands: DemandMatrix,
    tunnels_by_commodity: Sequence[Sequence[Tunnel]],
) -> TeProgram:
    """Max-throughput program over the given tunnels (utilization capped at 1)."""
    return _build_tunnel_program(MF, cache, demands, tunnels_by_commodity)


def solve_te(program: TeProgram) -> TeSolution:
    """Solve a tunnel program and decode flows, split ratios, and utilizations."""
    start = time.perf_counter()
    sol = solve_lp(program.lp)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    result = TeSolution(program.kind, sol.status, solve_ms=elapsed_ms)
    if sol.status is not LpStatus.OPTIMAL:
        return result

    flows = {
        tun: sol[var] for tun, var in zip(program.tunnels, program.tunnel_vars)
    }
    result.tunnel_flows = flows

    totals: dict[int, float] = {}
    for tun, flow in flows.items():
        totals[tun.commodity] = totals.get(tun.commodity, 0.0) + flow
    result.split_ratios = {
        tun: (flow / totals[tun.commodity] if totals[tun.commodity] > 0 else 0.0)
        for tun, flow in flows.items()
    }

    utilization: dict[int, float] = {
        eid: 0.0 for eid in range(program.network.edge_count)
    }
    for tun, var, loads in zip(
        program.tunnels, program.tunnel_vars, program.edge_loads
    ):
        flow = sol[var]
        for eid, coeff in loads.items():
            utilization[eid] += flow * float(coeff)
    for eid in utilization:
        utilization[eid] /= float(program.network.edges[eid].capacity)
    result.edge_utilization = utilization

    if program.kind == LU:
        result.theta = sol.objective_value
        max_util = max(utilization.values(), default=0.0)
        if abs(max_util - result.theta) > UTILIZATION_TOL * max(1.0, result.theta):
            raise ArithmeticError(
                f"utilization reconstruction mismatch: {max_util} vs {result.theta}"
            )
    else:
        result.satisfied_total = sol.objective_value
        total_demand = program.demands.total_demand()
        result.satisfaction_ratio = (
            result.satisfied_total / total_demand if total_demand > 0 else 1.0
        )
    return result


@dataclass
class MpProgram:
    """Arc-based unrestricted multipath program (no segment restriction)."""

    kind: str
    lp: LinearProgram
    network: FlowNetwork
    demands: DemandMatrix
    flow_vars: list[dict[int, int]]  # per commodity: edge -> var
    theta_var: Optional[int]
    delivered_vars: list[Optional[int]]


def build_mp_baseline(
    network: FlowNetwork, demands: DemandMatrix, kind: str
) -> MpProgram:
    """Arc-flow multicommodity LP: the MP lower bound (LU) / upper bound (MF)."""
    if kind not in (LU, MF):
        raise ValueError(f"bad objective kind {kind!r}")
    lp = LinearProgram(maximize=(kind == MF))
    theta_var = lp.add_var("theta", objective=1.0) if kind == LU else None
    flow_vars: list[dict[int, int]] = []
    delivered_vars: list[Optional[int]] = []

    for i, commodity in enumerate(demands.commodities):
        evars = {
            eid: lp.add_var(f"f[{i}:{network.node_names[network.edges[eid].tail]}"
                            f"->{network.node_names[network.edges[eid].head]}]")
            for eid in range(network.edge_count)
        }
        flow_vars.append(evars)
        if kind == MF:
            delivered_vars.append(
                lp.add_var(f"d[{i}]", objective=1.0, upper=commodity.demand)
            )
        else:
            delivered_vars.append(None)

        for u in range(network.node_count):
            if u == commodity.sink:
                continue  # implied by the remaining balances
            coeffs: dict[int, float] = {}
            for eid in network.out_edges[u]:
                coeffs[evars[eid]] = coeffs.get(evars[eid], 0.0) + 1.0
            for eid in network.in_edges[u]:
                coeffs[evars[eid]] = coeffs.get(evars[eid], 0.0) - 1.0
            if u == commodity.source:
                if kind == LU:
                    lp.add_row(coeffs, EQ, commodity.demand)
                else:
                    coeffs[delivered_vars[i]] = -1.0
                    lp.add_row(coeffs, EQ, 0.0)
            elif coeffs:
                lp.add_row(coeffs, EQ, 0.0)

    for eid in range(network.edge_count):
        coeffs = {flow_vars[i][eid]: 1.0 for i in range(len(demands.commodities))}
        cap = float(network.edges[eid].capacity)
        if kind == LU:
            coeffs[theta_var] = -cap
            lp.add_row(coeffs, LE, 0.0)
        elif coeffs:
            lp.add_row(coeffs, LE, cap)

    return MpProgram(kind, lp, network, demands, flow_vars, theta_var, delivered_vars)


def solve_mp(program: MpProgram) -> TeSolution:
    """Solve the MP baseline and decode edge utilizations."""
    start = time.perf_counter()
    sol = solve_lp(program.lp)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    result = TeSolution(program.kind, sol.status, solve_ms=elapsed_ms)
    if sol.status is not LpStatus.OPTIMAL:
        return result
    utilization = {}
    for eid in range(program.network.edge_count):
        load = sum(sol[evars[eid]] for evars in program.flow_vars)
        utilization[eid] = load / float(program.network.edges[eid].capacity)
    result.edge_utilization = utilization
    if program.kind == LU:
        result.theta = sol.objective_value
    else:
        result.satisfied_total = sol.objective_value
        total_demand = program.demands.total_demand()
        result.satisfaction_ratio = (
            result.satisfied_total / total_demand if total_demand > 0 else 1.0
        )
    return result
