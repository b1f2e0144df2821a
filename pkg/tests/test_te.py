"""Tunnel enumeration and the TE_LU / TE_MF / multipath-baseline programs."""

from fractions import Fraction

import numpy as np
import pytest

from srte.graph import Commodity, DemandMatrix, random_connected_digraph, random_digraph
from srte.lp import GE, LE, LinearProgram, LpStatus, solve_lp
from srte.paths import ShortestPathCache
from srte.te import (
    LU,
    MF,
    NoTunnelError,
    Tunnel,
    build_mp_baseline,
    build_te_lu,
    build_te_mf,
    enumerate_tunnels,
    solve_mp,
    solve_te,
    tunnels_for_middlepoints,
)

from conftest import enumerate_shortest_paths, make_demands, make_net


def solve_lu(network, demands, middlepoints, m, single=False):
    cache = ShortestPathCache(network)
    tunnels = tunnels_for_middlepoints(cache, demands, middlepoints, m, single)
    return solve_te(build_te_lu(cache, demands, tunnels))


class TestTunnelEnumeration:
    def line5(self):
        # Every segment between s, m1, m2, t is reachable.
        return make_net(
            [
                (0, 1, 1), (0, 2, 1), (0, 3, 1),
                (1, 2, 1), (2, 1, 1), (1, 3, 1), (2, 3, 1),
            ],
            names=("s", "m1", "m2", "t"),
        )

    def test_two_middlepoints_m2_gives_five_tunnels(self):
        net = self.line5()
        cache = ShortestPathCache(net)
        tunnels = enumerate_tunnels(cache, Commodity(0, 3, 1.0), 0, [1, 2], 2)
        seqs = [t.waypoints for t in tunnels]
        assert seqs == [
            (0, 1, 2, 3),
            (0, 1, 3),
            (0, 2, 1, 3),
            (0, 2, 3),
            (0, 3),
        ]

    def test_single_middlepoint_flag_drops_direct_tunnel(self):
        net = self.line5()
        cache = ShortestPathCache(net)
        tunnels = enumerate_tunnels(
            cache, Commodity(0, 3, 1.0), 0, [1, 2], 2, single_middlepoint=True
        )
        assert [t.waypoints for t in tunnels] == [(0, 1, 3), (0, 2, 3)]

    def test_endpoint_middlepoints_are_skipped(self):
        net = self.line5()
        cache = ShortestPathCache(net)
        tunnels = enumerate_tunnels(cache, Commodity(0, 3, 1.0), 0, [0, 3], 1)
        assert [t.waypoints for t in tunnels] == [(0, 3)]

    def test_unreachable_segments_prune_tunnels(self):
        # m cannot reach t, so (s, m, t) is not a tunnel.
        net = make_net([(0, 1, 1), (0, 2, 1)], names=("s", "m", "t"))
        cache = ShortestPathCache(net)
        tunnels = enumerate_tunnels(cache, Commodity(0, 2, 1.0), 0, [1], 1)
        assert [t.waypoints for t in tunnels] == [(0, 2)]

    def test_tunnel_segments(self):
        t = Tunnel(0, (5, 1, 2, 7))
        assert t.middlepoints == (1, 2)
        assert t.segments == ((5, 1), (1, 2), (2, 7))


class TestTeLu:
    def test_middlepoint_fixture_exact(self, middlepoint_fixture):
        """Direct cap 3 vs detour cap 2, demand 3: theta* = 3/5, 9/5 / 6/5."""
        demands = make_demands((0, 2, 3))
        sol = solve_lu(middlepoint_fixture, demands, [1], 1)
        assert sol.status is LpStatus.OPTIMAL
        assert sol.theta == pytest.approx(0.6, abs=1e-6)
        flows = {t.waypoints: f for t, f in sol.tunnel_flows.items()}
        assert flows[(0, 2)] == pytest.approx(1.8, abs=1e-6)
        assert flows[(0, 1, 2)] == pytest.approx(1.2, abs=1e-6)

    def test_middlepoint_fixture_grid_search(self, middlepoint_fixture):
        """Split-ratio grid at 1e-4 resolution agrees with the LP."""
        demands = make_demands((0, 2, 3))
        best = min(
            max(3 * x / 3.0, 3 * (1 - x) / 2.0)
            for x in np.arange(0.0, 1.0 + 1e-12, 1e-4)
        )
        sol = solve_lu(middlepoint_fixture, demands, [1], 1)
        assert sol.theta == pytest.approx(best, abs=1e-4)

    def test_split_ratios_sum_to_one(self, middlepoint_fixture):
        sol = solve_lu(middlepoint_fixture, make_demands((0, 2, 3)), [1], 1)
        total = sum(sol.split_ratios.values())
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_max_utilization_equals_theta(self, middlepoint_fixture):
        sol = solve_lu(middlepoint_fixture, make_demands((0, 2, 3)), [1], 1)
        assert max(sol.edge_utilization.values()) == pytest.approx(
            sol.theta, abs=1e-6
        )

    def test_demand_scaling_scales_theta(self):
        net = random_connected_digraph(8, 20, 3)
        demands = make_demands((0, 4, 2), (1, 5, 1))
        a = solve_lu(net, demands, [2, 3], 1)
        b = solve_lu(net, demands.scaled(2.5), [2, 3], 1)
        assert b.theta == pytest.approx(2.5 * a.theta, rel=1e-6)

    def test_more_middlepoints_never_hurt(self):
        net = random_connected_digraph(8, 20, 5)
        demands = make_demands((0, 4, 2), (1, 5, 1), (6, 2, 1))
        prev = solve_lu(net, demands, [], 1).theta
        for mids in ([3], [3, 7], [3, 7, 2]):
            cur = solve_lu(net, demands, mids, 1).theta
            assert cur <= prev + 1e-9
            prev = cur

    def test_larger_m_never_hurts(self):
        net = random_connected_digraph(8, 20, 7)
        demands = make_demands((0, 4, 2), (1, 5, 1))
        theta1 = solve_lu(net, demands, [2, 3], 1).theta
        theta2 = solve_lu(net, demands, [2, 3], 2).theta
        assert theta2 <= theta1 + 1e-9

    def test_no_tunnel_raises(self):
        net = make_net([(0, 1, 1), (2, 1, 1)], names=("s", "t", "x"))
        demands = make_demands((1, 0, 1))  # t cannot reach s
        cache = ShortestPathCache(net)
        with pytest.raises(NoTunnelError):
            tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
            build_te_lu(cache, demands, tunnels)

    def test_zero_demand_commodity_is_unconstrained(self):
        net = make_net([(0, 1, 1)], names=("s", "t"))
        demands = DemandMatrix((Commodity(1, 0, 0.0),))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
        sol = solve_te(build_te_lu(cache, demands, tunnels))
        assert sol.status is LpStatus.OPTIMAL
        assert sol.theta == pytest.approx(0.0, abs=1e-9)


class TestIndependentFormulation:
    @pytest.mark.parametrize("seed", range(3))
    def test_lu_matches_enumerated_load_formulation(self, seed):
        """Rebuild the LP with edge loads derived from exhaustive shortest-path
        enumeration (not the counting DAGs) and compare optima."""
        net = random_connected_digraph(8, 22, seed, max_capacity=5)
        demands = make_demands((0, 5, 3), (2, 7, 2), (6, 1, 1))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [3, 4], 2)
        sol = solve_te(build_te_lu(cache, demands, tunnels))

        edge_id = {(e.tail, e.head): i for i, e in enumerate(net.edges)}
        lp = LinearProgram()
        theta = lp.add_var("theta", objective=1.0)
        per_edge = {}
        per_commodity = [[] for _ in demands.commodities]
        for group in tunnels:
            for tun in group:
                var = lp.add_var(f"t{len(per_edge)}-{tun.waypoints}")
                per_commodity[tun.commodity].append(var)
                loads = {}
                for a, b in tun.segments:
                    _, paths = enumerate_shortest_paths(net, a, b)
                    for p in paths:
                        for u, v in zip(p, p[1:]):
                            eid = edge_id[(u, v)]
                            loads[eid] = loads.get(eid, Fraction(0)) + Fraction(
                                1, len(paths)
                            )
                for eid, load in loads.items():
                    per_edge.setdefault(eid, {})[var] = float(load)
        for eid in range(net.edge_count):
            coeffs = dict(per_edge.get(eid, {}))
            coeffs[theta] = -float(net.edges[eid].capacity)
            lp.add_row(coeffs, LE, 0.0)
        for i, c in enumerate(demands.commodities):
            lp.add_row({v: 1.0 for v in per_commodity[i]}, GE, c.demand)
        independent = solve_lp(lp)
        assert independent.status is LpStatus.OPTIMAL
        assert sol.theta == pytest.approx(independent.objective_value, abs=1e-7)


class TestTeMf:
    def test_disjoint_direct_tunnels_fully_satisfied(self):
        net = make_net([(0, 1, 5), (2, 3, 4)])
        demands = make_demands((0, 1, 5), (2, 3, 4))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
        sol = solve_te(build_te_mf(cache, demands, tunnels))
        assert sol.satisfaction_ratio == pytest.approx(1.0, abs=1e-9)

    def test_single_edge_half_satisfied(self):
        net = make_net([(0, 1, 1)])
        demands = make_demands((0, 1, 2))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
        sol = solve_te(build_te_mf(cache, demands, tunnels))
        assert sol.satisfaction_ratio == pytest.approx(0.5, abs=1e-9)
        assert sol.satisfied_total == pytest.approx(1.0, abs=1e-9)

    def test_unconnected_commodity_contributes_nothing(self):
        net = make_net([(0, 1, 5), (3, 2, 1)])
        demands = make_demands((0, 1, 5), (2, 3, 1))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
        sol = solve_te(build_te_mf(cache, demands, tunnels))
        assert sol.satisfied_total == pytest.approx(5.0, abs=1e-9)


class TestMpBaseline:
    def test_single_path_theta_is_demand_over_capacity(self):
        net = make_net([(0, 1, 4)])
        demands = make_demands((0, 1, 3))
        sol = solve_mp(build_mp_baseline(net, demands, LU))
        assert sol.theta == pytest.approx(0.75, abs=1e-9)

    def test_mp_is_lower_bound_for_segment_routing(self):
        net = random_connected_digraph(9, 24, 11)
        demands = make_demands((0, 4, 2), (1, 6, 1), (7, 3, 2))
        mp = solve_mp(build_mp_baseline(net, demands, LU))
        sr = solve_lu(net, demands, [2, 5], 2)
        assert mp.theta <= sr.theta + 1e-7

    def test_mp_mf_is_upper_bound_for_segment_routing(self):
        net = make_net([(0, 1, 1)])
        demands = make_demands((0, 1, 2))
        mp = solve_mp(build_mp_baseline(net, demands, MF))
        cache = ShortestPathCache(net)
        tunnels = tunnels_for_middlepoints(cache, demands, [], 1)
        sr = solve_te(build_te_mf(cache, demands, tunnels))
        assert mp.satisfied_total >= sr.satisfied_total - 1e-7

    @pytest.mark.parametrize("seed", range(4))
    def test_mf_value_matches_path_lp_oracle(self, seed):
        """Arc-based MP max flow equals the explicit path-formulation value."""
        from srte import oracles

        net = random_digraph(7, 0.35, seed, max_capacity=4)
        demands = make_demands((0, 4, 3), (2, 6, 2))
        mp = solve_mp(build_mp_baseline(net, demands, MF))
        # group_flow over all nodes imposes no path restriction (every path
        # visits its own source), so it is the unrestricted path LP.
        oracle = oracles.group_flow(net, demands, range(net.node_count))
        assert mp.satisfied_total == pytest.approx(oracle, abs=1e-6)

    @pytest.mark.parametrize("seed", range(6))
    def test_saturation_iff_theta_at_most_one(self, seed):
        """MP max-flow meets all demands exactly when MP TE_LU theta <= 1."""
        net = random_digraph(8, 0.35, seed, max_capacity=5)
        demands = make_demands((0, 4, 3), (2, 6, 2), (5, 1, 4))
        mf = solve_mp(build_mp_baseline(net, demands, MF))
        lu = solve_mp(build_mp_baseline(net, demands, LU))
        saturated = mf.satisfied_total == pytest.approx(
            demands.total_demand(), abs=1e-7
        )
        theta_ok = lu.status is LpStatus.OPTIMAL and lu.theta <= 1 + 1e-7
        assert saturated == theta_ok

    def test_infeasible_when_source_disconnected(self):
        net = make_net([(1, 0, 1)])
        demands = make_demands((0, 1, 1))
        sol = solve_mp(build_mp_baseline(net, demands, LU))
        assert sol.status is LpStatus.INFEASIBLE

    def test_bad_kind_rejected(self):
        with pytest.raises(ValueError):
            build_mp_baseline(make_net([(0, 1, 1)]), make_demands((0, 1, 1)), "x")
