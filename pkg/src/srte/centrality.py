"""Structural node-importance scores used for middlepoint selection.

All shortest-path work is exact (rational distances, big-integer counts), so
scores compare exactly and orderings are deterministic: descending score with
lowest node index breaking ties.

Node pairs with no connecting path contribute 0 to every betweenness sum.
For group betweenness, pairs with an endpoint inside the group are excluded
from the sum, mirroring the s != v != t restriction of the individual score.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import FlowNetwork
from .paths import ShortestPathCache, ShortestPathDag


@dataclass(frozen=True)
class CentralityScores:
    method: str
    weighted: bool
    scores: tuple[Fraction, ...]
    ordering: tuple[int, ...]


def _ranked(method: str, weighted: bool, scores: Sequence[Fraction]) -> CentralityScores:
    ordering = sorted(range(len(scores)), key=lambda v: (-scores[v], v))
    return CentralityScores(method, weighted, tuple(scores), tuple(ordering))


def _analysis_network(network: FlowNetwork, weighted: bool) -> FlowNetwork:
    return network.inverse_capacity_costs() if weighted else network


def betweenness(
    network: FlowNetwork, weighted: bool = False,
    cache: ShortestPathCache | None = None,
) -> CentralityScores:
    """Shortest-path betweenness: sum over pairs of sigma_st(v) / sigma_st."""
    net = _analysis_network(network, weighted)
    cache = cache or ShortestPathCache(net)
    n = net.node_count
    dags = [cache.forward(s) for s in range(n)]
    scores = [Fraction(0)] * n
    for s in range(n):
        ds = dags[s]
        for t in range(n):
            if t == s or ds.sigma[t] == 0:
                continue
            d_st = ds.dist[t]
            for v in range(n):
                if v == s or v == t:
                    continue
                dv = ds.dist[v]
                if dv is None:
                    continue
                dvt = dags[v].dist[t]
                if dvt is not None and dv + dvt == d_st:
                    scores[v] += Fraction(
                        ds.sigma[v] * dags[v].sigma[t], ds.sigma[t]
                    )
    return _ranked("SP", weighted, scores)


def _avoiding_counts(dag: ShortestPathDag, net: FlowNetwork, group: frozenset[int]):
    """Per-node count of shortest paths from dag.source avoiding all group nodes."""
    avoid = [0] * net.node_count
    avoid[dag.source] = 0 if dag.source in group else 1
    for v in dag.order():
        if v == dag.source or v in group:
            continue
        avoid[v] = sum(avoid[net.edges[eid].tail] for eid in dag.preds[v])
    return avoid


def group_betweenness(
    network: FlowNetwork,
    group: Iterable[int],
    weighted: bool = False,
    cache: ShortestPathCache | None = None,
) -> Fraction:
    """Fraction of shortest paths covered by the group, summed over pairs.

    sigma_st(C) is computed as sigma_st minus the count of shortest paths
    avoiding every node of C; pairs with s or t in C are excluded.
    """
    members = frozenset(group)
    if not members:
        raise ValueError("group must be nonempty")
    net = _analysis_network(network, weighted)
    cache = cache or ShortestPathCache(net)
    n = net.node_count
    total = Fraction(0)
    for s in range(n):
        if s in members:
            continue
        dag = cache.forward(s)
        avoid = _avoiding_counts(dag, net, members)
        for t in range(n):
            if t == s or t in members or dag.sigma[t] == 0:
                continue
            covered = dag.sigma[t] - avoid[t]
            if covered:
                total += Fraction(covered, dag.sigma[t])
    return total


def greedy_group_select(
    network: FlowNetwork, k: int, weighted: bool = False
) -> list[int]:
    """Greedy group-betweenness selection; prefixes are valid smaller selections.

    Each round adds the node with maximal group score when joined to the
    current set (exact comparison, lowest index on ties).
    """
    n = network.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    net = _analysis_network(network, weighted)
    cache = ShortestPathCache(net)
    chosen: list[int] = []
    for _ in range(k):
        best_v = None
        best_score = None
        for v in range(n):
            if v in chosen:
                continue
            score = group_betweenness(net, chosen + [v], cache=cache)
            if best_score is None or score > best_score:
                best_v, best_score = v, score
        chosen.append(best_v)
    return chosen


def degree_centrality(
    network: FlowNetwork, weighted: bool = False
) -> CentralityScores:
    """Average of in- and out-degree; weighted mode sums 1/capacity instead."""
    n = network.node_count
    scores = []
    for v in range(n):
        incident = list(network.out_edges[v]) + list(network.in_edges[v])
        if weighted:
            score = sum(
                (1 / network.edges[eid].capacity for eid in incident),
                Fraction(0),
            )
        else:
            score = Fraction(len(incident), 2)
        scores.append(score)
    return _ranked("Degree", weighted, scores)


def random_select(network: FlowNetwork, k: int, seed: int) -> list[int]:
    """Uniform sample of k distinct nodes; deterministic per seed."""
    n = network.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return random.Random(seed).sample(range(n), k)
