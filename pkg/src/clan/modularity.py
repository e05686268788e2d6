"""Newman-Girvan modularity and the two-phase Louvain optimizer."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import ClanError, Graph
from .partition import Partition

# Slack allowed when asserting that Q never drops; pure rounding noise.
Q_EPS = 1e-12


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 42
    min_gain: float = 1e-7
    max_levels: int = 32
    deterministic_order: bool = True

    def __post_init__(self):
        if self.max_levels < 1:
            raise ClanError("max_levels must be >= 1")
        if self.min_gain < 0:
            raise ClanError("min_gain must be >= 0")


@dataclass
class LouvainTrace:
    """Final partition plus the Q value after every local-move pass and level."""

    partition: Partition
    pass_q: list[float] = field(default_factory=list)
    level_q: list[float] = field(default_factory=list)
    aggregation_error: float = 0.0

    @property
    def q(self) -> float:
        return self.level_q[-1]


def _labels(partition) -> Sequence[int]:
    return partition.assignment if isinstance(partition, Partition) else partition


def modularity(graph: Graph, partition: Partition | Sequence[int]) -> float:
    """Q = sum_c [ L_c / m - (d_c / 2m)^2 ].

    ``L_c`` is the weight of edges inside community ``c`` (a self-loop counts
    once), ``d_c`` its degree sum, ``m`` the total edge weight.
    """
    m2 = graph.total_weight_2m
    if m2 <= 0:
        raise ClanError("modularity undefined for empty edge set")
    labels = _labels(partition)
    if len(labels) != graph.node_count:
        raise ClanError("partition does not cover every node")
    inside: dict[int, list[float]] = defaultdict(list)
    degree: dict[int, list[float]] = defaultdict(list)
    for u, v, w in graph.edges:
        if labels[u] == labels[v]:
            inside[labels[u]].append(w)
    for node, d in enumerate(graph.degrees):
        degree[labels[node]].append(d)
    m = m2 / 2.0
    terms = []
    for c, ds in degree.items():
        terms.append(math.fsum(inside.get(c, ())) / m)
        terms.append(-((math.fsum(ds) / m2) ** 2))
    return math.fsum(terms)


def _move_nodes(graph: Graph, labels: list[int], config: LouvainConfig, rng, pass_q: list[float]) -> bool:
    """In-place local moving on ``labels``; returns whether any node moved."""
    m2 = graph.total_weight_2m
    m = m2 / 2.0
    k = graph.degrees
    tot: dict[int, float] = defaultdict(float)
    for node, c in enumerate(labels):
        tot[c] += k[node]
    order = list(range(graph.node_count))
    q_prev = modularity(graph, labels)
    improved = False
    while True:
        if not config.deterministic_order:
            rng.shuffle(order)
        moved = False
        for i in order:
            ki = k[i]
            if ki == 0.0:
                continue
            links: dict[int, float] = defaultdict(float)
            for j, w in graph.adjacency[i]:
                if j != i:
                    links[labels[j]] += w
            old = labels[i]
            tot[old] -= ki
            stay = links.get(old, 0.0) - tot[old] * ki / m2
            best, best_gain = old, stay
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / m2
                if gain > best_gain:
                    best, best_gain = c, gain
            if best != old and (best_gain - stay) / m > config.min_gain:
                labels[i] = best
                moved = True
            tot[labels[i]] += ki
        q = modularity(graph, labels)
        if q < q_prev - Q_EPS:
            raise AssertionError(f"modularity decreased in local move: {q_prev} -> {q}")
        pass_q.append(q)
        q_prev = q
        if not moved:
            return improved
        improved = True


def local_move_phase(
    graph: Graph, partition: Partition, config: LouvainConfig = LouvainConfig()
) -> tuple[Partition, bool]:
    """Greedy node moves until a full pass finds no gain above ``min_gain``.

    Nodes are visited in ascending id order unless ``deterministic_order`` is
    off, in which case each pass uses a fresh seeded shuffle. The returned
    partition keeps the input's community ids.
    """
    if graph.total_weight_2m <= 0:
        raise ClanError("modularity undefined for empty edge set")
    labels = list(partition.assignment)
    rng = np.random.default_rng(config.seed)
    improved = _move_nodes(graph, labels, config, rng, [])
    if not improved:
        return partition, False
    return Partition(tuple(labels)), True


def aggregate_graph(graph: Graph, partition: Partition) -> tuple[Graph, dict[int, int]]:
    """Collapse each community into a super-node.

    Internal weight (self-loops included) becomes a self-loop on the
    super-node; crossing weights are summed. Super-nodes are numbered in
    ascending community-id order.
    """
    labels = _labels(partition)
    mapping = {c: i for i, c in enumerate(sorted(set(labels)))}
    edges = [(mapping[labels[u]], mapping[labels[v]], w) for u, v, w in graph.edges]
    ids = [str(c) for c in sorted(mapping)]
    return Graph.from_edges(ids, edges), mapping


def louvain_trace(graph: Graph, config: LouvainConfig = LouvainConfig()) -> LouvainTrace:
    """Run Louvain and keep the per-pass and per-level modularity history."""
    if graph.total_weight_2m <= 0:
        raise ClanError("modularity undefined for empty edge set")
    rng = np.random.default_rng(config.seed)
    membership = list(range(graph.node_count))
    current = graph
    pass_q: list[float] = []
    level_q = [modularity(graph, membership)]
    worst = 0.0
    for _ in range(config.max_levels):
        labels = list(range(current.node_count))
        if not _move_nodes(current, labels, config, rng, pass_q):
            break
        current, mapping = aggregate_graph(current, labels)
        membership = [mapping[labels[s]] for s in membership]
        q_orig = modularity(graph, membership)
        q_agg = modularity(current, range(current.node_count))
        worst = max(worst, abs(q_orig - q_agg))
        if worst > Q_EPS:
            raise AssertionError(f"aggregation changed modularity by {worst}")
        if q_orig < level_q[-1] - Q_EPS:
            raise AssertionError("modularity decreased between levels")
        level_q.append(q_orig)
        if current.node_count == 1:
            break
    return LouvainTrace(Partition.normalized(membership), pass_q, level_q, worst)


def louvain(graph: Graph, config: LouvainConfig = LouvainConfig()) -> Partition:
    """Final-level Louvain partition over the original nodes.

    Community 0 is the largest; ties are ordered by smallest member id.
    """
    return louvain_trace(graph, config).partition
