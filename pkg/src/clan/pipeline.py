"""Two-step CLAN pipeline.

Step 1 partitions the network with Louvain. Step 2 keeps communities larger
than a threshold, trains a token classifier on their members and moves
every node of the small communities into one of the large ones. The graph
itself is never modified.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .classifier import TokenClassifierModel, classify_node, train_from_documents
from .graph import AttributeTable, ClanError, Graph
from .modularity import LouvainConfig, louvain
from .partition import Partition


@dataclass(frozen=True)
class ThresholdSplit:
    significant: frozenset[int]
    minority: frozenset[int]
    threshold: int


@dataclass(frozen=True)
class Reassignment:
    source: int
    target: int
    posterior: float


@dataclass
class ClanResult:
    final_partition: Partition
    step1_partition: Partition
    split: ThresholdSplit
    reassigned: dict[int, Reassignment] = field(default_factory=dict)
    model: TokenClassifierModel | None = field(default=None, repr=False)


def default_threshold(node_count: int) -> int:
    return max(10, math.ceil(0.01 * node_count))


def split_by_threshold(partition: Partition, threshold: int) -> ThresholdSplit:
    """Communities with strictly more than ``threshold`` members are significant."""
    if threshold < 1:
        raise ClanError("threshold must be >= 1")
    sizes = partition.sizes
    sig = frozenset(c for c, s in sizes.items() if s > threshold)
    if not sig:
        raise ClanError(f"no significant communities at threshold {threshold}")
    return ThresholdSplit(sig, frozenset(sizes) - sig, threshold)


def train_classifier(
    graph: Graph,
    attrs: AttributeTable,
    partition: Partition,
    split: ThresholdSplit,
    alpha: float = 1.0,
) -> TokenClassifierModel:
    """One document per node of a significant community, labelled by that community."""
    if len(attrs.tokens) != graph.node_count:
        raise ClanError("attribute table does not cover the graph")
    docs: dict[int, list] = {c: [] for c in split.significant}
    for node, c in enumerate(partition.assignment):
        if c in split.significant:
            docs[c].append(attrs.tokens[node])
    return train_from_documents(docs, alpha)


def run_clan(
    graph: Graph,
    attrs: AttributeTable,
    threshold: int | None = None,
    louvain_config: LouvainConfig = LouvainConfig(),
    alpha: float = 1.0,
    step1: Partition | None = None,
) -> ClanResult:
    """Run both steps; ``step1`` may be supplied to reuse a precomputed partition."""
    if threshold is None:
        threshold = default_threshold(graph.node_count)
    if step1 is None:
        step1 = louvain(graph, louvain_config)
    split = split_by_threshold(step1, threshold)
    if not split.minority:
        return ClanResult(step1, step1, split)

    model = train_classifier(graph, attrs, step1, split, alpha)
    final = list(step1.assignment)
    moved: dict[int, Reassignment] = {}
    for node, c in enumerate(step1.assignment):
        if c in split.minority:
            target, post = classify_node(model, attrs.tokens[node])
            final[node] = target
            moved[node] = Reassignment(c, target, post)
    return ClanResult(Partition(tuple(final)), step1, split, moved, model)
