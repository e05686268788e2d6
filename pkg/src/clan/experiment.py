"""Method runners shared by the CLI, the scripts and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass, field

from .evaluation import MetricReport, metric_report
from .graph import AttributeTable, ClanError, Graph, LabelTable
from .modularity import LouvainConfig, louvain, modularity
from .partition import Partition, restrict_to
from .pipeline import Reassignment, default_threshold, run_clan

METHODS = ("clan", "louvain")


@dataclass
class Detection:
    method: str
    threshold: int
    partition: Partition
    step1: Partition
    significant: frozenset[int]
    q_final: float | None
    q_step1: float | None
    reassigned: dict[int, Reassignment] = field(default_factory=dict)

    @property
    def assignment(self) -> dict[int, int]:
        """Nodes that sit in a significant community; the rest count as unlabeled."""
        return restrict_to(self.partition, self.significant)


def _q(graph: Graph, p: Partition) -> float | None:
    return modularity(graph, p) if graph.total_weight_2m > 0 else None


def detect(
    graph: Graph,
    attrs: AttributeTable | None,
    method: str = "clan",
    threshold: int | None = None,
    config: LouvainConfig = LouvainConfig(),
    alpha: float = 1.0,
    step1: Partition | None = None,
) -> Detection:
    if method not in METHODS:
        raise ClanError(f"unknown method {method!r}")
    if threshold is None:
        threshold = default_threshold(graph.node_count)
    if threshold < 1:
        raise ClanError("threshold must be >= 1")
    if step1 is None:
        step1 = louvain(graph, config)
    q1 = _q(graph, step1)
    if method == "louvain":
        sig = frozenset(c for c, s in step1.sizes.items() if s > threshold)
        return Detection(method, threshold, step1, step1, sig, q1, q1)
    if attrs is None:
        raise ClanError("method 'clan' needs node attributes")
    res = run_clan(graph, attrs, threshold, config, alpha, step1=step1)
    return Detection(
        method, threshold, res.final_partition, step1, res.split.significant,
        _q(graph, res.final_partition), q1, res.reassigned,
    )


def compare_methods(
    graph: Graph,
    attrs: AttributeTable,
    labels: LabelTable,
    threshold: int | None = None,
    config: LouvainConfig = LouvainConfig(),
    alpha: float = 1.0,
) -> dict[str, tuple[Detection, MetricReport]]:
    """Run Louvain-only and CLAN on one Step-1 partition and score both."""
    step1 = louvain(graph, config)
    out = {}
    for method in ("louvain", "clan"):
        det = detect(graph, attrs, method, threshold, config, alpha, step1=step1)
        rep = metric_report(det.assignment, labels, graph.node_count, det.q_final, attrs)
        out[method] = (det, rep)
    return out
