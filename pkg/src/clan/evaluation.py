"""Ground-truth comparison metrics and the unlabeled-user / lost-token audits."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Mapping

from .graph import AttributeTable, ClanError, LabelTable
from .partition import Partition, as_mapping

AVERAGING = "symmetric_best_match"


def pairwise_f1(detected, truth) -> float:
    a, b = set(detected), set(truth)
    if not b:
        raise ClanError("truth set is empty")
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return 2.0 * inter / (len(a) + len(b))


def pairwise_jaccard(detected, truth) -> float:
    a, b = set(detected), set(truth)
    union = len(a | b)
    if union == 0:
        raise ClanError("both sets are empty")
    return len(a & b) / union


@dataclass(frozen=True)
class CommunityMatch:
    community: int
    truth_label: str
    f1: float
    jaccard: float


@dataclass
class ScoreSummary:
    avg_f1: float
    avg_jaccard: float
    per_community: list[CommunityMatch]
    # truth-side matches, kept for symmetry checks
    per_truth: list[tuple[str, int | None, float, float]]

    @property
    def matching(self) -> dict[int, str]:
        return {m.community: m.truth_label for m in self.per_community}


def _mean(xs) -> float:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else 0.0


def averaged_scores(assignment: Partition | Mapping[int, int], truth: LabelTable) -> ScoreSummary:
    """Symmetric average best-match F1 and Jaccard over labeled nodes.

    Each detected community is matched to its best-F1 truth group and each
    truth group to its best-F1 detected community; the two directional means
    are averaged. Labeled nodes with no assignment only ever count against
    recall. Ties prefer the larger group, then the lower id.
    """
    groups = truth.groups()
    if not groups:
        raise ClanError("no ground-truth labels")
    assigned = as_mapping(assignment)
    detected: dict[int, set[int]] = defaultdict(set)
    for node in truth.labels:
        if node in assigned:
            detected[assigned[node]].add(node)
    detected = dict(sorted(detected.items()))

    per_comm = []
    for cid, members in detected.items():
        best = min(
            groups.items(),
            key=lambda kv: (-pairwise_f1(members, kv[1]), -len(kv[1]), kv[0]),
        )
        label, tset = best
        per_comm.append(
            CommunityMatch(cid, label, pairwise_f1(members, tset), pairwise_jaccard(members, tset))
        )

    per_truth = []
    for label, tset in groups.items():
        if not detected:
            per_truth.append((label, None, 0.0, 0.0))
            continue
        cid, members = min(
            detected.items(),
            key=lambda kv: (-pairwise_f1(kv[1], tset), -len(kv[1]), kv[0]),
        )
        per_truth.append(
            (label, cid, pairwise_f1(members, tset), pairwise_jaccard(members, tset))
        )

    avg_f1 = (_mean(m.f1 for m in per_comm) + _mean(t[2] for t in per_truth)) / 2.0
    avg_j = (_mean(m.jaccard for m in per_comm) + _mean(t[3] for t in per_truth)) / 2.0
    return ScoreSummary(avg_f1, avg_j, per_comm, per_truth)


def unlabeled_fraction(node_count: int, assignment: Mapping[int, int]) -> float:
    """Percentage of nodes without a significant-community assignment."""
    if node_count < 1:
        raise ClanError("node_count must be >= 1")
    return 100.0 * (node_count - len(assignment)) / node_count


@dataclass
class TokenAudit:
    discarded_count: int
    discarded_pct: float
    examples: list[str]
    vocabulary_size: int
    hashtags_only: bool = False

    def to_json(self) -> dict:
        return {"count": self.discarded_count, "pct": self.discarded_pct, "examples": self.examples,
                "vocabulary_size": self.vocabulary_size, "hashtags_only": self.hashtags_only}


def discarded_token_audit(
    attrs: AttributeTable,
    assignment: Partition | Mapping[int, int],
    hashtags_only: bool = False,
    k: int = 10,
) -> TokenAudit:
    """Tokens whose every carrier is unassigned, i.e. lost to community analysis."""
    assigned = as_mapping(assignment)
    freq: Counter = Counter()
    kept: set[str] = set()
    for node, toks in enumerate(attrs.tokens):
        for t in toks:
            if hashtags_only and not t.startswith("#"):
                continue
            freq[t] += 1
            if node in assigned:
                kept.add(t)
    lost = [t for t in freq if t not in kept]
    lost.sort(key=lambda t: (-freq[t], t))
    pct = 100.0 * len(lost) / len(freq) if freq else 0.0
    return TokenAudit(len(lost), pct, lost[:k], len(freq), hashtags_only)


def agreement_coloring(
    assignment: Partition | Mapping[int, int],
    truth: LabelTable,
    matching: Mapping[int, str],
) -> dict[int, str]:
    """``agree``/``disagree`` for every labeled node; unassigned counts as disagree."""
    assigned = as_mapping(assignment)
    out = {}
    for node, label in truth.labels.items():
        c = assigned.get(node)
        ok = c is not None and matching.get(c) == label
        out[node] = "agree" if ok else "disagree"
    return out


@dataclass
class MetricReport:
    avg_f1: float
    avg_jaccard: float
    unlabeled_pct: float
    q_final: float | None
    per_community: list[CommunityMatch] = field(default_factory=list)
    discarded_tokens: TokenAudit | None = None
    averaging: str = AVERAGING

    def to_json(self) -> dict:
        return {
            "avg_f1": self.avg_f1,
            "avg_jaccard": self.avg_jaccard,
            "unlabeled_pct": self.unlabeled_pct,
            "q_final": self.q_final,
            "averaging": self.averaging,
            "discarded_tokens": self.discarded_tokens.to_json() if self.discarded_tokens else None,
            "per_community": [asdict(m) for m in self.per_community],
        }


def metric_report(
    assignment: Mapping[int, int],
    truth: LabelTable,
    node_count: int,
    q_final: float | None = None,
    attrs: AttributeTable | None = None,
    hashtags_only: bool = False,
) -> MetricReport:
    scores = averaged_scores(assignment, truth)
    audit = discarded_token_audit(attrs, assignment, hashtags_only) if attrs is not None else None
    return MetricReport(
        scores.avg_f1,
        scores.avg_jaccard,
        unlabeled_fraction(node_count, assignment),
        q_final,
        scores.per_community,
        audit,
    )
