"""Per-degree group ratio statistic and degree-stratified subsampling.

For two ground-truth groups A and B the statistic at degree bucket ``d`` is
``|A nodes with degree in d| / |B nodes with degree in d|``. Subsampling
removes nodes (with their edges) until the least-squares slope of that
statistic over bucket midpoints hits a target.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .graph import ClanError, Graph, LabelTable

Bucketing = Literal["unit", "log2"]


def bucket_of(degree: int, bucketing: Bucketing = "unit") -> tuple[int, int]:
    if bucketing == "unit" or degree == 0:
        return degree, degree
    if bucketing == "log2":
        lo = 1 << (degree.bit_length() - 1)
        return lo, 2 * lo - 1
    raise ClanError(f"unknown bucketing {bucketing!r}")


@dataclass(frozen=True)
class CurvePoint:
    lo: int
    hi: int
    n_a: int
    n_b: int

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0

    @property
    def ratio(self) -> float | None:
        return self.n_a / self.n_b if self.n_b else None

    @property
    def included(self) -> bool:
        # zero counts on either side give no usable ratio; they are flagged, not clamped
        return self.n_a > 0 and self.n_b > 0


@dataclass
class RatioCurve:
    points: list[CurvePoint]
    fitted_slope: float | None
    fitted_intercept: float | None
    group_a: str
    group_b: str
    bucketing: str = "unit"

    @property
    def flagged(self) -> list[CurvePoint]:
        return [p for p in self.points if not p.included]

    def to_json(self) -> dict:
        return {
            "group_a": self.group_a,
            "group_b": self.group_b,
            "bucketing": self.bucketing,
            "fit": "least_squares_linear",
            "fitted_slope": self.fitted_slope,
            "fitted_intercept": self.fitted_intercept,
            "points": [
                {"lo": p.lo, "hi": p.hi, "midpoint": p.midpoint, "n_a": p.n_a, "n_b": p.n_b,
                 "ratio": p.ratio, "included": p.included}
                for p in self.points
            ],
        }

    def to_tsv(self) -> str:
        lines = ["degree\tratio"]
        lines += [f"{p.midpoint!r}\t{p.ratio!r}" for p in self.points if p.included]
        return "\n".join(lines) + "\n"


def fit_line(xs, ys) -> tuple[float | None, float | None]:
    """Ordinary least squares; a single distinct x gives slope 0."""
    if not xs:
        return None, None
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        return 0.0, float(y.mean())
    slope = float(dx @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


def degree_ratio_curve(
    graph: Graph,
    truth: LabelTable,
    group_a: str,
    group_b: str,
    bucketing: Bucketing = "unit",
) -> RatioCurve:
    present = truth.label_set
    for g in (group_a, group_b):
        if g not in present:
            raise ClanError(f"group {g!r} has no labeled nodes")
    counts: dict[tuple[int, int], list[int]] = {}
    for node, label in truth.labels.items():
        if label not in (group_a, group_b):
            continue
        key = bucket_of(graph.neighbor_count(node), bucketing)
        counts.setdefault(key, [0, 0])[label == group_b] += 1
    points = [CurvePoint(lo, hi, a, b) for (lo, hi), (a, b) in sorted(counts.items())]
    used = [p for p in points if p.included]
    slope, intercept = fit_line([p.midpoint for p in used], [p.ratio for p in used])
    return RatioCurve(points, slope, intercept, group_a, group_b, bucketing)


@dataclass
class SubsampleReport:
    target_slope: float
    achieved_slope: float | None
    tolerance: float
    within_tolerance: bool
    rounds: int
    removed: list[int]
    infeasible_buckets: list[tuple[int, int]]
    degree_origin: float
    epsilon: float
    seed: int
    damping: float = 1.0
    patience: int = 1

    def to_json(self, graph: Graph | None = None) -> dict:
        removed = [graph.external_ids[i] for i in self.removed] if graph else self.removed
        return {
            "target_slope": self.target_slope,
            "achieved_slope": self.achieved_slope,
            "tolerance": self.tolerance,
            "within_tolerance": self.within_tolerance,
            "rounds": self.rounds,
            "removed_count": len(self.removed),
            "removed": removed,
            "infeasible_buckets": [list(b) for b in self.infeasible_buckets],
            "target_ratio": f"max({self.epsilon}, 1 + slope * (d - {self.degree_origin}))",
            "seed": self.seed,
            "damping": self.damping,
            "patience": self.patience,
        }


@dataclass
class SubsampleResult:
    graph: Graph
    labels: LabelTable
    curve: RatioCurve
    report: SubsampleReport
    # original node id -> node id in the subsampled graph
    remap: dict[int, int] = field(repr=False, default_factory=dict)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def subsample_to_slope(
    graph: Graph,
    truth: LabelTable,
    group_a: str,
    group_b: str,
    target_slope: float,
    seed: int = 42,
    bucketing: Bucketing = "unit",
    epsilon: float = 0.05,
    rel_tol: float = 0.10,
    abs_tol: float = 0.05,
    max_rounds: int = 20,
    patience: int = 5,
    damping: float = 0.5,
) -> SubsampleResult:
    """Remove over-represented group members bucket by bucket.

    Each bucket's target ratio is ``max(epsilon, 1 + target_slope * (d - d_min))``
    with ``d_min`` the smallest usable bucket midpoint of the input. A round
    removes ``ceil(damping * excess)`` nodes per bucket, never emptying a
    group in a bucket. Removals change the degrees of neighbours, so rounds
    repeat on the shrunken graph until the fitted slope is within
    ``max(rel_tol * |target|, abs_tol)``, ``patience`` consecutive rounds fail
    to beat the best error, or nothing more can be removed. The best round
    seen (the first round at least) is returned; an input already within
    tolerance is returned untouched. Removed nodes are drawn uniformly with
    the given seed.
    """
    if not 0.0 < damping <= 1.0 or patience < 1:
        raise ClanError("damping must lie in (0, 1] and patience must be >= 1")
    curve = degree_ratio_curve(graph, truth, group_a, group_b, bucketing)
    usable = [p for p in curve.points if p.included]
    if not usable:
        raise ClanError(
            f"target unreachable: no degree bucket holds both {group_a!r} and {group_b!r}; "
            f"buckets={[(p.lo, p.hi, p.n_a, p.n_b) for p in curve.points]}"
        )
    d_min = min(p.midpoint for p in usable)
    tol = max(rel_tol * abs(target_slope), abs_tol)
    rng = np.random.default_rng(seed)

    def on_target(c: RatioCurve) -> bool:
        return c.fitted_slope is not None and abs(c.fitted_slope - target_slope) <= tol

    def error(c: RatioCurve) -> float:
        return math.inf if c.fitted_slope is None else abs(c.fitted_slope - target_slope)

    kept = set(range(graph.node_count))
    sub, remap, sub_labels = graph, {i: i for i in kept}, truth
    best = (error(curve), frozenset(kept), sub, remap, sub_labels, curve, 0, set())
    rounds = stale = 0
    while not on_target(curve) and rounds < max_rounds:
        back = {new: old for old, new in remap.items()}
        members: dict[tuple[int, int], tuple[list[int], list[int]]] = {}
        for node, label in sub_labels.labels.items():
            if label in (group_a, group_b):
                key = bucket_of(sub.neighbor_count(node), bucketing)
                members.setdefault(key, ([], []))[label == group_b].append(back[node])

        drop: list[int] = []
        infeasible: set[tuple[int, int]] = set()
        for key in sorted(members):
            a_nodes, b_nodes = members[key]
            if not a_nodes or not b_nodes:
                infeasible.add(key)
                continue
            mid = (key[0] + key[1]) / 2.0
            r = max(epsilon, 1.0 + target_slope * (mid - d_min))
            n_a, n_b = len(a_nodes), len(b_nodes)
            if n_a > r * n_b:
                pool, keep_n = a_nodes, max(1, _round_half_up(r * n_b))
            else:
                pool, keep_n = b_nodes, max(1, _round_half_up(n_a / r))
            excess = math.ceil((len(pool) - keep_n) * damping)
            if excess > 0:
                drop.extend(rng.choice(sorted(pool), size=excess, replace=False).tolist())
        if not drop:
            break
        rounds += 1
        kept.difference_update(drop)
        sub, remap = graph.induced_subgraph(kept)
        sub_labels = truth.restrict(remap)
        curve = degree_ratio_curve(sub, sub_labels, group_a, group_b, bucketing)
        if rounds > 1 and error(curve) >= best[0]:
            stale += 1
            if stale >= patience:
                break
            continue
        stale = 0
        best = (error(curve), frozenset(kept), sub, remap, sub_labels, curve, rounds, infeasible)

    _, kept, sub, remap, sub_labels, curve, rounds, infeasible = best
    report = SubsampleReport(
        target_slope=target_slope,
        achieved_slope=curve.fitted_slope,
        tolerance=tol,
        within_tolerance=on_target(curve),
        rounds=rounds,
        removed=sorted(set(range(graph.node_count)) - kept),
        infeasible_buckets=sorted(infeasible),
        degree_origin=d_min,
        epsilon=epsilon,
        seed=seed,
        damping=damping,
        patience=patience,
    )
    return SubsampleResult(sub, sub_labels, curve, report, remap)
