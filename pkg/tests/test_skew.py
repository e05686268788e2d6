import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clan.fixtures import SBM_FIXTURES
from clan.graph import ClanError, Graph, LabelTable
from clan.sbm import SbmSpec, generate_attributed_sbm
from clan.skew import bucket_of, degree_ratio_curve, fit_line, subsample_to_slope


def star_forest(spec):
    """Build a graph whose node degrees and labels are dictated exactly.

    ``spec`` is a list of (degree, label) pairs; each node gets ``degree``
    private unlabeled leaves.
    """
    ids, edges, labels = [], [], {}
    for degree, label in spec:
        hub = len(ids)
        ids.append(f"h{hub}")
        labels[hub] = label
        for _ in range(degree):
            leaf = len(ids)
            ids.append(f"l{leaf}")
            edges.append((hub, leaf, 1.0))
    return Graph.from_edges(ids, edges), LabelTable(labels)


def test_bucket_of():
    assert bucket_of(3) == (3, 3)
    assert bucket_of(1, "log2") == (1, 1)
    assert bucket_of(5, "log2") == (4, 7)
    assert bucket_of(8, "log2") == (8, 15)
    with pytest.raises(ClanError):
        bucket_of(3, "cubic")


def test_ratio_of_four_to_two():
    g, lab = star_forest([(2, "A")] * 4 + [(2, "B")] * 2)
    curve = degree_ratio_curve(g, lab, "A", "B")
    assert [(p.lo, p.ratio) for p in curve.points] == [(2, 2.0)]


def test_balanced_buckets_have_zero_slope():
    g, lab = star_forest([(d, grp) for d in (1, 2, 3, 5) for grp in "AB" for _ in range(d)])
    curve = degree_ratio_curve(g, lab, "A", "B")
    assert all(p.ratio == 1.0 for p in curve.points)
    assert curve.fitted_slope == 0.0


def test_empty_denominator_is_flagged_not_fitted():
    g, lab = star_forest([(1, "A"), (1, "B"), (2, "A"), (2, "B"), (2, "A"), (3, "A")])
    curve = degree_ratio_curve(g, lab, "A", "B")
    assert [(p.lo, p.included) for p in curve.points] == [(1, True), (2, True), (3, False)]
    assert curve.flagged[0].ratio is None
    # fit through (1, 1) and (2, 2) only
    assert curve.fitted_slope == pytest.approx(1.0)
    assert "3.0" not in curve.to_tsv()


def test_missing_group():
    g, lab = star_forest([(1, "A")])
    with pytest.raises(ClanError, match="'B'"):
        degree_ratio_curve(g, lab, "A", "B")


def test_fit_line_matches_closed_form():
    xs, ys = [1, 2, 3, 4], [2.0, 2.5, 4.5, 5.0]
    slope, icept = fit_line(xs, ys)
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxy, sxx = sum(x * y for x, y in zip(xs, ys)), sum(x * x for x in xs)
    assert slope == pytest.approx((n * sxy - sx * sy) / (n * sxx - sx * sx))
    assert icept == pytest.approx((sy - slope * sx) / n)
    assert fit_line([3.0], [7.0]) == (0.0, 7.0)


def skewed(seed=3, corr=0.3):
    spec = SbmSpec((100, 100), p_in=0.06, p_out=0.004, degree_label_correlation=corr, seed=seed)
    return generate_attributed_sbm(spec)


def test_identity_at_measured_slope():
    ds = skewed()
    measured = degree_ratio_curve(ds.graph, ds.labels, "block0", "block1").fitted_slope
    res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", measured)
    assert res.report.removed == []
    assert res.report.rounds == 0
    assert res.graph is ds.graph


@pytest.mark.parametrize("seed", range(1, 9))
def test_target_zero_flattens(seed):
    ds = skewed(seed)
    before = degree_ratio_curve(ds.graph, ds.labels, "block0", "block1").fitted_slope
    assert abs(before) > 0.05
    res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.0, seed=seed)
    again = degree_ratio_curve(res.graph, res.labels, "block0", "block1")
    assert -0.05 <= again.fitted_slope <= 0.05
    assert res.report.within_tolerance


def test_report_matches_recomputed_curve():
    ds = skewed()
    res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.5, seed=9)
    again = degree_ratio_curve(res.graph, res.labels, "block0", "block1")
    assert again.to_json() == res.curve.to_json()
    assert res.report.achieved_slope == again.fitted_slope


def test_output_is_induced_subgraph():
    ds = skewed()
    res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", -0.5, seed=4)
    kept = sorted(res.remap)
    assert set(kept).isdisjoint(res.report.removed)
    assert len(kept) + len(res.report.removed) == ds.graph.node_count
    ref, _ = ds.graph.induced_subgraph(kept)
    assert res.graph.edges == ref.edges
    assert res.graph.external_ids == tuple(ds.graph.external_ids[i] for i in kept)
    for old, new in res.remap.items():
        assert res.labels.labels[new] == ds.labels.labels[old]


def test_deterministic_and_seed_sensitive():
    ds = skewed()
    a = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.0, seed=5)
    b = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.0, seed=5)
    c = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.0, seed=6)
    assert a.report.removed == b.report.removed
    assert a.graph.edges == b.graph.edges
    assert a.report.removed != c.report.removed


def test_unreachable_target():
    # groups never share a degree bucket
    g, lab = star_forest([(1, "A"), (2, "B")])
    with pytest.raises(ClanError, match="target unreachable"):
        subsample_to_slope(g, lab, "A", "B", 0.0)


def test_log2_bucketing_runs():
    ds = generate_attributed_sbm(SBM_FIXTURES["introvert"])
    res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", 0.0, bucketing="log2")
    assert res.curve.bucketing == "log2"
    assert all(p.hi >= p.lo for p in res.curve.points)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([-0.5, 0.0, 0.5]))
def test_only_removes_nodes(seed, slope):
    ds = generate_attributed_sbm(SbmSpec((40, 40), p_in=0.1, p_out=0.01, seed=seed,
                                         degree_label_correlation=0.3))
    try:
        res = subsample_to_slope(ds.graph, ds.labels, "block0", "block1", slope, seed=seed)
    except ClanError:
        return
    assert res.graph.node_count <= ds.graph.node_count
    assert set(res.graph.external_ids) <= set(ds.graph.external_ids)
    assert res.graph.edges == ds.graph.induced_subgraph(sorted(res.remap))[0].edges
