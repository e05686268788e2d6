"""Command-line front end: ``clan {detect,evaluate,audit,skew,generate}``.

Results are computed fully in memory and only then written, so a failing
command leaves no partial output behind. JSON outputs use sorted keys and
are byte-identical across runs with the same inputs and seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from collections import Counter
from dataclasses import replace
from pathlib import Path

from .evaluation import (
    agreement_coloring,
    averaged_scores,
    discarded_token_audit,
    metric_report,
    unlabeled_fraction,
)
from .experiment import compare_methods, detect
from .export import to_dot, to_gexf
from .graph import (
    ClanError,
    Graph,
    LabelTable,
    load_attributes,
    load_edge_list,
    load_labels,
    write_attributes,
    write_edge_list,
    write_labels,
)
from .modularity import LouvainConfig
from .sbm import SbmSpec, generate_attributed_sbm
from .skew import degree_ratio_curve, subsample_to_slope


class CommandError(ClanError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def commit(out_dir: Path, files: dict[str, str]) -> None:
    """Write every file via temp-file + rename; remove what was written on failure."""
    written = []
    try:
        for rel, text in files.items():
            dest = out_dir / rel
            dest.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=dest.parent, prefix=".tmp-")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, dest)
            written.append(dest)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise CommandError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def _config(args) -> LouvainConfig:
    return LouvainConfig(seed=args.seed)


def _load_graph(args) -> Graph:
    return load_edge_list(args.edges, unweighted=args.unweighted)


def _graph_text(graph: Graph, node_attrs, fmt: str) -> tuple[str, str] | None:
    if fmt == "dot":
        return "dot", to_dot(graph, node_attrs)
    if fmt == "gexf":
        return "gexf", to_gexf(graph, node_attrs)
    return None


def _config_echo(args, threshold) -> dict:
    return {
        "method": getattr(args, "method", None),
        "threshold": threshold,
        "alpha": args.alpha,
        "seed": args.seed,
        "unweighted": args.unweighted,
        "edges": args.edges,
        "attrs": args.attrs,
        "labels": args.labels,
    }


def cmd_detect(args) -> dict[str, str]:
    _require(args, "edges")
    if args.method == "clan" and args.attrs is None:
        raise CommandError("--attrs is required for --method clan")
    graph = _load_graph(args)
    attrs = None
    if args.attrs is not None:
        graph, attrs = load_attributes(args.attrs, graph)
    det = detect(graph, attrs, args.method, args.threshold, _config(args), args.alpha)

    ids = graph.external_ids
    communities = {
        "method": det.method,
        "threshold": det.threshold,
        "seed": args.seed,
        "alpha": args.alpha,
        "q_final": det.q_final,
        "q_step1": det.q_step1,
        "significant": sorted(det.significant),
        "communities": {ids[n]: c for n, c in enumerate(det.partition.assignment)},
        "step1": {ids[n]: c for n, c in enumerate(det.step1.assignment)},
        "reassigned": {
            ids[n]: {"from": r.source, "to": r.target, "posterior": r.posterior}
            for n, r in sorted(det.reassigned.items())
        },
    }
    report = {
        "q_final": det.q_final,
        "q_step1": det.q_step1,
        "node_count": graph.node_count,
        "num_communities": len(det.partition.sizes),
        "sizes": {str(c): s for c, s in det.partition.sizes.items()},
        "reassigned_count": len(det.reassigned),
        "unlabeled_pct": unlabeled_fraction(graph.node_count, det.assignment),
        "config": _config_echo(args, det.threshold),
    }
    files = {"communities.json": dumps(communities), "report.json": dumps(report)}
    node_attrs = {
        n: {"community": c, "step1_community": det.step1[n], "significant": c in det.significant}
        for n, c in enumerate(det.partition.assignment)
    }
    exported = _graph_text(graph, node_attrs, args.format)
    if exported:
        files[f"graph.{exported[0]}"] = exported[1]
    return files


def _read_communities(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path}: invalid JSON ({exc.msg})") from None
    for key in ("communities", "significant"):
        if key not in data:
            raise CommandError(f"{path}: missing key {key!r}")
    return data


def _graph_for(args, comm: dict) -> tuple[Graph, dict[int, int]]:
    """Graph over the detected node set plus the significant-only assignment."""
    ext = list(comm["communities"])
    if args.edges is not None:
        graph = _load_graph(args)
        extra = set(graph.external_ids) - set(ext)
        if extra:
            raise CommandError(f"edge list has nodes missing from communities: {sorted(extra)[:5]}")
        graph = graph.with_nodes(ext)
    else:
        graph = Graph.from_ids(ext)
    sig = set(comm["significant"])
    assignment = {
        graph.index[e]: c for e, c in comm["communities"].items() if c in sig
    }
    return graph, assignment


def cmd_evaluate(args) -> dict[str, str]:
    _require(args, "communities", "labels")
    comm = _read_communities(args.communities)
    graph, assignment = _graph_for(args, comm)
    try:
        labels = load_labels(args.labels, graph)
    except ClanError as exc:
        raise CommandError(f"label/community id mismatch: {exc}") from None
    attrs = None
    if args.attrs is not None:
        g2, attrs = load_attributes(args.attrs, graph)
        if g2.node_count != graph.node_count:
            raise CommandError("attribute file has ids missing from communities")
    report = metric_report(
        assignment, labels, graph.node_count, comm.get("q_final"), attrs, args.hashtags_only
    )
    matching = averaged_scores(assignment, labels).matching
    colors = agreement_coloring(assignment, labels, matching)
    out = report.to_json()
    out["method"] = comm.get("method")
    out["seed"] = comm.get("seed")
    out["labeled_nodes"] = len(labels.labels)
    out["agreement"] = dict(sorted(Counter(colors.values()).items()))
    files = {"report.json": dumps(out)}
    node_attrs = {n: {"agreement": c, "truth": labels.labels[n]} for n, c in colors.items()}
    for n, c in assignment.items():
        node_attrs.setdefault(n, {})["community"] = c
    fmt = args.format if args.format in ("dot", "gexf") else "dot"
    kind, text = _graph_text(graph, node_attrs, fmt)
    files[f"agreement.{kind}"] = text
    return files


def cmd_audit(args) -> dict[str, str]:
    _require(args, "communities", "attrs")
    comm = _read_communities(args.communities)
    graph, assignment = _graph_for(args, comm)
    graph, attrs = load_attributes(args.attrs, graph)
    audit = discarded_token_audit(attrs, assignment, args.hashtags_only, k=args.examples)
    return {"audit.json": dumps(audit.to_json())}


def _pick_groups(args, labels: LabelTable) -> tuple[str, str]:
    if args.groups:
        parts = [g.strip() for g in args.groups.split(",")]
        if len(parts) != 2:
            raise CommandError("--groups takes exactly two labels: A,B")
        return parts[0], parts[1]
    counts = Counter(labels.labels.values())
    top = sorted(counts, key=lambda g: (-counts[g], g))
    if len(top) < 2:
        raise CommandError("need two ground-truth groups for the skew experiment")
    return top[0], top[1]


def _slope_dir(s: float) -> str:
    return f"slope_{s:g}"


def _scores(rep) -> dict:
    return {"avg_f1": rep.avg_f1, "avg_jaccard": rep.avg_jaccard, "unlabeled_pct": rep.unlabeled_pct}


def cmd_skew(args) -> dict[str, str]:
    _require(args, "edges", "attrs", "labels")
    graph = _load_graph(args)
    graph, attrs = load_attributes(args.attrs, graph)
    labels = load_labels(args.labels, graph)
    group_a, group_b = _pick_groups(args, labels)
    slopes = [float(s) for s in args.slopes.split(",") if s.strip()]
    if not slopes:
        raise CommandError("--slopes needs at least one value")
    base = degree_ratio_curve(graph, labels, group_a, group_b, args.bucketing)

    files: dict[str, str] = {}
    cells = []
    for s in slopes:
        cell: dict = {"slope": s, "dir": _slope_dir(s)}
        try:
            res = subsample_to_slope(
                graph, labels, group_a, group_b, s, seed=args.seed, bucketing=args.bucketing
            )
            sub_attrs = attrs.restrict(res.remap)
            results = compare_methods(
                res.graph, sub_attrs, res.labels, args.threshold, _config(args), args.alpha
            )
        except ClanError as exc:
            cell.update(status="failed", error=str(exc))
            cells.append(cell)
            continue
        d = Path(cell["dir"])
        with tempfile.TemporaryDirectory() as tmp:
            write_edge_list(res.graph, Path(tmp) / "e")
            write_attributes(res.graph, sub_attrs, Path(tmp) / "a")
            write_labels(res.graph, res.labels, Path(tmp) / "l")
            for name, src in (("edges.tsv", "e"), ("attrs.jsonl", "a"), ("labels.csv", "l")):
                files[str(d / name)] = (Path(tmp) / src).read_text(encoding="utf-8")
        files[str(d / "curve.tsv")] = res.curve.to_tsv()
        files[str(d / "curve.json")] = dumps(res.curve.to_json())
        files[str(d / "subsample.json")] = dumps(res.report.to_json(graph))
        cell.update(
            status="ok",
            achieved_slope=res.report.achieved_slope,
            within_tolerance=res.report.within_tolerance,
            node_count=res.graph.node_count,
            removed_count=len(res.report.removed),
        )
        for method, (det, rep) in results.items():
            body = rep.to_json()
            body["threshold"] = det.threshold
            files[str(d / method / "report.json")] = dumps(body)
            cell[method] = _scores(rep)
        cells.append(cell)

    summary = {
        "groups": [group_a, group_b],
        "bucketing": args.bucketing,
        "seed": args.seed,
        "threshold": args.threshold,
        "alpha": args.alpha,
        "input_slope": base.fitted_slope,
        "cells": cells,
    }
    files["summary.json"] = dumps(summary)
    files["curve.tsv"] = base.to_tsv()
    args._failed = sum(c["status"] != "ok" for c in cells)
    return files


def cmd_generate(args) -> dict[str, str]:
    _require(args, "spec")
    spec = SbmSpec.from_json(args.spec)
    if args.seed_given:
        spec = replace(spec, seed=args.seed)
    ds = generate_attributed_sbm(spec)
    files = {}
    with tempfile.TemporaryDirectory() as tmp:
        t = Path(tmp)
        write_edge_list(ds.graph, t / "edges.tsv")
        write_attributes(ds.graph, ds.attrs, t / "attrs.jsonl")
        write_labels(ds.graph, ds.labels, t / "labels.csv")
        for name in ("edges.tsv", "attrs.jsonl", "labels.csv"):
            files[name] = (t / name).read_text(encoding="utf-8")
    files["spec-echo.json"] = dumps(spec.to_json())
    return files


COMMANDS = {
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "audit": cmd_audit,
    "skew": cmd_skew,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("CLAN_SEED")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--edges")
    common.add_argument("--attrs")
    common.add_argument("--labels")
    common.add_argument("--communities", help="communities.json written by 'detect'")
    common.add_argument("--threshold", type=int, default=None,
                        help="significance threshold (default max(10, ceil(0.01 n)))")
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--method", choices=("clan", "louvain"), default="clan")
    common.add_argument("--out", default=".")
    common.add_argument("--format", choices=("json", "dot", "gexf", "tsv"), default="dot")
    common.add_argument("--hashtags-only", action="store_true")
    common.add_argument("--slopes", default="-0.5,0,0.5")
    common.add_argument("--groups", help="two labels A,B for the degree-ratio statistic")
    common.add_argument("--bucketing", choices=("unit", "log2"), default="unit")
    common.add_argument("--spec", help="SBM spec JSON for 'generate'")
    common.add_argument("--examples", type=int, default=10, help="example tokens in audit.json")
    common.add_argument("--unweighted", action="store_true")

    parser = argparse.ArgumentParser(
        prog="clan", description="Louvain communities with attribute-based reassignment of small ones."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    parser.set_defaults(env_seed=env_seed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None or bool(args.env_seed)
    if args.seed is None:
        args.seed = int(args.env_seed) if args.env_seed else 42
    try:
        if args.threshold is not None and args.threshold < 1:
            raise CommandError("--threshold must be >= 1")
        if not args.alpha > 0:
            raise CommandError("--alpha must be > 0")
        files = COMMANDS[args.command](args)
        commit(Path(args.out), files)
    except (ClanError, OSError) as exc:
        print(f"clan {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "_failed", 0):
        print(f"clan skew: {args._failed} slope(s) failed; see summary.json", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
