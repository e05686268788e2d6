"""Graph, attribute and label data model plus file ingestion.

Nodes are dense integers ``0..n-1``; the original string ids are kept in
``Graph.external_ids``. Any id seen in an edge, attribute or label file
becomes a node, so degree-0 users are representable.
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence


class ClanError(ValueError):
    """Base error for invalid inputs anywhere in the package."""


class ParseError(ClanError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with merged parallel edges.

    ``edges`` holds one ``(u, v, w)`` triple per unordered pair with ``u <= v``.
    A self-loop of weight ``w`` adds ``2w`` to its endpoint's degree.
    """

    external_ids: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    adjacency: tuple[tuple[tuple[int, float], ...], ...] = field(repr=False)
    degrees: tuple[float, ...] = field(repr=False)
    total_weight_2m: float
    index: Mapping[str, int] = field(repr=False, compare=False)

    @property
    def node_count(self) -> int:
        return len(self.external_ids)

    @classmethod
    def from_edges(
        cls,
        external_ids: Sequence[str],
        edges: Iterable[tuple[int, int, float]],
        unweighted: bool = False,
    ) -> "Graph":
        ids = tuple(str(x) for x in external_ids)
        n = len(ids)
        if len(set(ids)) != n:
            raise ClanError("duplicate external node ids")
        merged: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ClanError(f"edge ({u}, {v}) references unknown node")
            if not (w > 0 and math.isfinite(w)):
                raise ClanError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if u <= v else (v, u)
            merged[key] = merged.get(key, 0.0) + float(w)
        if unweighted:
            merged = {k: 1.0 for k in merged}
        edge_list = tuple((u, v, w) for (u, v), w in sorted(merged.items()))

        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        deg = [0.0] * n
        for u, v, w in edge_list:
            if u == v:
                adj[u].append((u, w))
                deg[u] += 2.0 * w
            else:
                adj[u].append((v, w))
                adj[v].append((u, w))
                deg[u] += w
                deg[v] += w
        for row in adj:
            row.sort()
        return cls(
            external_ids=ids,
            edges=edge_list,
            adjacency=tuple(tuple(row) for row in adj),
            degrees=tuple(deg),
            total_weight_2m=math.fsum(deg),
            index=MappingProxyType({x: i for i, x in enumerate(ids)}),
        )

    @classmethod
    def from_ids(cls, external_ids: Sequence[str]) -> "Graph":
        """Edgeless graph over the given ids."""
        return cls.from_edges(external_ids, ())

    def with_nodes(self, ids: Iterable[str]) -> "Graph":
        """Return a graph extended by any ids not already present (as isolated nodes)."""
        new = [x for x in dict.fromkeys(ids) if x not in self.index]
        if not new:
            return self
        return Graph.from_edges(self.external_ids + tuple(new), self.edges)

    def induced_subgraph(self, keep: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Subgraph on ``keep`` (original order preserved) and the old->new id map."""
        kept = sorted(set(keep))
        remap = {old: new for new, old in enumerate(kept)}
        edges = [
            (remap[u], remap[v], w)
            for u, v, w in self.edges
            if u in remap and v in remap
        ]
        sub = Graph.from_edges([self.external_ids[i] for i in kept], edges)
        return sub, remap

    def neighbor_count(self, node: int) -> int:
        """Unweighted degree: number of distinct neighbours, self excluded."""
        return sum(1 for v, _ in self.adjacency[node] if v != node)


@dataclass(frozen=True)
class AttributeTable:
    """Per-node token lists, aligned with a graph's dense node ids."""

    tokens: tuple[tuple[str, ...], ...]

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(t for toks in self.tokens for t in toks)

    def restrict(self, remap: Mapping[int, int]) -> "AttributeTable":
        out: list[tuple[str, ...]] = [()] * len(remap)
        for old, new in remap.items():
            out[new] = self.tokens[old]
        return AttributeTable(tuple(out))


@dataclass(frozen=True)
class LabelTable:
    """Partial map from node id to ground-truth label."""

    labels: Mapping[int, str]

    def __post_init__(self):
        object.__setattr__(self, "labels", MappingProxyType(dict(sorted(self.labels.items()))))

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels.values())

    def groups(self) -> dict[str, frozenset[int]]:
        out: dict[str, set[int]] = defaultdict(set)
        for node, label in self.labels.items():
            out[label].add(node)
        return {k: frozenset(v) for k, v in sorted(out.items())}

    def restrict(self, remap: Mapping[int, int]) -> "LabelTable":
        return LabelTable({remap[n]: lab for n, lab in self.labels.items() if n in remap})


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if line.strip():
                yield lineno, line


def load_edge_list(path, unweighted: bool = False) -> Graph:
    """Read ``src<TAB>dst[<TAB>weight]`` lines; ``#`` lines are comments.

    Direction is discarded and parallel edges merge by summing weights
    (or collapse to weight 1 with ``unweighted``).
    """
    index: dict[str, int] = {}
    edges = []
    for lineno, line in _data_lines(path):
        if line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise ParseError(path, lineno, f"expected 2 or 3 tab-separated fields, got {len(fields)}")
        src, dst = fields[0].strip(), fields[1].strip()
        if not src or not dst:
            raise ParseError(path, lineno, "empty node id")
        w = 1.0
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise ParseError(path, lineno, f"bad weight {fields[2]!r}") from None
            if not (w > 0 and math.isfinite(w)):
                raise ParseError(path, lineno, f"weight must be positive, got {fields[2]!r}")
        u = index.setdefault(src, len(index))
        v = index.setdefault(dst, len(index))
        edges.append((u, v, w))
    if not edges:
        raise ClanError(f"{path}: empty graph")
    return Graph.from_edges(list(index), edges, unweighted=unweighted)


def write_edge_list(graph: Graph, path) -> None:
    """Inverse of :func:`load_edge_list`; isolated nodes are not representable."""
    ids = graph.external_ids
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w in graph.edges:
            if w == 1.0:
                fh.write(f"{ids[u]}\t{ids[v]}\n")
            else:
                fh.write(f"{ids[u]}\t{ids[v]}\t{w!r}\n")


def _strip_token(tok: str) -> str:
    keep = lambda c: c.isalnum() or c in "#@"  # noqa: E731
    i, j = 0, len(tok)
    while i < j and not keep(tok[i]):
        i += 1
    while j > i and not keep(tok[j - 1]):
        j -= 1
    return tok[i:j]


def tokenize(text: str) -> list[str]:
    """Lowercase, whitespace split, strip edge punctuation but keep ``#``/``@``."""
    out = []
    for raw in text.lower().split():
        tok = _strip_token(raw)
        if tok:
            out.append(tok)
    return out


def load_attributes(path, graph: Graph) -> tuple[Graph, AttributeTable]:
    """Read JSON-lines ``{"id", "tokens"|"text"}`` records.

    Returns the graph extended with any previously unseen ids (as isolated
    nodes) together with the attribute table covering every node. Repeated
    ids accumulate tokens.
    """
    records: dict[str, list[str]] = {}
    for lineno, line in _data_lines(path):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(path, lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), (str, int)):
            raise ParseError(path, lineno, "record needs a string 'id'")
        if "tokens" in obj:
            toks = obj["tokens"]
            if not isinstance(toks, list) or not all(isinstance(t, str) for t in toks):
                raise ParseError(path, lineno, "'tokens' must be a list of strings")
            toks = [t.lower() for t in toks if t]
        elif "text" in obj:
            if not isinstance(obj["text"], str):
                raise ParseError(path, lineno, "'text' must be a string")
            toks = tokenize(obj["text"])
        else:
            raise ParseError(path, lineno, "record has neither 'tokens' nor 'text'")
        records.setdefault(str(obj["id"]), []).extend(toks)

    graph = graph.with_nodes(records)
    tokens = [()] * graph.node_count
    for ext, toks in records.items():
        tokens[graph.index[ext]] = tuple(toks)
    return graph, AttributeTable(tuple(tokens))


def load_labels(path, graph: Graph) -> LabelTable:
    """Read headerless ``id,label`` CSV; every id must already be a node."""
    labels: dict[int, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ParseError(path, lineno, f"expected 'id,label', got {len(row)} fields")
            ext, label = row[0].strip(), row[1].strip()
            if ext not in graph.index:
                raise ParseError(path, lineno, f"unknown node id {ext!r}")
            node = graph.index[ext]
            if labels.get(node, label) != label:
                raise ParseError(
                    path, lineno, f"conflicting labels for {ext!r}: {labels[node]!r} vs {label!r}"
                )
            labels[node] = label
    return LabelTable(labels)


def write_attributes(graph: Graph, attrs: AttributeTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ext, toks in zip(graph.external_ids, attrs.tokens):
            fh.write(json.dumps({"id": ext, "tokens": list(toks)}) + "\n")


def write_labels(graph: Graph, labels: LabelTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for node, label in labels.labels.items():
            writer.writerow([graph.external_ids[node], label])
