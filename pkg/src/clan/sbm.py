"""Seeded attributed stochastic block model.

Nodes get ids ``n0..n{N-1}``, labels ``block{b}`` and hashtag tokens drawn
from their block's vocabulary. ``degree_label_correlation`` scales the edge
propensity of block 0 by ``1 + c`` (edge probability ``min(1, p * t_i * t_j)``),
so c > 0 makes block 0 the well-connected group and -1 < c < 0 makes it the
introverted one.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import AttributeTable, ClanError, Graph, LabelTable


@dataclass(frozen=True)
class SbmSpec:
    block_sizes: tuple[int, ...] = (50, 50)
    p_in: float = 0.2
    p_out: float = 0.01
    tokens_per_node: int = 8
    vocab_per_block: int = 20
    token_overlap: float = 0.0
    degree_label_correlation: float = 0.0
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(int(s) for s in self.block_sizes))
        if not self.block_sizes or any(s < 1 for s in self.block_sizes):
            raise ClanError("block sizes must be positive")
        for name in ("p_in", "p_out", "token_overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ClanError(f"{name} must lie in [0, 1], got {v}")
        if self.p_out > self.p_in:
            raise ClanError(f"p_out ({self.p_out}) must not exceed p_in ({self.p_in})")
        if self.tokens_per_node < 0 or self.vocab_per_block < 1:
            raise ClanError("tokens_per_node must be >= 0 and vocab_per_block >= 1")
        if self.degree_label_correlation <= -1.0:
            raise ClanError("degree_label_correlation must be > -1")

    @classmethod
    def from_json(cls, path) -> "SbmSpec":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ClanError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        d = asdict(self)
        d["block_sizes"] = list(self.block_sizes)
        return d


@dataclass
class SbmDataset:
    graph: Graph
    attrs: AttributeTable
    labels: LabelTable
    block_of: list[int] = field(repr=False)


def block_vocabularies(spec: SbmSpec) -> list[list[str]]:
    n_shared = round(spec.token_overlap * spec.vocab_per_block)
    shared = [f"#shared{j}" for j in range(n_shared)]
    return [
        shared + [f"#b{b}w{j}" for j in range(spec.vocab_per_block - n_shared)]
        for b in range(len(spec.block_sizes))
    ]


def generate_attributed_sbm(spec: SbmSpec) -> SbmDataset:
    rng = np.random.default_rng(spec.seed)
    block = np.repeat(np.arange(len(spec.block_sizes)), spec.block_sizes)
    n = block.size

    propensity = np.ones(n)
    propensity[block == 0] = 1.0 + spec.degree_label_correlation
    same = block[:, None] == block[None, :]
    prob = np.where(same, spec.p_in, spec.p_out) * np.outer(propensity, propensity)
    np.clip(prob, 0.0, 1.0, out=prob)
    draws = rng.random((n, n))
    iu, ju = np.triu_indices(n, k=1)
    hit = draws[iu, ju] < prob[iu, ju]
    edges = [(int(u), int(v), 1.0) for u, v in zip(iu[hit], ju[hit])]

    ids = [f"n{i}" for i in range(n)]
    graph = Graph.from_edges(ids, edges)

    vocabs = block_vocabularies(spec)
    tokens = []
    for b in block:
        vocab = vocabs[b]
        picks = rng.integers(0, len(vocab), size=spec.tokens_per_node)
        tokens.append(tuple(vocab[i] for i in picks))
    labels = LabelTable({i: f"block{b}" for i, b in enumerate(block)})
    return SbmDataset(graph, AttributeTable(tuple(tokens)), labels, block.tolist())
