"""Small embedded datasets so tests and demos need no downloads."""
from __future__ import annotations

import numpy as np

from .graph import AttributeTable, Graph, LabelTable
from .sbm import SbmSpec

TWO_TRIANGLES = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]

# Zachary (1977), 34 members, 78 friendships, 0-indexed.
KARATE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11),
    (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13),
    (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27),
    (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32),
    (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33), (23, 25),
    (23, 27), (23, 29), (23, 32), (23, 33), (24, 25), (24, 27), (24, 31), (25, 31), (26, 29),
    (26, 33), (27, 33), (28, 31), (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32),
    (31, 33), (32, 33),
]
# Faction each member joined after the split.
KARATE_OFFICER = {9, 14, 15, 18, 20, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33}

# Sparse two-block specs with informative hashtags; used by the acceptance suite.
SBM_FIXTURES = {
    "sparse": SbmSpec((100, 100), p_in=0.05, p_out=0.003, tokens_per_node=8,
                      vocab_per_block=30, token_overlap=0.2),
    "denser": SbmSpec((100, 100), p_in=0.08, p_out=0.004, tokens_per_node=8,
                      vocab_per_block=30, token_overlap=0.1),
    "introvert": SbmSpec((100, 100), p_in=0.07, p_out=0.004, tokens_per_node=8,
                         vocab_per_block=30, token_overlap=0.2, degree_label_correlation=-0.4),
}

# Degree-skewed input for the subsampling harness; slope about 0.75 at seed 42.
SKEWED_SBM = SbmSpec((100, 100), p_in=0.06, p_out=0.004, tokens_per_node=8, vocab_per_block=30,
                     token_overlap=0.2, degree_label_correlation=0.3)


def two_triangles() -> Graph:
    ids = list("abcdef")
    return Graph.from_edges(ids, [(ids.index(u), ids.index(v), 1.0) for u, v in TWO_TRIANGLES])


def karate_club() -> tuple[Graph, LabelTable]:
    g = Graph.from_edges([str(i) for i in range(34)], [(u, v, 1.0) for u, v in KARATE_EDGES])
    labels = LabelTable({i: "Officer" if i in KARATE_OFFICER else "Mr. Hi" for i in range(34)})
    return g, labels


def karate_attributes(seed: int = 42, tokens_per_node: int = 6, overlap: float = 0.2) -> AttributeTable:
    """Synthetic hashtags: each member mostly uses their faction's tags."""
    rng = np.random.default_rng(seed)
    vocab = {"Mr. Hi": [f"#hi{j}" for j in range(12)], "Officer": [f"#officer{j}" for j in range(12)]}
    shared = [f"#karate{j}" for j in range(4)]
    _, labels = karate_club()
    tokens = []
    for node in range(34):
        own = vocab[labels.labels[node]]
        picks = []
        for _ in range(tokens_per_node):
            pool = shared if rng.random() < overlap else own
            picks.append(pool[rng.integers(len(pool))])
        tokens.append(tuple(picks))
    return AttributeTable(tuple(tokens))
