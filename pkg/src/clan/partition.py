from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import ClanError


@dataclass(frozen=True)
class Partition:
    """Total assignment of nodes ``0..n-1`` to integer community ids."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))
        if any(c < 0 for c in self.assignment):
            raise ClanError("community ids must be non-negative")

    @property
    def node_count(self) -> int:
        return len(self.assignment)

    @property
    def sizes(self) -> dict[int, int]:
        return dict(sorted(Counter(self.assignment).items()))

    def __getitem__(self, node: int) -> int:
        return self.assignment[node]

    def __len__(self) -> int:
        return len(self.assignment)

    def communities(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for node, c in enumerate(self.assignment):
            out.setdefault(c, []).append(node)
        return dict(sorted(out.items()))

    def is_normalized(self) -> bool:
        return set(self.assignment) == set(range(len(self.sizes)))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def one_community(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @classmethod
    def normalized(cls, labels: Sequence[int]) -> "Partition":
        """Relabel to ``0..k-1`` by decreasing size, ties by smallest member."""
        first: dict[int, int] = {}
        size: Counter = Counter(labels)
        for node, c in enumerate(labels):
            first.setdefault(c, node)
        order = sorted(size, key=lambda c: (-size[c], first[c]))
        relabel = {c: i for i, c in enumerate(order)}
        return cls(tuple(relabel[c] for c in labels))

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]], n: int) -> "Partition":
        labels = [-1] * n
        for cid, members in enumerate(groups):
            for node in members:
                if labels[node] != -1:
                    raise ClanError(f"node {node} appears in two groups")
                labels[node] = cid
        if -1 in labels:
            raise ClanError("groups do not cover every node")
        return cls(tuple(labels))


def restrict_to(partition: Partition, keep: Iterable[int]) -> dict[int, int]:
    """Partial assignment: only nodes whose community is in ``keep``."""
    keep = set(keep)
    return {n: c for n, c in enumerate(partition.assignment) if c in keep}


def as_mapping(assignment: Partition | Mapping[int, int]) -> dict[int, int]:
    if isinstance(assignment, Partition):
        return dict(enumerate(assignment.assignment))
    return dict(assignment)
