"""Independent reference computations used as test oracles."""
import numpy as np


def brute_modularity(n, edges, labels):
    """Q = 1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j] from a dense matrix."""
    A = np.zeros((n, n))
    for u, v, w in edges:
        if u == v:
            A[u, u] += 2 * w
        else:
            A[u, v] += w
            A[v, u] += w
    k = A.sum(axis=1)
    two_m = k.sum()
    same = np.equal.outer(labels, labels)
    return float(((A - np.outer(k, k) / two_m) * same).sum() / two_m)


def set_partitions(n):
    """All partitions of range(n) as restricted-growth label tuples."""

    def rec(i, labels, k):
        if i == n:
            yield tuple(labels)
            return
        for c in range(k + 1):
            labels.append(c)
            yield from rec(i + 1, labels, max(k, c + 1))
            labels.pop()

    yield from rec(0, [], 0)


def best_partition(n, edges):
    return max((brute_modularity(n, edges, p), p) for p in set_partitions(n))
