"""Brute-force reference implementations used only by the tests."""

import itertools

import numpy as np


def warping_paths(n, m):
    """Every monotone path from (0, 0) to (n-1, m-1) using the three standard moves."""
    def walk(i, j):
        if (i, j) == (n - 1, m - 1):
            yield [(i, j)]
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for rest in walk(a, b):
                    yield [(i, j)] + rest
    yield from walk(0, 0)


def brute_dtw(a, b):
    return min(sum(abs(a[i] - b[j]) for i, j in p) for p in warping_paths(len(a), len(b)))


def brute_frechet(a, b):
    return min(max(abs(a[i] - b[j]) for i, j in p) for p in warping_paths(len(a), len(b)))


def best_two_partition_sse(x):
    """Minimum within-cluster SSE over all splits of the rows of ``x`` into two non-empty groups."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    best = np.inf
    for mask in itertools.product([0, 1], repeat=n - 1):
        lab = np.array((0,) + mask)
        if lab.min() == lab.max():
            continue
        sse = sum(float(np.sum((x[lab == g] - x[lab == g].mean(axis=0)) ** 2)) for g in (0, 1))
        best = min(best, sse)
    return best


def partition_sse(x, assign):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return sum(float(np.sum((x[assign == g] - x[assign == g].mean(axis=0)) ** 2)) for g in np.unique(assign))
