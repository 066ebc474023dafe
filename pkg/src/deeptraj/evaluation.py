"""Cluster validity, posterior memberships and cross-method agreement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .core_math import mean_and_covariance
from .errors import ConstantColumn, DegeneratePartition, SizeMismatch
from .partition import MembershipMatrix, Partition


def _labels(p) -> np.ndarray:
    if isinstance(p, Partition):
        return p.assignments
    if isinstance(p, MembershipMatrix):
        return p.hard()
    return np.asarray(p)


def _as_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64)
    return x[:, None] if x.ndim == 1 else x.reshape(x.shape[0], -1)


def dispersion(points, labels) -> tuple[float, float]:
    """Between-group and within-group sums of squares ``(BGSS, WGSS)``."""
    x = _as_points(points)
    labels = np.asarray(labels)
    grand = x.mean(axis=0)
    bgss = wgss = 0.0
    for lab in np.unique(labels):
        members = x[labels == lab]
        centroid = members.mean(axis=0)
        bgss += members.shape[0] * float(np.sum((centroid - grand) ** 2))
        wgss += float(np.sum((members - centroid) ** 2))
    return bgss, wgss


def calinski_harabasz(points, partition) -> float:
    """Variance-ratio criterion ``(BGSS / (k - 1)) / (WGSS / (N - k))``.

    Returns ``inf`` when every cluster is a single repeated point (WGSS = 0).
    Empty clusters in a :class:`Partition` or fewer than two clusters raise
    :class:`DegeneratePartition`.
    """
    x = _as_points(points)
    labels = _labels(partition)
    if labels.shape[0] != x.shape[0]:
        raise SizeMismatch(f"{labels.shape[0]} labels for {x.shape[0]} points")
    if isinstance(partition, Partition):
        if np.any(partition.sizes() == 0):
            raise DegeneratePartition("partition has an empty cluster")
        k = partition.k
    else:
        k = np.unique(labels).size
    n = x.shape[0]
    if k < 2:
        raise DegeneratePartition("Calinski-Harabasz needs at least two clusters")
    if n <= k:
        raise DegeneratePartition(f"Calinski-Harabasz needs N > k (N={n}, k={k})")
    bgss, wgss = dispersion(x, labels)
    if wgss == 0.0:
        return float("inf")
    return (bgss / (k - 1)) / (wgss / (n - k))


def gaussian_membership(points, partition, method: str = "") -> MembershipMatrix:
    """Posterior memberships under one Gaussian per cluster.

    Each cluster's mean and (n - 1) covariance come from its members, its
    prior weight is ``n_j / N``. A ridge of ``1e-6`` times the mean diagonal
    is added to every covariance so that small or flat clusters stay
    invertible.
    """
    x = _as_points(points)
    labels = _labels(partition)
    if labels.shape[0] != x.shape[0]:
        raise SizeMismatch(f"{labels.shape[0]} labels for {x.shape[0]} points")
    k = partition.k if isinstance(partition, Partition) else int(labels.max()) + 1
    n, d = x.shape
    global_scale = float(np.mean(np.var(x, axis=0))) if n > 1 else 1.0
    logp = np.empty((n, k))
    for j in range(k):
        members = x[labels == j]
        if members.shape[0] == 0:
            raise DegeneratePartition(f"cluster {j} is empty")
        if members.shape[0] >= 2:
            mean, cov = mean_and_covariance(members)
        else:
            mean, cov = members[0], np.zeros((d, d))
        scale = float(np.mean(np.diag(cov)))
        if scale <= 0.0:
            scale = global_scale if global_scale > 0 else 1.0
        cov = cov + 1e-6 * scale * np.eye(d)
        chol = np.linalg.cholesky(cov)
        sol = np.linalg.solve(chol, (x - mean).T)
        maha = np.sum(sol * sol, axis=0)
        logdet = 2.0 * np.sum(np.log(np.diag(chol)))
        logp[:, j] = np.log(members.shape[0] / n) - 0.5 * (d * np.log(2 * np.pi) + logdet + maha)
    post = np.exp(logp - logsumexp(logp, axis=1, keepdims=True))
    post /= post.sum(axis=1, keepdims=True)
    return MembershipMatrix(post, method)


def adjusted_rand_index(p1, p2) -> float:
    """Pair-counting adjusted Rand index from the contingency table."""
    a = _labels(p1)
    b = _labels(p2)
    if a.shape[0] != b.shape[0]:
        raise SizeMismatch(f"partitions cover {a.shape[0]} and {b.shape[0]} items")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)

    def pairs(v):
        v = np.asarray(v, dtype=np.float64)
        return float(np.sum(v * (v - 1) / 2))

    n = a.shape[0]
    sum_cells = pairs(table)
    sum_rows = pairs(table.sum(axis=1))
    sum_cols = pairs(table.sum(axis=0))
    total = n * (n - 1) / 2
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        # both partitions trivial in the same way (one cluster, or all singletons)
        return 1.0
    return (sum_cells - expected) / (max_index - expected)


@dataclass
class CoherenceReport:
    """Correlations between all membership columns of all methods."""

    names: list[str]
    matrix: np.ndarray
    matches: dict[tuple[str, str], list[tuple[str, str, float]]] = field(default_factory=dict)
    unmatched: list[str] = field(default_factory=list)

    @property
    def mean_matched(self) -> float:
        vals = [r for pairs in self.matches.values() for _, _, r in pairs]
        return float(np.mean(vals)) if vals else float("nan")

    def summary(self) -> str:
        lines = []
        for (ma, mb), pairs in self.matches.items():
            lines.append(f"{ma} vs {mb}:")
            for a, b, r in pairs:
                lines.append(f"  {a} <-> {b}  r = {r:.4f}")
        if self.unmatched:
            lines.append("unmatched: " + ", ".join(self.unmatched))
        lines.append(f"mean matched correlation: {self.mean_matched:.4f}")
        return "\n".join(lines) + "\n"


def _greedy_match(block: np.ndarray) -> list[tuple[int, int]]:
    order = np.argsort(-block, axis=None, kind="stable")
    used_r, used_c, out = set(), set(), []
    for flat in order:
        r, c = divmod(int(flat), block.shape[1])
        if r in used_r or c in used_c:
            continue
        used_r.add(r)
        used_c.add(c)
        out.append((r, c))
        if len(out) == min(block.shape):
            break
    return sorted(out)


def membership_correlation(matrices: list[MembershipMatrix]) -> CoherenceReport:
    """Pearson correlation matrix of every cluster-probability column.

    For each pair of methods, clusters are paired greedily by decreasing
    correlation without reusing a cluster; clusters left over because the
    methods have different ``k`` are listed in ``unmatched``.
    """
    if not matrices:
        raise ValueError("need at least one membership matrix")
    n = matrices[0].n
    tags, names, cols, owner = [], [], [], []
    for idx, m in enumerate(matrices):
        if m.n != n:
            raise SizeMismatch(f"membership matrices cover {n} and {m.n} subjects")
        tag = m.method or f"m{idx}"
        while tag in tags:
            tag = f"{tag}#{idx}"
        tags.append(tag)
        for j, lab in enumerate(m.cluster_labels):
            col = m.probs[:, j]
            if np.ptp(col) == 0.0:
                raise ConstantColumn(f"{tag}.{lab} is constant; correlation undefined")
            names.append(f"{tag}.{lab}")
            cols.append(col)
            owner.append(idx)
    data = np.array(cols)
    corr = np.clip(np.corrcoef(data), -1.0, 1.0)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)

    owner = np.array(owner)
    matches, left_over = {}, set()
    for a in range(len(matrices)):
        for b in range(a + 1, len(matrices)):
            ra = np.flatnonzero(owner == a)
            rb = np.flatnonzero(owner == b)
            pairs, hit = [], set()
            for i, j in _greedy_match(corr[np.ix_(ra, rb)]):
                pairs.append((names[ra[i]], names[rb[j]], float(corr[ra[i], rb[j]])))
                hit.update((ra[i], rb[j]))
            left_over.update((set(ra) | set(rb)) - hit)
            matches[(tags[a], tags[b])] = pairs
    unmatched = [names[i] for i in sorted(left_over)]
    return CoherenceReport(names, corr, matches, unmatched)
