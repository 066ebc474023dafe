"""Classical clustering baselines.

* longitudinal K-means (kml style) with L1, L2, DTW or discrete Fréchet
  assignment and pointwise-mean centers,
* Euclidean K-means for embeddings,
* agglomerative clustering (single, complete or average linkage),
* a group-based trajectory model: an EM-fitted mixture of polynomial
  trajectories with Gaussian noise, standing in for SAS ``proc traj``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import cut_tree, linkage as scipy_linkage
from scipy.special import logsumexp

from .core_math import RngStream
from .errors import (DegenerateCluster, DegeneratePartition, EmptyDataset, EmptyInput,
                     EmptyTrajectory, KTooLarge, LengthMismatch, SingularDesign)
from .evaluation import calinski_harabasz
from .io import TrajectoryDataset
from .partition import MembershipMatrix, Partition

log = logging.getLogger(__name__)

METRICS = ("L1", "L2", "DTW", "Frechet")
LINKAGES = ("single", "complete", "average")


# ---------------------------------------------------------------- distances

def _elastic(a: np.ndarray, b: np.ndarray, frechet: bool) -> np.ndarray:
    """DTW or discrete Fréchet between every row of ``a`` and every row of ``b``.

    The dynamic programme runs cell by cell over the two time axes while
    each cell is updated for all ``len(a) * len(b)`` pairs at once.
    """
    n, m = a.shape[1], b.shape[1]
    cost = np.abs(a[:, None, :, None] - b[None, :, None, :])  # (na, nb, n, m)
    acc = np.empty_like(cost)
    combine = np.maximum if frechet else np.add
    for i in range(n):
        for j in range(m):
            c = cost[:, :, i, j]
            if i == 0 and j == 0:
                acc[:, :, 0, 0] = c
                continue
            prev = []
            if i > 0:
                prev.append(acc[:, :, i - 1, j])
            if j > 0:
                prev.append(acc[:, :, i, j - 1])
            if i > 0 and j > 0:
                prev.append(acc[:, :, i - 1, j - 1])
            acc[:, :, i, j] = combine(c, np.minimum.reduce(prev))
    return acc[:, :, n - 1, m - 1]


def pairwise_distances(a, b, metric: str = "L2") -> np.ndarray:
    """``(len(a), len(b))`` matrix of trajectory distances."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] == 0 or b.shape[1] == 0:
        raise EmptyTrajectory("trajectories must have at least one time point")
    if metric in ("L1", "L2"):
        if a.shape[1] != b.shape[1]:
            raise LengthMismatch(f"{metric} needs equal lengths, got {a.shape[1]} and {b.shape[1]}")
        diff = a[:, None, :] - b[None, :, :]
        if metric == "L1":
            return np.abs(diff).sum(axis=2)
        return np.sqrt((diff * diff).sum(axis=2))
    if metric == "DTW":
        return _elastic(a, b, frechet=False)
    if metric == "Frechet":
        return _elastic(a, b, frechet=True)
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


def traj_distance(a, b, metric: str = "L2") -> float:
    """Distance between two scalar trajectories.

    DTW uses ``|a_i - b_j|`` as step cost with the three standard moves;
    Fréchet is the discrete coupling distance. Both accept unequal lengths.
    """
    return float(pairwise_distances(np.ravel(a)[None, :], np.ravel(b)[None, :], metric)[0, 0])


# ---------------------------------------------------------------- k-means family

def _sse(x, assign, centers) -> float:
    return float(np.sum((x - centers[assign]) ** 2))


def lloyd(x: np.ndarray, centers: np.ndarray, metric: str = "L2", max_iter: int = 100):
    """Alternate nearest-center assignment and mean update from given centers.

    Returns ``(assignments, centers, sse_trace)``; ``sse_trace[i]`` is the
    within-cluster sum of squares after the i-th center update. An empty
    cluster is re-seeded on the point farthest from its current center.
    """
    centers = np.array(centers, dtype=np.float64)
    k = centers.shape[0]
    assign = None
    trace = []
    for _ in range(max_iter):
        dist = pairwise_distances(x, centers, metric)
        new = np.argmin(dist, axis=1)  # lowest index wins ties
        for j in range(k):
            if not np.any(new == j):
                own = dist[np.arange(len(x)), new]
                counts = np.bincount(new, minlength=k)
                own = np.where(counts[new] > 1, own, -np.inf)
                far = int(np.argmax(own))
                new[far] = j
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        centers = np.array([x[assign == j].mean(axis=0) for j in range(k)])
        trace.append(_sse(x, assign, centers))
    return assign, centers, trace


def _score(x, part: Partition) -> float:
    try:
        return calinski_harabasz(x, part)
    except DegeneratePartition:
        return -part.inertia


def _restarts(x: np.ndarray, k: int, metric: str, n_restarts: int, seed: int, max_iter: int) -> Partition:
    n = x.shape[0]
    if n == 0:
        raise EmptyInput("nothing to cluster")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of items ({n})")
    if k < 1 or n_restarts < 1:
        raise ValueError("k and n_restarts must be >= 1")
    root = RngStream(seed)
    best, best_score = None, -np.inf
    for r in range(n_restarts):
        idx = root.child(r).choice(n, size=k, replace=False)
        assign, centers, _ = lloyd(x, x[np.sort(idx)], metric, max_iter)
        part = Partition(assign, k, centers, _sse(x, assign, centers))
        score = _score(x, part)
        # strict improvement only, so ties go to the earliest restart
        if best is None or score > best_score:
            best, best_score = part, score
    return best


def kmeans_fit(points, k: int, n_restarts: int = 20, seed: int = 0, max_iter: int = 100) -> Partition:
    """Euclidean K-means; the restart with the highest Calinski-Harabasz wins."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.size == 0:
        raise EmptyInput("nothing to cluster")
    return _restarts(x, k, "L2", n_restarts, seed, max_iter)


def kml_fit(dataset, k: int, metric: str = "L2", n_restarts: int = 20, seed: int = 0,
            max_iter: int = 100) -> Partition:
    """Longitudinal K-means.

    Centers start on ``k`` distinct subjects' trajectories, assignment uses
    ``metric`` and centers are updated to the pointwise mean trajectory.
    Restarts are compared with the Calinski-Harabasz index on the
    trajectories seen as flat ``T``-vectors.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    x = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    if x.shape[0] == 0:
        raise EmptyDataset("empty dataset")
    return _restarts(x, k, metric, n_restarts, seed, max_iter)


def kml_select(dataset, ks=range(2, 10), metric: str = "L2", n_restarts: int = 20, seed: int = 0,
               max_iter: int = 100):
    """Fit kml for every ``k`` in ``ks``; return ``(best partition, {k: CH})``."""
    x = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    scores, parts = {}, {}
    for k in ks:
        part = kml_fit(x, k, metric, n_restarts, seed + 1000 * k, max_iter)
        parts[k] = part
        scores[k] = calinski_harabasz(x, part)
    best_k = max(scores, key=lambda k: (scores[k], -k))
    return parts[best_k], scores


# ---------------------------------------------------------------- hierarchical

def agglomerative_fit(points, k: int, linkage: str = "single") -> Partition:
    """Bottom-up merging under ``linkage`` until ``k`` clusters remain.

    Cluster indices are numbered in order of first appearance.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if n == 0:
        raise EmptyInput("nothing to cluster")
    if k > n or k < 1:
        raise KTooLarge(f"k={k} is not in [1, {n}]")
    if n == 1:
        raw = np.zeros(1, dtype=np.int64)
    else:
        raw = cut_tree(scipy_linkage(x, method=linkage), n_clusters=k).ravel()
    _, first = np.unique(raw, return_index=True)
    remap = {raw[i]: rank for rank, i in enumerate(np.sort(first))}
    assign = np.array([remap[v] for v in raw])
    return Partition.from_labels(x, assign)


# ---------------------------------------------------------------- group-based trajectories

@dataclass
class GbtmModel:
    """Mixture of polynomial trajectory classes on the time grid ``0..1``."""

    k: int
    weights: np.ndarray
    coefs: np.ndarray  # (k, order + 1), lowest power first
    variances: np.ndarray
    n_times: int

    @property
    def order(self) -> int:
        return self.coefs.shape[1] - 1

    def design(self) -> np.ndarray:
        s = np.linspace(0.0, 1.0, self.n_times)
        return np.vander(s, self.order + 1, increasing=True)

    def mean_trajectories(self) -> np.ndarray:
        return self.coefs @ self.design().T


VARIANCE_FLOOR = 1e-6


def _m_step(y, resp, design):
    mass = resp.sum(axis=0)
    weights = mass / mass.sum()
    ybar = (resp.T @ y) / mass[:, None]
    coefs = np.linalg.solve(design.T @ design, design.T @ ybar.T).T
    means = coefs @ design.T
    sq = ((y[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    variances = np.maximum((resp * sq).sum(axis=0) / (mass * y.shape[1]), VARIANCE_FLOOR)
    return weights, coefs, variances, means


def _e_step(y, weights, variances, means):
    t = y.shape[1]
    sq = ((y[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    logp = np.log(weights) - 0.5 * t * np.log(2 * np.pi * variances) - sq / (2 * variances)
    norm = logsumexp(logp, axis=1, keepdims=True)
    resp = np.exp(logp - norm)
    resp /= resp.sum(axis=1, keepdims=True)
    return resp, float(norm.sum())


def _gbtm_once(y, k, design, rng: RngStream, max_iters, tol):
    n = y.shape[0]
    seeds = y[np.sort(rng.choice(n, size=k, replace=False))]
    nearest = np.argmin(((y[:, None, :] - seeds[None, :, :]) ** 2).sum(axis=2), axis=1)
    resp = np.eye(k)[nearest]
    history = []
    for _ in range(max_iters):
        if np.any(resp.sum(axis=0) < 1e-8):
            raise DegenerateCluster("a class lost all responsibility mass")
        weights, coefs, variances, means = _m_step(y, resp, design)
        resp, ll = _e_step(y, weights, variances, means)
        history.append(ll)
        if len(history) > 1 and history[-1] - history[-2] < tol:
            break
    if np.any(resp.sum(axis=0) < 1e-8):
        raise DegenerateCluster("a class lost all responsibility mass")
    return weights, coefs, variances, resp, history


def gbtm_fit(dataset, k: int, poly_order: int = 2, seed: int = 0, max_iters: int = 500,
             tol: float = 1e-8, max_attempts: int = 5, n_starts: int = 10):
    """EM fit of ``k`` polynomial trajectory classes with Gaussian noise.

    Returns ``(GbtmModel, MembershipMatrix, loglik history)``. Each start
    begins from a hard split around ``k`` randomly chosen subjects, and the
    start with the highest final log-likelihood wins. A start in which a
    class collapses is retried from a fresh random stream, up to
    ``max_attempts`` times.
    """
    y = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    n, t = y.shape
    if n == 0:
        raise EmptyDataset("empty dataset")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of subjects ({n})")
    if poly_order + 1 > t:
        raise SingularDesign(f"order {poly_order} polynomial needs at least {poly_order + 1} time points")
    s = np.linspace(0.0, 1.0, t) if t > 1 else np.zeros(1)
    design = np.vander(s, poly_order + 1, increasing=True)
    if np.linalg.matrix_rank(design) < poly_order + 1:
        raise SingularDesign("polynomial design matrix is rank deficient")
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    root = RngStream(seed)
    best = None
    for start in range(n_starts):
        stream = root.child(start)
        for attempt in range(max_attempts):
            try:
                fit = _gbtm_once(y, k, design, stream.child(attempt), max_iters, tol)
            except DegenerateCluster:
                log.debug("gbtm start %d attempt %d collapsed, retrying", start, attempt)
                continue
            break
        else:
            raise DegenerateCluster(f"every one of {max_attempts} EM attempts collapsed a class")
        # strict comparison: ties keep the earliest start
        if best is None or fit[4][-1] > best[4][-1]:
            best = fit
    weights, coefs, variances, resp, history = best
    model = GbtmModel(k, weights, coefs, variances, t)
    return model, MembershipMatrix(resp, "gbtm"), history


def kml_membership(dataset, partition: Partition) -> MembershipMatrix:
    """Gaussian posterior memberships of trajectories seen as flat vectors."""
    from .evaluation import gaussian_membership

    x = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    return gaussian_membership(x, partition, method="kml")
