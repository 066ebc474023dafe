"""Small numerical kernels: activations, seeded random streams, basic statistics
and a Jacobi eigensolver for the tiny symmetric matrices we deal with."""

from __future__ import annotations

import numpy as np

from .errors import ConstantVector, DegenerateCovariance, LengthMismatch, TooFewPoints


def logistic(x):
    """Numerically safe logistic function, elementwise on arrays or scalars.

    Uses the ``exp(x) / (1 + exp(x))`` branch for negative inputs so that
    large-magnitude arguments saturate instead of overflowing.
    """
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


class RngStream:
    """Seeded random stream backed by numpy's PCG64 generator.

    Child streams are derived deterministically from ``(seed, index)`` through
    ``numpy.random.SeedSequence``, so independent tasks (restarts, workers)
    draw from non-overlapping streams and a serial run matches a parallel one.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def child(self, index: int) -> "RngStream":
        child_seed = np.random.SeedSequence([self.seed, int(index)]).generate_state(1, np.uint64)[0]
        return RngStream(int(child_seed))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def choice(self, n, size, replace=False):
        return self._gen.choice(n, size=size, replace=replace)


def pearson_correlation(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape or a.size < 2:
        raise LengthMismatch(f"need two vectors of equal length >= 2, got {a.size} and {b.size}")
    da = a - a.mean()
    db = b - b.mean()
    sa = np.sqrt(np.dot(da, da))
    sb = np.sqrt(np.dot(db, db))
    if sa == 0.0 or sb == 0.0:
        raise ConstantVector("correlation undefined for a zero-variance vector")
    r = np.dot(da, db) / (sa * sb)
    return float(min(1.0, max(-1.0, r)))


def mean_and_covariance(points):
    """Sample mean and unbiased (n - 1) covariance of an ``(n, d)`` array."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if n < 2:
        raise TooFewPoints(f"covariance needs at least 2 points, got {n}")
    mean = x.mean(axis=0)
    dx = x - mean
    cov = dx.T @ dx / (n - 1)
    cov = 0.5 * (cov + cov.T)
    return mean, cov


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` sorted by descending eigenvalue;
    eigenvectors are the columns of the second array.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def top_principal_directions(points, m: int):
    """Unit eigenvectors of the sample covariance for the ``m`` largest eigenvalues."""
    _, cov = mean_and_covariance(points)
    d = cov.shape[0]
    if m > d:
        raise DegenerateCovariance(f"asked for {m} directions in {d} dimensions")
    w, v = jacobi_eigh(cov)
    floor = 1e-12 * max(abs(w[0]), 1e-300)
    if m > 0 and w[m - 1] <= floor:
        raise DegenerateCovariance(f"covariance rank is below {m}")
    out = v[:, :m]
    return out / np.linalg.norm(out, axis=0)


def principal_angles(a, b):
    """Principal angles (radians, ascending) between the column spaces of two matrices."""
    qa, _ = np.linalg.qr(np.asarray(a, dtype=np.float64))
    qb, _ = np.linalg.qr(np.asarray(b, dtype=np.float64))
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.sort(np.arccos(np.clip(s, -1.0, 1.0)))
