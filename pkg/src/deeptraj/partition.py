"""Result containers shared by the clustering and evaluation code."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePartition, SizeMismatch


@dataclass
class Partition:
    """Hard assignment of ``N`` items to ``k`` clusters.

    ``centers`` has one row per cluster: a point for point clustering, a
    mean trajectory for trajectory clustering. ``inertia`` is the
    within-cluster sum of squares when the producer computed it.
    """

    assignments: np.ndarray
    k: int
    centers: np.ndarray
    inertia: float | None = None

    def __post_init__(self):
        self.assignments = np.asarray(self.assignments, dtype=np.int64)
        self.centers = np.asarray(self.centers, dtype=np.float64)
        if self.k < 1:
            raise DegeneratePartition("a partition needs k >= 1")
        if self.assignments.size and (self.assignments.min() < 0 or self.assignments.max() >= self.k):
            raise DegeneratePartition(f"cluster indices must lie in [0, {self.k})")
        if self.centers.shape[0] != self.k:
            raise SizeMismatch(f"{self.centers.shape[0]} centers for k={self.k}")

    @property
    def n(self) -> int:
        return self.assignments.size

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    @classmethod
    def from_labels(cls, points, labels) -> "Partition":
        """Partition with centers set to cluster means; labels are compacted to 0..k-1."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        _, assign = np.unique(np.asarray(labels), return_inverse=True)
        k = int(assign.max()) + 1 if assign.size else 1
        centers = np.array([points[assign == j].mean(axis=0) for j in range(k)])
        inertia = float(sum(np.sum((points[assign == j] - centers[j]) ** 2) for j in range(k)))
        return cls(assign, k, centers, inertia)


@dataclass
class MembershipMatrix:
    """Posterior cluster probabilities, one row per subject."""

    probs: np.ndarray
    method: str = ""
    cluster_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 2:
            raise SizeMismatch("membership matrix must be N x k")
        if not self.cluster_labels:
            self.cluster_labels = [str(j) for j in range(self.probs.shape[1])]
        if len(self.cluster_labels) != self.probs.shape[1]:
            raise SizeMismatch("one label per membership column required")

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def k(self) -> int:
        return self.probs.shape[1]

    def hard(self) -> np.ndarray:
        return np.argmax(self.probs, axis=1)
