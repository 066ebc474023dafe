"""Synthetic longitudinal datasets.

:func:`simulate_qol` generates the quality-of-life experiment: group A follows
a noisy sine with a subject-specific phase, group B stays flat. The other
generators build small controlled datasets for the baselines and coherence
checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_math import RngStream
from .errors import EmptyConfig
from .io import TrajectoryDataset


@dataclass(frozen=True)
class SimulationConfig:
    n_a: int = 100
    n_b: int = 100
    n_times: int = 20
    dt: float = 0.25
    amplitude: float = 5.0
    baseline: float = 10.0
    angular: float = np.pi / 2
    phase_range: float = 2.0
    noise_sd: float = 1.0
    noise: bool = True
    phase: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_a < 0 or self.n_b < 0:
            raise ValueError("group sizes must be >= 0")
        if self.n_times < 2:
            raise ValueError("need at least 2 time points")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


def simulate_qol(config: SimulationConfig | None = None) -> tuple[TrajectoryDataset, np.ndarray]:
    """Return the simulated dataset and its group labels (0 = A, 1 = B).

    Each group-A subject draws a single phase in radians, uniform on
    ``[-phase_range, phase_range)``, and keeps it for all its time points.
    Time points are ``t_j = j * dt``. Phases are drawn before noise, from
    separate child streams, so toggling one does not shift the other.
    """
    cfg = config or SimulationConfig()
    n = cfg.n_a + cfg.n_b
    if n < 1:
        raise EmptyConfig("simulation needs at least one subject")
    root = RngStream(cfg.seed)
    t = np.arange(cfg.n_times) * cfg.dt
    phases = root.child(0).uniform(-cfg.phase_range, cfg.phase_range, size=cfg.n_a)
    if not cfg.phase:
        phases = np.zeros(cfg.n_a)
    group_a = cfg.amplitude * np.sin(cfg.angular * t[None, :] + phases[:, None]) + cfg.baseline
    group_b = np.full((cfg.n_b, cfg.n_times), cfg.baseline)
    values = np.vstack([group_a, group_b])
    if cfg.noise:
        values = values + root.child(1).normal(0.0, cfg.noise_sd, size=values.shape)
    labels = np.repeat([0, 1], [cfg.n_a, cfg.n_b])
    return TrajectoryDataset(values, labels=labels), labels


def constant_levels(levels=(0.0, 10.0, 20.0), n_per_group: int = 50, n_times: int = 10,
                    noise_sd: float = 1.0, seed: int = 0) -> tuple[TrajectoryDataset, np.ndarray]:
    """Flat trajectories at a few levels plus white noise; labels index the level."""
    rng = RngStream(seed)
    labels = np.repeat(np.arange(len(levels)), n_per_group)
    values = np.asarray(levels, dtype=np.float64)[labels][:, None] + rng.normal(
        0.0, noise_sd, size=(labels.size, n_times))
    return TrajectoryDataset(values, labels=labels), labels


def linear_groups(slopes=(1.0, -1.0), n_per_group: int = 30, n_times: int = 8,
                  noise_sd: float = 0.1, seed: int = 0) -> tuple[TrajectoryDataset, np.ndarray]:
    """Straight lines ``slope * t`` on ``t = 0..T-1`` with Gaussian noise."""
    rng = RngStream(seed)
    labels = np.repeat(np.arange(len(slopes)), n_per_group)
    t = np.arange(n_times, dtype=np.float64)
    values = np.asarray(slopes)[labels][:, None] * t[None, :] + rng.normal(
        0.0, noise_sd, size=(labels.size, n_times))
    return TrajectoryDataset(values, labels=labels), labels


def half_moons(n_per_moon: int = 100, gap: float = 0.3, noise_sd: float = 0.0,
               seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Two interleaved unit half circles.

    Upper moon: ``(cos a, sin a)``. Lower moon: ``(1 - cos b, 1 - gap - sin b)``.
    The tip of each moon then sits ``gap`` away from the other arc; ``gap=0.5``
    is the usual scikit-learn layout.
    """
    rng = RngStream(seed)
    a = rng.uniform(0.0, np.pi, size=n_per_moon)
    b = rng.uniform(0.0, np.pi, size=n_per_moon)
    upper = np.column_stack([np.cos(a), np.sin(a)])
    lower = np.column_stack([1.0 - np.cos(b), 1.0 - gap - np.sin(b)])
    pts = np.vstack([upper, lower])
    if noise_sd:
        pts = pts + rng.normal(0.0, noise_sd, size=pts.shape)
    return pts, np.repeat([0, 1], n_per_moon)
