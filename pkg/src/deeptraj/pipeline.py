"""End-to-end workflows built from the library pieces.

These are what the command line, the demo scripts and the acceptance tests
run, so the three always exercise the same code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autoencoder import AutoencoderModel, encode_batch
from .baselines import agglomerative_fit, gbtm_fit, kmeans_fit, kml_fit, kml_membership, kml_select
from .evaluation import (CoherenceReport, adjusted_rand_index, gaussian_membership,
                         membership_correlation)
from .io import TrajectoryDataset
from .optimizer import ArchConfig, TrainConfig, train
from .partition import MembershipMatrix, Partition
from .simulation import SimulationConfig, constant_levels, simulate_qol


def embed(model: AutoencoderModel, dataset) -> np.ndarray:
    """Embeddings of raw trajectories, using the model's own normalization."""
    values = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    return encode_batch(model, model.normalize(values))


def cluster_embedding(embedding, k: int, method: str = "agglomerative", linkage: str = "single",
                      restarts: int = 20, seed: int = 0) -> Partition:
    if method == "kmeans":
        return kmeans_fit(embedding, k, restarts, seed)
    if method == "agglomerative":
        return agglomerative_fit(embedding, k, linkage)
    raise ValueError(f"unknown clustering method {method!r}; choose kmeans or agglomerative")


@dataclass
class AutoencoderRun:
    model: AutoencoderModel
    history: list[float]
    embedding: np.ndarray
    partition: Partition

    def membership(self) -> MembershipMatrix:
        return gaussian_membership(self.embedding, self.partition, method="autoencoder")


def autoencoder_clustering(dataset, k: int, arch: ArchConfig | None = None, train_config: TrainConfig | None = None,
                           method: str = "agglomerative", linkage: str = "single", restarts: int = 20,
                           seed: int = 0) -> AutoencoderRun:
    """Train, embed and cluster the embedding in one call."""
    model, history = train(dataset, arch, train_config)
    z = embed(model, dataset)
    part = cluster_embedding(z, k, method, linkage, restarts, seed)
    return AutoencoderRun(model, history, z, part)


@dataclass
class SimulatedExperiment:
    dataset: TrajectoryDataset
    labels: np.ndarray
    autoencoder: AutoencoderRun
    ae_ari: float
    kml_partition: Partition
    kml_scores: dict[int, float]
    kml_ari: float


def simulated_experiment(seed: int = 0, sim: SimulationConfig | None = None, arch: ArchConfig | None = None,
                         train_config: TrainConfig | None = None, kml_ks=range(2, 10), kml_metric: str = "L2",
                         kml_restarts: int = 20, linkage: str = "single") -> SimulatedExperiment:
    """Autoencoder + single linkage against CH-selected kml on the sine/flat data."""
    sim = sim or SimulationConfig(seed=seed)
    train_config = train_config or TrainConfig(seed=seed)
    dataset, labels = simulate_qol(sim)
    run = autoencoder_clustering(dataset, 2, arch, train_config, "agglomerative", linkage, seed=seed)
    best, scores = kml_select(dataset, kml_ks, kml_metric, kml_restarts, seed)
    return SimulatedExperiment(dataset, labels, run, adjusted_rand_index(run.partition, labels),
                               best, scores, adjusted_rand_index(best, labels))


@dataclass
class CoherenceExperiment:
    dataset: TrajectoryDataset
    labels: np.ndarray
    memberships: list[MembershipMatrix]
    report: CoherenceReport


def coherence_experiment(seed: int = 0, k: int = 3, levels=(0.0, 10.0, 20.0), n_per_group: int = 50,
                         n_times: int = 10, noise_sd: float = 1.0, arch: ArchConfig | None = None,
                         train_config: TrainConfig | None = None, gbtm_order: int = 2) -> CoherenceExperiment:
    """Memberships from autoencoder + k-means, kml and the trajectory mixture, and their correlations."""
    dataset, labels = constant_levels(levels, n_per_group, n_times, noise_sd, seed)
    train_config = train_config or TrainConfig(seed=seed)
    run = autoencoder_clustering(dataset, k, arch, train_config, "kmeans", seed=seed)
    kml_part = kml_fit(dataset, k, "L2", 20, seed)
    _, gbtm_members, _ = gbtm_fit(dataset, k, gbtm_order, seed)
    members = [run.membership(), kml_membership(dataset, kml_part), gbtm_members]
    return CoherenceExperiment(dataset, labels, members, membership_correlation(members))
