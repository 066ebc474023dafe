"""Clustering of longitudinal data through a recurrent autoencoder embedding,
with longitudinal K-means and a group-based trajectory mixture as baselines."""

from .autoencoder import (AutoencoderModel, LstmParams, LstmState, backward, decode, encode,
                          gradient_check, init_model, load_model, lstm_step, reconstruction_loss,
                          save_model)
from .baselines import (GbtmModel, agglomerative_fit, gbtm_fit, kmeans_fit, kml_fit, kml_select,
                        traj_distance)
from .core_math import (RngStream, logistic, mean_and_covariance, pearson_correlation,
                        top_principal_directions)
from .evaluation import (CoherenceReport, adjusted_rand_index, calinski_harabasz, gaussian_membership,
                         membership_correlation)
from .io import TrajectoryDataset, load_trajectories, save_trajectories
from .optimizer import ArchConfig, OptimizerState, TrainConfig, rmsprop_step, train
from .partition import MembershipMatrix, Partition
from .simulation import SimulationConfig, simulate_qol

__version__ = "0.1.0"

__all__ = [
    "AutoencoderModel", "LstmParams", "LstmState", "backward", "decode", "encode", "gradient_check",
    "init_model", "load_model", "lstm_step", "reconstruction_loss", "save_model",
    "GbtmModel", "agglomerative_fit", "gbtm_fit", "kmeans_fit", "kml_fit", "kml_select", "traj_distance",
    "RngStream", "logistic", "mean_and_covariance", "pearson_correlation", "top_principal_directions",
    "CoherenceReport", "adjusted_rand_index", "calinski_harabasz", "gaussian_membership",
    "membership_correlation",
    "TrajectoryDataset", "load_trajectories", "save_trajectories",
    "ArchConfig", "OptimizerState", "TrainConfig", "rmsprop_step", "train",
    "MembershipMatrix", "Partition", "SimulationConfig", "simulate_qol",
]
