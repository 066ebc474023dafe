"""
A linear autoencoder finds the principal subspace
=================================================

With identity decoder activations and a 2-D bottleneck, the reconstructions
live in a 2-D affine subspace. Trained on Gaussian data, that subspace lines
up with the top two principal components.
"""

import numpy as np

from deeptraj import ArchConfig, RngStream, TrainConfig, top_principal_directions, train
from deeptraj.core_math import principal_angles

rng = RngStream(0)
q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
x = rng.normal(size=(500, 5)) * np.sqrt([5.0, 3.0, 1.0, 0.5, 0.1]) @ q.T

# each sample is a length-1 sequence of a 5-D input vector
arch = ArchConfig(hidden_size=32, decoder_widths=(), decoder_activation="identity")
model, history = train(x[:, None, :], arch, TrainConfig(epochs=300, seed=0))
print(f"loss: {history[0]:.4f} -> {history[-1]:.4f}")

angles = np.degrees(principal_angles(model.decoder_linear_map(), top_principal_directions(x, 2)))
print("principal angles to the PCA plane (degrees):", np.round(angles, 3))
