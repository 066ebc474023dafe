"""RMSProp training loop for the recurrent autoencoder."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .autoencoder import AutoencoderModel, backward, init_model
from .core_math import RngStream
from .errors import EmptyDataset, NonFiniteLoss, ShapeMismatch
from .io import TrajectoryDataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    rho: float = 0.9
    epsilon: float = 1e-8
    epochs: int = 500
    batch_size: int = 32  # 0 means full batch
    seed: int = 0
    deterministic: bool = True
    clip: bool = False
    clip_norm: float = 5.0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")


@dataclass(frozen=True)
class ArchConfig:
    hidden_size: int = 32
    embed_dim: int = 2
    decoder_widths: tuple[int, ...] = (32, 32)
    decoder_activation: str = "tanh"
    normalize: bool = True


@dataclass
class OptimizerState:
    """Running mean of squared gradients per parameter tensor."""

    accum: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def zeros_like(cls, params: dict[str, np.ndarray]) -> "OptimizerState":
        return cls({k: np.zeros_like(v) for k, v in params.items()}, 0)


def rmsprop_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
                 state: OptimizerState, config: TrainConfig):
    """Return ``(new_params, new_state)``; inputs are left untouched."""
    if set(params) != set(grads) or set(params) != set(state.accum):
        raise ShapeMismatch("params, grads and optimizer state must hold the same tensors")
    new_params, new_accum = {}, {}
    for name, p in params.items():
        g, v = grads[name], state.accum[name]
        if g.shape != p.shape or v.shape != p.shape:
            raise ShapeMismatch(f"{name}: param {p.shape}, grad {g.shape}, accumulator {v.shape}")
        v_new = config.rho * v + (1.0 - config.rho) * g * g
        new_params[name] = p - config.learning_rate * g / (np.sqrt(v_new) + config.epsilon)
        new_accum[name] = v_new
    return new_params, OptimizerState(new_accum, state.step + 1)


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm <= max_norm:
        return grads
    scale = max_norm / norm
    return {k: g * scale for k, g in grads.items()}


def train(dataset, arch: ArchConfig | None = None, config: TrainConfig | None = None,
          model: AutoencoderModel | None = None):
    """Fit an autoencoder; returns ``(model, per-epoch mean loss history)``.

    ``dataset`` is a :class:`TrajectoryDataset` or an array of shape
    ``(N, T)`` / ``(N, T, input_size)``. When ``arch.normalize`` is set the
    values are z-scored with one global mean/sd, which the model remembers.
    Passing ``model`` continues training from it instead of a fresh init.
    """
    arch = arch or ArchConfig()
    config = config or TrainConfig()
    values = dataset.values if isinstance(dataset, TrajectoryDataset) else np.asarray(dataset, dtype=np.float64)
    if values.shape[0] == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    mean, sd = 0.0, 1.0
    if arch.normalize:
        mean, sd = float(values.mean()), float(values.std()) or 1.0
    x = (values - mean) / sd
    input_size = 1 if x.ndim == 2 else x.shape[2]
    seq_len = x.shape[1]

    root = RngStream(config.seed)
    if model is None:
        model = init_model(seq_len, input_size, arch.hidden_size, arch.embed_dim,
                           arch.decoder_widths, arch.decoder_activation, rng=root.child(0))
    model.norm_mean, model.norm_sd = mean, sd
    shuffler = root.child(1)
    params = {k: v.copy() for k, v in model.params.items()}
    state = OptimizerState.zeros_like(params)
    n = x.shape[0]
    bs = n if config.batch_size in (0, None) or config.batch_size >= n else config.batch_size
    history = []
    for epoch in range(config.epochs):
        order = shuffler.permutation(n)
        total = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            loss, grads = backward(model.with_params(params), x[idx])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss} at epoch {epoch + 1}, step {state.step + 1}")
            if config.clip:
                grads = clip_gradients(grads, config.clip_norm)
            params, state = rmsprop_step(params, grads, state, config)
            total += loss * len(idx)
        history.append(total / n)
        if (epoch + 1) % 100 == 0:
            log.debug("epoch %d loss %.6g", epoch + 1, history[-1])
    trained = model.with_params(params)
    trained.norm_mean, trained.norm_sd = mean, sd
    return trained, history
