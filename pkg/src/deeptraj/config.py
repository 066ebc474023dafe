"""Flat ``key = value`` run configuration with dotted section keys.

Example::

    # quick run
    seed = 7
    train.epochs = 200
    arch.decoder_widths = 16,16

Blank lines and ``#`` comments are ignored. Unknown keys are errors: a typo
in a hyperparameter name must never silently fall back to a default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from .errors import ConfigError


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _intlist(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(v) for v in text.split(",") if v.strip()) if text else ()


def _strlist(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class Option:
    default: Any
    parse: Callable[[str], Any]
    help: str


OPTIONS: dict[str, Option] = {
    "seed": Option(0, int, "master seed; every random stream derives from it"),
    "out": Option("out", str, "output directory"),

    "io.data": Option("", str, "trajectory CSV to read"),
    "io.labels": Option("", str, "labels CSV (subject_id,group) for ARI"),
    "io.model": Option("", str, "autoencoder model file"),
    "io.embedding": Option("", str, "embedding CSV"),
    "io.partition": Option("", str, "partition CSV (subject_id,cluster)"),
    "io.memberships": Option((), _strlist, "comma-separated membership CSVs for coherence"),

    "sim.n_a": Option(100, int, "subjects in the sine group"),
    "sim.n_b": Option(100, int, "subjects in the flat group"),
    "sim.n_times": Option(20, int, "time points per subject"),
    "sim.dt": Option(0.25, float, "spacing of the time grid"),
    "sim.amplitude": Option(5.0, float, "sine amplitude"),
    "sim.baseline": Option(10.0, float, "baseline level"),
    "sim.angular": Option(math.pi / 2, float, "angular factor of the sine"),
    "sim.phase_range": Option(2.0, float, "phase drawn uniformly in [-r, r) radians"),
    "sim.noise_sd": Option(1.0, float, "Gaussian noise standard deviation"),
    "sim.noise": Option(True, _bool, "add measurement noise"),
    "sim.phase": Option(True, _bool, "draw a random phase per subject"),

    "arch.hidden_size": Option(32, int, "LSTM hidden units"),
    "arch.embed_dim": Option(2, int, "embedding dimension"),
    "arch.decoder_widths": Option((32, 32), _intlist, "decoder MLP widths"),
    "arch.decoder_activation": Option("tanh", str, "tanh or identity"),
    "arch.normalize": Option(True, _bool, "z-score the data before training"),

    "train.learning_rate": Option(1e-3, float, "RMSProp step size"),
    "train.rho": Option(0.9, float, "RMSProp decay"),
    "train.epsilon": Option(1e-8, float, "RMSProp denominator guard"),
    "train.epochs": Option(500, int, "training epochs"),
    "train.batch_size": Option(32, int, "mini-batch size, 0 for full batch"),
    "train.deterministic": Option(True, _bool, "fixed-order reductions"),
    "train.clip": Option(False, _bool, "clip the global gradient norm"),
    "train.clip_norm": Option(5.0, float, "clipping threshold"),

    "cluster.method": Option("agglomerative", str, "kmeans or agglomerative"),
    "cluster.k": Option(2, int, "number of clusters"),
    "cluster.linkage": Option("single", str, "single, complete or average"),
    "cluster.restarts": Option(20, int, "k-means restarts"),

    "kml.metric": Option("L2", str, "L1, L2, DTW or Frechet"),
    "kml.k": Option(0, int, "number of clusters; 0 selects k by Calinski-Harabasz"),
    "kml.k_min": Option(2, int, "smallest k in the sweep"),
    "kml.k_max": Option(9, int, "largest k in the sweep"),
    "kml.restarts": Option(20, int, "random restarts per k"),
    "kml.max_iter": Option(100, int, "iterations per restart"),

    "gbtm.k": Option(3, int, "number of trajectory classes"),
    "gbtm.order": Option(2, int, "polynomial order"),
    "gbtm.max_iter": Option(500, int, "EM iterations"),
    "gbtm.starts": Option(10, int, "EM starts; the highest final log-likelihood wins"),

    "evaluate.k_min": Option(2, int, "smallest k in the Calinski-Harabasz sweep"),
    "evaluate.k_max": Option(9, int, "largest k in the Calinski-Harabasz sweep"),

    "plot.kind": Option("trajectories", str, "trajectories, embedding_scatter, ch_bars or mean_curves"),
    "plot.input": Option("", str, "CSV to plot"),
    "plot.groups": Option("", str, "optional labels/partition CSV used for colours"),
    "plot.background": Option("", str, "optional trajectory CSV drawn under mean curves"),
}


class RunConfig:
    """Resolved configuration: defaults overlaid with file and command-line values."""

    def __init__(self, values: dict[str, Any] | None = None):
        self._values = {k: o.default for k, o in OPTIONS.items()}
        for key, value in (values or {}).items():
            self.set(key, value)

    def set(self, key: str, value: Any) -> None:
        if key not in OPTIONS:
            raise ConfigError(f"unknown configuration key {key!r}")
        if isinstance(value, str):
            try:
                value = OPTIONS[key].parse(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        self._values[key] = value

    def __getitem__(self, key: str) -> Any:
        return self._values[key]

    def section(self, prefix: str) -> dict[str, Any]:
        p = prefix + "."
        return {k[len(p):]: v for k, v in self._values.items() if k.startswith(p)}

    def items(self):
        return self._values.items()

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                cfg.set(key, value)
            except ConfigError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from None
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_text(fh.read(), str(path))

    def to_text(self, header: str = "") -> str:
        lines = [f"# {line}" for line in header.splitlines()]
        lines += [f"{k} = {_fmt(v)}" for k, v in self._values.items()]
        return "\n".join(lines) + "\n"
