"""Recurrent undercomplete autoencoder for fixed-length trajectories.

An LSTM reads the sequence, its last hidden state goes through a linear
bottleneck to a ``d``-dimensional embedding, an MLP expands the embedding and
a linear head regresses every value of the sequence back. Gradients are
computed analytically (backpropagation through time), vectorized over the
batch with numpy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core_math import RngStream, logistic
from .errors import EmptyBatch, LengthMismatch, ShapeMismatch

GATES = ("f", "i", "o", "c")
ACTIVATIONS = ("tanh", "identity")


class LstmState(NamedTuple):
    h: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class LstmParams:
    W_f: np.ndarray
    U_f: np.ndarray
    b_f: np.ndarray
    W_i: np.ndarray
    U_i: np.ndarray
    b_i: np.ndarray
    W_o: np.ndarray
    U_o: np.ndarray
    b_o: np.ndarray
    W_c: np.ndarray
    U_c: np.ndarray
    b_c: np.ndarray

    @property
    def hidden_size(self) -> int:
        return self.b_f.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_f.shape[1]

    def check(self):
        h, n_in = self.hidden_size, self.input_size
        for g in GATES:
            shapes = (getattr(self, f"W_{g}").shape, getattr(self, f"U_{g}").shape, getattr(self, f"b_{g}").shape)
            if shapes != ((h, n_in), (h, h), (h,)):
                raise ShapeMismatch(f"gate {g!r} has shapes {shapes}, expected {((h, n_in), (h, h), (h,))}")


def _decoder_names(n_layers: int) -> list[tuple[str, str]]:
    return [(f"W_d{k}", f"b_d{k}") for k in range(n_layers)]


def param_names(n_decoder_layers: int) -> list[str]:
    """Canonical parameter order; used for serialization and gradient sets."""
    names = []
    for g in GATES:
        names += [f"W_{g}", f"U_{g}", f"b_{g}"]
    names += ["W_z", "b_z"]
    for w, b in _decoder_names(n_decoder_layers):
        names += [w, b]
    names += ["W_out", "b_out"]
    return names


@dataclass
class AutoencoderModel:
    """All parameters of the network plus the architecture metadata.

    ``params`` maps canonical names (see :func:`param_names`) to float64
    arrays. ``norm_mean`` and ``norm_sd`` hold the scalar z-score statistics
    of the data the model was trained on (identity when not normalized).
    """

    input_size: int
    hidden_size: int
    embed_dim: int
    seq_len: int
    decoder_widths: tuple[int, ...]
    decoder_activation: str
    params: dict[str, np.ndarray]
    norm_mean: float = 0.0
    norm_sd: float = 1.0

    def __post_init__(self):
        self.decoder_widths = tuple(int(w) for w in self.decoder_widths)
        if self.decoder_activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.decoder_activation!r}")
        if self.embed_dim >= self.seq_len * self.input_size:
            raise ShapeMismatch("bottleneck must be smaller than the sequence (undercomplete)")
        expected = self.param_shapes()
        if list(self.params) != list(expected):
            raise ShapeMismatch(f"parameter names {list(self.params)} != {list(expected)}")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeMismatch(f"{name} has shape {self.params[name].shape}, expected {shape}")

    @property
    def output_size(self) -> int:
        return self.seq_len * self.input_size

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        h, n_in, d = self.hidden_size, self.input_size, self.embed_dim
        shapes: dict[str, tuple[int, ...]] = {}
        for g in GATES:
            shapes[f"W_{g}"] = (h, n_in)
            shapes[f"U_{g}"] = (h, h)
            shapes[f"b_{g}"] = (h,)
        shapes["W_z"] = (d, h)
        shapes["b_z"] = (d,)
        prev = d
        for (w, b), width in zip(_decoder_names(len(self.decoder_widths)), self.decoder_widths):
            shapes[w] = (width, prev)
            shapes[b] = (width,)
            prev = width
        shapes["W_out"] = (self.output_size, prev)
        shapes["b_out"] = (self.output_size,)
        return shapes

    @property
    def lstm(self) -> LstmParams:
        return LstmParams(**{k: self.params[k] for k in LstmParams.__dataclass_fields__})

    def with_params(self, params: dict[str, np.ndarray]) -> "AutoencoderModel":
        return AutoencoderModel(
            self.input_size, self.hidden_size, self.embed_dim, self.seq_len,
            self.decoder_widths, self.decoder_activation,
            {k: params[k] for k in self.params}, self.norm_mean, self.norm_sd,
        )

    def normalize(self, values):
        return (np.asarray(values, dtype=np.float64) - self.norm_mean) / self.norm_sd

    def denormalize(self, values):
        return np.asarray(values, dtype=np.float64) * self.norm_sd + self.norm_mean

    def decoder_linear_map(self) -> np.ndarray:
        """Product of the decoder weight matrices, valid for identity activations.

        Its column space is the affine reconstruction subspace of the model.
        """
        m = np.eye(self.embed_dim)
        for w, _ in _decoder_names(len(self.decoder_widths)):
            m = self.params[w] @ m
        return self.params["W_out"] @ m


def init_model(
    seq_len: int,
    input_size: int = 1,
    hidden_size: int = 32,
    embed_dim: int = 2,
    decoder_widths=(32, 32),
    decoder_activation: str = "tanh",
    rng: RngStream | int = 0,
) -> AutoencoderModel:
    """Random model with weights uniform in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``."""
    if not isinstance(rng, RngStream):
        rng = RngStream(rng)
    skeleton = AutoencoderModel.__new__(AutoencoderModel)
    skeleton.input_size, skeleton.hidden_size = input_size, hidden_size
    skeleton.embed_dim, skeleton.seq_len = embed_dim, seq_len
    skeleton.decoder_widths = tuple(decoder_widths)
    params = {}
    for name, shape in skeleton.param_shapes().items():
        if name.startswith(("U_", "W_", "b_")) and name[2] in GATES and len(name) == 3:
            fan_in = input_size + hidden_size
        elif name.startswith("W_"):
            fan_in = shape[1]
        else:
            fan_in = params["W" + name[1:]].shape[1]
        s = 1.0 / np.sqrt(fan_in)
        params[name] = rng.uniform(-s, s, size=shape)
    return AutoencoderModel(input_size, hidden_size, embed_dim, seq_len,
                            tuple(decoder_widths), decoder_activation, params)


def zero_model(seq_len: int, input_size: int = 1, hidden_size: int = 1, embed_dim: int = 1,
               decoder_widths=(), decoder_activation: str = "tanh") -> AutoencoderModel:
    skeleton = AutoencoderModel.__new__(AutoencoderModel)
    skeleton.input_size, skeleton.hidden_size = input_size, hidden_size
    skeleton.embed_dim, skeleton.seq_len = embed_dim, seq_len
    skeleton.decoder_widths = tuple(decoder_widths)
    params = {k: np.zeros(s) for k, s in skeleton.param_shapes().items()}
    return AutoencoderModel(input_size, hidden_size, embed_dim, seq_len,
                            tuple(decoder_widths), decoder_activation, params)


# ---------------------------------------------------------------- forward

def lstm_step(params: LstmParams, x_t, state: LstmState) -> LstmState:
    """One LSTM cell update. Works on single vectors or on ``(batch, ·)`` rows."""
    params.check()
    x_t = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(state.h, dtype=np.float64)
    c_prev = np.asarray(state.c, dtype=np.float64)
    if x_t.shape[-1] != params.input_size or h_prev.shape[-1] != params.hidden_size \
            or c_prev.shape != h_prev.shape:
        raise ShapeMismatch(f"x {x_t.shape}, h {h_prev.shape}, c {c_prev.shape} do not fit the cell")
    f = logistic(x_t @ params.W_f.T + h_prev @ params.U_f.T + params.b_f)
    i = logistic(x_t @ params.W_i.T + h_prev @ params.U_i.T + params.b_i)
    o = logistic(x_t @ params.W_o.T + h_prev @ params.U_o.T + params.b_o)
    g = np.tanh(x_t @ params.W_c.T + h_prev @ params.U_c.T + params.b_c)
    c = f * c_prev + i * g
    return LstmState(o * np.tanh(c), c)


def _as_batch(model: AutoencoderModel, batch, dtype=np.float64) -> np.ndarray:
    x = np.asarray(batch, dtype=dtype)
    if x.ndim == 2 and model.input_size == 1:
        x = x[:, :, None]
    elif x.ndim == 2 and model.seq_len == 1:
        x = x[:, None, :]
    if x.ndim != 3:
        raise ShapeMismatch(f"batch must be (n, T) or (n, T, input), got {x.shape}")
    if x.shape[0] == 0:
        raise EmptyBatch("empty batch")
    if x.shape[1] != model.seq_len:
        raise LengthMismatch(f"sequence length {x.shape[1]} != model length {model.seq_len}")
    if x.shape[2] != model.input_size:
        raise ShapeMismatch(f"input size {x.shape[2]} != model input size {model.input_size}")
    return x


def _encode_batch(model: AutoencoderModel, x: np.ndarray, cache: list | None = None,
                  params: dict | None = None) -> np.ndarray:
    p = model.params if params is None else params
    n = x.shape[0]
    h = np.zeros((n, model.hidden_size), dtype=x.dtype)
    c = np.zeros((n, model.hidden_size), dtype=x.dtype)
    for t in range(model.seq_len):
        xt = x[:, t, :]
        f = logistic(xt @ p["W_f"].T + h @ p["U_f"].T + p["b_f"])
        i = logistic(xt @ p["W_i"].T + h @ p["U_i"].T + p["b_i"])
        o = logistic(xt @ p["W_o"].T + h @ p["U_o"].T + p["b_o"])
        g = np.tanh(xt @ p["W_c"].T + h @ p["U_c"].T + p["b_c"])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        if cache is not None:
            cache.append((xt, h, c, f, i, o, g, tc))
        h, c = h_new, c_new
    if cache is not None:
        cache.append(h)
    return h @ p["W_z"].T + p["b_z"]


def _act(name, a):
    return np.tanh(a) if name == "tanh" else a


def _decode_batch(model: AutoencoderModel, z: np.ndarray, cache: list | None = None,
                  params: dict | None = None) -> np.ndarray:
    p = model.params if params is None else params
    out = z
    for w, b in _decoder_names(len(model.decoder_widths)):
        nxt = _act(model.decoder_activation, out @ p[w].T + p[b])
        if cache is not None:
            cache.append((out, nxt))
        out = nxt
    if cache is not None:
        cache.append(out)
    return out @ p["W_out"].T + p["b_out"]


def encode_batch(model: AutoencoderModel, batch) -> np.ndarray:
    return _encode_batch(model, _as_batch(model, batch))


def encode(model: AutoencoderModel, sequence) -> np.ndarray:
    """Embedding of one sequence (``T`` scalars or ``T`` input vectors)."""
    seq = np.asarray(sequence, dtype=np.float64)
    return encode_batch(model, seq[None, ...])[0]


def decode_batch(model: AutoencoderModel, embeddings) -> np.ndarray:
    z = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    if z.shape[1] != model.embed_dim:
        raise ShapeMismatch(f"embedding has {z.shape[1]} components, model expects {model.embed_dim}")
    return _decode_batch(model, z)


def decode(model: AutoencoderModel, embedding) -> np.ndarray:
    """Reconstruction of length ``T * input_size`` from one embedding."""
    emb = np.asarray(embedding, dtype=np.float64)
    if emb.shape != (model.embed_dim,):
        raise ShapeMismatch(f"embedding has shape {emb.shape}, model expects ({model.embed_dim},)")
    return decode_batch(model, emb)[0]


def reconstruction_loss(model: AutoencoderModel, batch) -> float:
    x = _as_batch(model, batch)
    y = _decode_batch(model, _encode_batch(model, x))
    r = y - x.reshape(x.shape[0], -1)
    return float(np.mean(r * r))


# ---------------------------------------------------------------- backward

def backward(model: AutoencoderModel, batch) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and exact gradient of the mean squared reconstruction error."""
    x = _as_batch(model, batch)
    p = model.params
    n = x.shape[0]
    enc_cache: list = []
    dec_cache: list = []
    z = _encode_batch(model, x, enc_cache)
    y = _decode_batch(model, z, dec_cache)
    r = y - x.reshape(n, -1)
    loss = float(np.mean(r * r))

    grads = {k: np.zeros_like(v) for k, v in p.items()}
    dy = 2.0 * r / r.size

    top = dec_cache[-1]
    grads["W_out"] = dy.T @ top
    grads["b_out"] = dy.sum(axis=0)
    dout = dy @ p["W_out"]
    for (w, b), (inp, act) in reversed(list(zip(_decoder_names(len(model.decoder_widths)), dec_cache[:-1]))):
        da = dout * (1.0 - act * act) if model.decoder_activation == "tanh" else dout
        grads[w] = da.T @ inp
        grads[b] = da.sum(axis=0)
        dout = da @ p[w]
    dz = dout

    h_last = enc_cache[-1]
    grads["W_z"] = dz.T @ h_last
    grads["b_z"] = dz.sum(axis=0)
    dh = dz @ p["W_z"]
    dc = np.zeros_like(dh)
    for xt, h_prev, c_prev, f, i, o, g, tc in reversed(enc_cache[:-1]):
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        pre = {
            "f": dc * c_prev * f * (1.0 - f),
            "i": dc * g * i * (1.0 - i),
            "o": do * o * (1.0 - o),
            "c": dc * i * (1.0 - g * g),
        }
        dh = np.zeros_like(dh)
        for gate, da in pre.items():
            grads[f"W_{gate}"] += da.T @ xt
            grads[f"U_{gate}"] += da.T @ h_prev
            grads[f"b_{gate}"] += da.sum(axis=0)
            dh += da @ p[f"U_{gate}"]
        dc = dc * f
    return loss, grads


def _extended_loss(model: AutoencoderModel, x: np.ndarray, params: dict) -> np.longdouble:
    y = _decode_batch(model, _encode_batch(model, x, params=params), params=params)
    r = y - x.reshape(x.shape[0], -1)
    return np.mean(r * r)


def gradient_check(model: AutoencoderModel, batch, epsilon: float = 1e-5,
                   grad_fn: Callable | None = None) -> float:
    """Worst relative error between analytic and central-difference partials.

    The finite differences are evaluated in ``np.longdouble`` (80-bit on
    x86-64) so their rounding noise stays well below the partials of order
    1e-7 that deep recurrent paths produce. ``grad_fn`` defaults to
    :func:`backward`; passing a different function lets tests verify that
    the check notices a broken gradient.
    """
    if not 0.0 < epsilon <= 1e-3:
        raise ValueError("epsilon must lie in (0, 1e-3]")
    grad_fn = grad_fn or backward
    _, grads = grad_fn(model, batch)
    x = _as_batch(model, batch, dtype=np.longdouble)
    params = {k: v.astype(np.longdouble) for k, v in model.params.items()}
    eps = np.longdouble(epsilon)
    worst = 0.0
    for name, value in params.items():
        flat = value.reshape(-1)
        g = grads[name].ravel()
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            lp = _extended_loss(model, x, params)
            flat[j] = orig - eps
            lm = _extended_loss(model, x, params)
            flat[j] = orig
            num = float((lp - lm) / (2 * eps))
            err = abs(g[j] - num) / max(abs(g[j]), abs(num), 1e-12)
            worst = max(worst, err)
    return worst


# ---------------------------------------------------------------- persistence

def save_model(model: AutoencoderModel, path) -> None:
    """Write the model as an ``.npz`` archive; arrays keep their exact bits."""
    meta = {
        "format": "deeptraj-autoencoder/1",
        "input_size": model.input_size,
        "hidden_size": model.hidden_size,
        "embed_dim": model.embed_dim,
        "seq_len": model.seq_len,
        "decoder_widths": list(model.decoder_widths),
        "decoder_activation": model.decoder_activation,
        "param_order": list(model.params),
    }
    arrays = {f"param:{k}": v for k, v in model.params.items()}
    arrays["norm"] = np.array([model.norm_mean, model.norm_sd], dtype=np.float64)
    arrays["meta"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path) -> AutoencoderModel:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        params = {k: data[f"param:{k}"].copy() for k in meta["param_order"]}
        mean, sd = (float(v) for v in data["norm"])
    return AutoencoderModel(meta["input_size"], meta["hidden_size"], meta["embed_dim"], meta["seq_len"],
                            tuple(meta["decoder_widths"]), meta["decoder_activation"], params, mean, sd)
