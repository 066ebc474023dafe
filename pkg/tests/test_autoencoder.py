import math

import numpy as np
import pytest

from deeptraj.autoencoder import (LstmParams, LstmState, backward, decode, encode, encode_batch,
                                  gradient_check, init_model, load_model, lstm_step, reconstruction_loss,
                                  save_model, zero_model)
from deeptraj.core_math import RngStream
from deeptraj.errors import EmptyBatch, LengthMismatch, ShapeMismatch


def scalar_cell(**overrides):
    p = {f"{k}_{g}": np.zeros((1, 1)) if k != "b" else np.zeros(1) for k in "WUb" for g in "fioc"}
    for key, value in overrides.items():
        p[key] = np.full_like(p[key], value)
    return LstmParams(**p)


def sig(x):
    return 1.0 / (1.0 + math.exp(-x))


def scalar_lstm_trace(p, xs):
    """Plain-float LSTM used as an independent oracle."""
    h = c = 0.0
    g = {k: float(np.ravel(v)[0]) for k, v in p.items()}
    for x in xs:
        f = sig(g["W_f"] * x + g["U_f"] * h + g["b_f"])
        i = sig(g["W_i"] * x + g["U_i"] * h + g["b_i"])
        o = sig(g["W_o"] * x + g["U_o"] * h + g["b_o"])
        cand = math.tanh(g["W_c"] * x + g["U_c"] * h + g["b_c"])
        c = f * c + i * cand
        h = o * math.tanh(c)
    return h, c


def test_lstm_step_zero_params():
    s = lstm_step(scalar_cell(), np.array([3.7]), LstmState(np.zeros(1), np.zeros(1)))
    assert s.h[0] == 0.0 and s.c[0] == 0.0


def test_lstm_step_zero_params_carry():
    s = lstm_step(scalar_cell(), np.array([0.0]), LstmState(np.zeros(1), np.array([2.0])))
    assert s.c[0] == pytest.approx(1.0, abs=1e-15)
    assert s.h[0] == pytest.approx(0.5 * math.tanh(1.0), abs=1e-15)
    assert s.h[0] == pytest.approx(0.3808, abs=1e-4)


def test_lstm_step_saturated_gates():
    p = scalar_cell(b_i=50.0, b_f=-50.0, b_o=50.0, W_c=1.0)
    s = lstm_step(p, np.array([0.5]), LstmState(np.zeros(1), np.array([7.0])))
    assert s.c[0] == pytest.approx(math.tanh(0.5), abs=1e-12)
    assert s.h[0] == pytest.approx(math.tanh(math.tanh(0.5)), abs=1e-12)
    assert s.h[0] == pytest.approx(0.4318, abs=1e-4)


def test_lstm_step_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        lstm_step(scalar_cell(), np.zeros(2), LstmState(np.zeros(1), np.zeros(1)))


def test_hidden_output_bounded():
    m = init_model(12, 1, 6, 2, (4,), rng=2)
    for k in m.params:
        m.params[k] *= 20.0
    x = RngStream(0).normal(0, 10, size=(5, 12, 1))
    state = LstmState(np.zeros((5, 6)), np.zeros((5, 6)))
    for t in range(12):
        state = lstm_step(m.lstm, x[:, t, :], state)
        assert np.all(np.abs(state.h) < 1) and np.all(np.isfinite(state.c))


def test_encode_zero_model_gives_bottleneck_bias():
    m = zero_model(4, embed_dim=2, hidden_size=3)
    m.params["b_z"][:] = [0.25, -1.5]
    assert np.array_equal(encode(m, [1.0, 2.0, 3.0, 4.0]), [0.25, -1.5])


def test_encode_shape_contract():
    m = init_model(6, 1, 5, 2, (8,), rng=1)
    z = encode(m, np.linspace(0, 1, 6))
    assert z.shape == (2,) and np.all(np.isfinite(z))
    with pytest.raises(LengthMismatch):
        encode(m, np.zeros(5))


def test_encode_matches_scalar_trace():
    m = zero_model(2, hidden_size=1, embed_dim=1)
    vals = dict(W_f=0.3, U_f=-0.2, b_f=0.1, W_i=0.7, U_i=0.4, b_i=-0.3,
                W_o=-0.5, U_o=0.6, b_o=0.2, W_c=1.1, U_c=-0.8, b_c=0.05)
    for k, v in vals.items():
        m.params[k][...] = v
    m.params["W_z"][...] = 2.0
    m.params["b_z"][...] = -0.5
    xs = [0.9, -0.4]
    h, _ = scalar_lstm_trace(vals, xs)
    assert encode(m, xs)[0] == pytest.approx(2.0 * h - 0.5, abs=1e-14)


def test_decode_zero_model_is_output_bias():
    m = zero_model(3, embed_dim=1, decoder_widths=(4,))
    m.params["b_out"][:] = [1.0, 2.0, 3.0]
    assert np.array_equal(decode(m, [0.7]), [1.0, 2.0, 3.0])


def test_decode_hand_trace():
    m = zero_model(2, embed_dim=1, decoder_widths=(1,), decoder_activation="identity")
    m.params["W_d0"][...] = 1.0
    m.params["b_d0"][...] = 0.5
    m.params["W_out"][:, 0] = [2.0, -3.0]
    m.params["b_out"][:] = [0.1, 0.2]
    # hidden = 1.5 + 0.5 = 2.0; outputs = 2*2 + 0.1, -3*2 + 0.2
    assert np.allclose(decode(m, [1.5]), [4.1, -5.8], atol=1e-15)
    m_tanh = zero_model(2, embed_dim=1, decoder_widths=(1,))
    m_tanh.params.update({k: m.params[k].copy() for k in m.params})
    assert np.allclose(decode(m_tanh, [1.5]), [2 * math.tanh(2.0) + 0.1, -3 * math.tanh(2.0) + 0.2])


def test_decode_length_and_shape():
    m = init_model(7, 1, 4, 2, (5, 3), rng=4)
    assert decode(m, [0.1, 0.2]).shape == (7,)
    with pytest.raises(ShapeMismatch):
        decode(m, [0.1, 0.2, 0.3])


def test_loss_examples():
    m = zero_model(5)
    v = 3.0
    assert reconstruction_loss(m, np.full((1, 5), v)) == pytest.approx(v * v)
    m.params["b_out"][:] = v
    assert reconstruction_loss(m, np.full((3, 5), v)) == 0.0
    with pytest.raises(EmptyBatch):
        reconstruction_loss(m, np.zeros((0, 5)))


def test_loss_invariant_under_reordering():
    m = init_model(6, 1, 4, 2, (8,), rng=9)
    x = RngStream(1).normal(size=(10, 6))
    perm = RngStream(2).permutation(10)
    assert reconstruction_loss(m, x) == pytest.approx(reconstruction_loss(m, x[perm]), rel=1e-14)


def test_undercomplete_enforced():
    with pytest.raises(ShapeMismatch):
        init_model(2, 1, 4, 2, ())


def test_backward_matches_finite_differences():
    m = init_model(5, 1, 4, 2, (8, 8), rng=3)
    x = RngStream(0).normal(size=(8, 5))
    assert gradient_check(m, x, 1e-5) < 1e-5


def test_backward_multi_input_matches_finite_differences():
    m = init_model(3, 2, 3, 2, (4,), decoder_activation="identity", rng=8)
    x = RngStream(4).normal(size=(6, 3, 2))
    assert gradient_check(m, x, 1e-5) < 1e-5


def test_backward_loss_is_bitwise_reconstruction_loss():
    m = init_model(5, 1, 4, 2, (8,), rng=5)
    x = RngStream(6).normal(size=(7, 5))
    loss, _ = backward(m, x)
    assert loss == reconstruction_loss(m, x)


def test_exact_reconstruction_has_zero_head_gradient():
    m = zero_model(4, hidden_size=2, embed_dim=1, decoder_widths=(3,))
    m.params["b_out"][:] = 2.5
    loss, grads = backward(m, np.full((5, 4), 2.5))
    assert loss == 0.0
    assert np.max(np.abs(grads["W_out"])) <= 1e-12 and np.max(np.abs(grads["b_out"])) <= 1e-12


def test_duplicated_batch_same_gradients():
    m = init_model(5, 1, 4, 2, (6,), rng=12)
    x = RngStream(3).normal(size=(4, 5))
    _, g1 = backward(m, x)
    _, g2 = backward(m, np.vstack([x, x]))
    for k in g1:
        assert np.max(np.abs(g1[k] - g2[k])) <= 1e-12


def test_gradient_check_catches_missing_gate_bias():
    m = init_model(5, 1, 4, 2, (8,), rng=3)
    x = RngStream(0).normal(size=(8, 5))

    def broken(model, batch):
        loss, grads = backward(model, batch)
        grads["b_i"] = np.zeros_like(grads["b_i"])
        return loss, grads

    err = gradient_check(m, x, 1e-5, grad_fn=broken)
    assert err > 1e-2 and err >= 0.0


def test_gradient_check_rejects_bad_epsilon():
    m = init_model(3, 1, 2, 1, (), rng=0)
    with pytest.raises(ValueError):
        gradient_check(m, np.zeros((1, 3)), 1e-2)


def test_encode_is_deterministic_and_batch_consistent():
    m = init_model(6, 1, 5, 2, (8,), rng=1)
    x = RngStream(9).normal(size=(4, 6))
    zb = encode_batch(m, x)
    assert np.array_equal(zb, encode_batch(m, x))
    for i in range(4):
        assert np.allclose(encode(m, x[i]), zb[i], atol=1e-15)


def test_model_roundtrip_is_bit_exact(tmp_path):
    m = init_model(6, 1, 5, 2, (8, 3), rng=1)
    m.norm_mean, m.norm_sd = 10.123456789, 2.718281828
    save_model(m, tmp_path / "m.npz")
    back = load_model(tmp_path / "m.npz")
    assert list(back.params) == list(m.params)
    for k in m.params:
        assert back.params[k].tobytes() == m.params[k].tobytes()
    assert (back.norm_mean, back.norm_sd) == (m.norm_mean, m.norm_sd)
    assert back.decoder_widths == (8, 3) and back.decoder_activation == "tanh"
