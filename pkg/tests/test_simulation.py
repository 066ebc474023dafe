import numpy as np
import pytest

from deeptraj.errors import EmptyConfig
from deeptraj.simulation import SimulationConfig, constant_levels, half_moons, linear_groups, simulate_qol


def test_clean_sine_values():
    ds, _ = simulate_qol(SimulationConfig(n_a=1, n_b=0, n_times=5, noise=False, phase=False))
    # t = 0, 0.25, ..., 1.0 with the default grid
    assert ds.values[0, 0] == pytest.approx(10.0, abs=1e-12)
    assert ds.values[0, 4] == pytest.approx(15.0, abs=1e-12)


def test_flat_group_is_exactly_baseline():
    ds, labels = simulate_qol(SimulationConfig(n_a=3, n_b=4, noise=False))
    assert np.all(ds.values[labels == 1] == 10.0)


def test_clean_group_a_within_band():
    ds, labels = simulate_qol(SimulationConfig(noise=False))
    a = ds.values[labels == 0]
    assert a.min() >= 5.0 - 1e-12 and a.max() <= 15.0 + 1e-12


def test_same_seed_same_data_and_noise_mean():
    cfg = SimulationConfig(n_a=0, n_b=500, n_times=20, seed=11)
    a, _ = simulate_qol(cfg)
    b, _ = simulate_qol(cfg)
    assert np.array_equal(a.values, b.values)
    assert a.values.size == 10_000
    assert abs(a.values.mean() - 10.0) <= 0.05


def test_phase_is_constant_per_subject():
    cfg = SimulationConfig(n_a=30, n_b=0, noise=False)
    ds, _ = simulate_qol(cfg)
    t = np.arange(cfg.n_times) * cfg.dt
    for row in ds.values:
        s = (row - 10.0) / 5.0
        # a single phase explains every point: least-squares fit of sin/cos weights has unit norm
        basis = np.column_stack([np.sin(cfg.angular * t), np.cos(cfg.angular * t)])
        w, *_ = np.linalg.lstsq(basis, s, rcond=None)
        assert np.max(np.abs(basis @ w - s)) < 1e-12
        assert np.hypot(*w) == pytest.approx(1.0, abs=1e-12)
        phi = np.arctan2(w[1], w[0])
        assert -2.0 <= phi < 2.0


def test_shape_and_labels():
    ds, labels = simulate_qol(SimulationConfig(n_a=7, n_b=5, n_times=9))
    assert ds.values.shape == (12, 9)
    assert list(labels) == [0] * 7 + [1] * 5
    assert len(set(ds.subject_ids)) == 12


def test_toggles_do_not_shift_other_streams():
    base = SimulationConfig(n_a=5, n_b=5, seed=3)
    noisy, _ = simulate_qol(base)
    clean, _ = simulate_qol(SimulationConfig(n_a=5, n_b=5, seed=3, noise=False))
    # the flat group's noise is identical whether or not phases are drawn
    flat_np, _ = simulate_qol(SimulationConfig(n_a=5, n_b=5, seed=3, phase=False))
    assert np.array_equal(noisy.values[5:], flat_np.values[5:])
    assert np.all(clean.values[5:] == 10.0)


def test_config_validation():
    with pytest.raises(EmptyConfig):
        simulate_qol(SimulationConfig(n_a=0, n_b=0))
    with pytest.raises(ValueError):
        SimulationConfig(n_times=1)
    with pytest.raises(ValueError):
        SimulationConfig(noise_sd=-1)


def test_helper_generators():
    ds, lab = constant_levels((0, 5), n_per_group=4, n_times=3, noise_sd=0)
    assert np.array_equal(ds.values, np.repeat([[0.0], [5.0]], 4, axis=0) * np.ones(3))
    ds, lab = linear_groups((2.0,), n_per_group=1, n_times=4, noise_sd=0)
    assert list(ds.values[0]) == [0, 2, 4, 6]
    pts, lab = half_moons(50, seed=1)
    assert pts.shape == (100, 2) and np.allclose(np.hypot(*pts[:50].T), 1.0)
