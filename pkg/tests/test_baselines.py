import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deeptraj.baselines import (agglomerative_fit, gbtm_fit, kmeans_fit, kml_fit, kml_select, lloyd,
                                pairwise_distances, traj_distance)
from deeptraj.core_math import RngStream
from deeptraj.errors import (EmptyDataset, EmptyTrajectory, KTooLarge, LengthMismatch, SingularDesign)
from deeptraj.evaluation import adjusted_rand_index
from deeptraj.simulation import half_moons, linear_groups
from oracles import best_two_partition_sse, brute_dtw, brute_frechet, partition_sse

METRICS = ("L1", "L2", "DTW", "Frechet")


@pytest.mark.parametrize("metric", METRICS)
def test_distance_to_self_is_zero(metric):
    a = [1.5, -2.0, 3.0, 0.25]
    assert traj_distance(a, a, metric) == 0.0


def test_distance_examples():
    assert traj_distance([0, 0, 0], [1, 2, 2], "L1") == 5.0
    assert traj_distance([0, 0, 0], [1, 2, 2], "L2") == 3.0
    assert traj_distance([0, 1], [0, 1, 1], "DTW") == 0.0
    assert traj_distance([0, 2], [1], "Frechet") == 1.0


def test_distance_errors():
    with pytest.raises(LengthMismatch):
        traj_distance([0, 1], [0, 1, 2], "L2")
    with pytest.raises(EmptyTrajectory):
        traj_distance([], [1.0], "DTW")
    with pytest.raises(ValueError):
        traj_distance([0], [1], "cosine")


def test_elastic_distances_match_enumeration():
    rng = RngStream(17)
    for _ in range(25):
        a = rng.integers(-4, 5, size=int(rng.integers(1, 6)))
        b = rng.integers(-4, 5, size=int(rng.integers(1, 6)))
        assert traj_distance(a, b, "DTW") == brute_dtw(a, b)
        assert traj_distance(a, b, "Frechet") == brute_frechet(a, b)


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_distance_symmetry_and_triangle(seed):
    rng = RngStream(seed)
    a, b, c = rng.normal(size=(3, 6))
    for metric in METRICS:
        assert traj_distance(a, b, metric) == pytest.approx(traj_distance(b, a, metric), abs=1e-12)
    for metric in ("L1", "L2", "Frechet"):
        assert traj_distance(a, c, metric) <= traj_distance(a, b, metric) + traj_distance(b, c, metric) + 1e-12


def test_pairwise_matches_single_calls():
    x = RngStream(2).normal(size=(4, 5))
    y = RngStream(3).normal(size=(3, 5))
    for metric in METRICS:
        d = pairwise_distances(x, y, metric)
        assert d.shape == (4, 3)
        assert d[2, 1] == pytest.approx(traj_distance(x[2], y[1], metric), abs=1e-14)


def test_kml_k_equals_n():
    x = RngStream(0).normal(size=(6, 4))
    part = kml_fit(x, 6, n_restarts=3)
    assert sorted(part.assignments) == list(range(6))
    assert part.inertia == pytest.approx(0.0, abs=1e-20)


def test_kml_two_levels():
    rng = RngStream(1)
    x = np.vstack([rng.normal(0, 1, size=(10, 5)), rng.normal(100, 1, size=(10, 5))])
    truth = np.repeat([0, 1], 10)
    for metric in METRICS:
        assert adjusted_rand_index(kml_fit(x, 2, metric, n_restarts=5, seed=3), truth) == 1.0


def test_kml_centers_are_pointwise_means():
    x = RngStream(5).normal(size=(30, 6))
    part = kml_fit(x, 3, "DTW", n_restarts=4, seed=1)
    for j in range(3):
        assert np.allclose(part.centers[j], x[part.assignments == j].mean(axis=0))


def test_kml_errors():
    with pytest.raises(KTooLarge):
        kml_fit(np.zeros((3, 4)), 4)
    with pytest.raises(EmptyDataset):
        kml_fit(np.zeros((0, 4)), 1)


def test_kml_select_returns_scores_for_each_k():
    rng = RngStream(2)
    x = np.vstack([rng.normal(lv, 0.5, size=(15, 4)) for lv in (0, 5, 10)])
    best, scores = kml_select(x, range(2, 6), n_restarts=5)
    assert sorted(scores) == [2, 3, 4, 5]
    assert best.k == 3


def test_kmeans_k1_is_global_mean():
    x = RngStream(4).normal(size=(25, 3))
    part = kmeans_fit(x, 1, n_restarts=2)
    assert np.allclose(part.centers[0], x.mean(axis=0))


def test_kmeans_small_example_all_restarts_agree():
    x = np.array([0.0, 1.0, 10.0, 11.0])
    for seed in range(10):
        part = kmeans_fit(x, 2, n_restarts=1, seed=seed)
        assert adjusted_rand_index(part, [0, 0, 1, 1]) == 1.0


def test_kmeans_matches_exhaustive_optimum():
    rng = RngStream(8)
    for _ in range(10):
        n = int(rng.integers(3, 9))
        x = rng.normal(size=(n, 2))
        part = kmeans_fit(x, 2, n_restarts=20, seed=int(rng.integers(0, 1000)))
        assert partition_sse(x, part.assignments) == pytest.approx(best_two_partition_sse(x), abs=1e-12)


def test_lloyd_sse_non_increasing():
    x = RngStream(6).normal(size=(80, 3))
    _, _, trace = lloyd(x, x[:5], "L2")
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_lloyd_reseeds_empty_cluster():
    x = np.array([[0.0], [0.1], [0.2], [5.0]])
    assign, centers, _ = lloyd(x, np.array([[0.0], [100.0]]))
    assert set(assign) == {0, 1}


def test_agglomerative_singletons():
    x = RngStream(1).normal(size=(7, 2))
    for link in ("single", "complete", "average"):
        assert sorted(agglomerative_fit(x, 7, link).assignments) == list(range(7))


def test_agglomerative_blobs():
    rng = RngStream(3)
    x = np.vstack([rng.uniform(0, 1, size=(20, 2)), rng.uniform(0, 1, size=(20, 2)) + [5.0, 0.0]])
    for link in ("single", "complete", "average"):
        assert adjusted_rand_index(agglomerative_fit(x, 2, link), np.repeat([0, 1], 20)) == 1.0


def test_single_linkage_half_moons():
    pts, labels = half_moons(100, gap=0.3, seed=0)
    assert adjusted_rand_index(agglomerative_fit(pts, 2, "single"), labels) == 1.0


def test_agglomerative_labels_by_first_appearance():
    part = agglomerative_fit([[10.0], [0.0], [10.1], [0.1]], 2)
    assert list(part.assignments) == [0, 1, 0, 1]
    with pytest.raises(KTooLarge):
        agglomerative_fit([[0.0]], 2)


def test_gbtm_single_class_is_grand_mean():
    x = RngStream(9).normal(3.0, 2.0, size=(40, 6))
    model, members, _ = gbtm_fit(x, 1, poly_order=0)
    assert model.coefs[0, 0] == pytest.approx(x.mean(), abs=1e-12)
    assert np.all(members.probs == 1.0)
    assert model.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_gbtm_loglik_monotone_and_slopes():
    data, labels = linear_groups(seed=5)
    model, members, hist = gbtm_fit(data, 2, poly_order=1, seed=5)
    assert np.all(np.diff(hist) >= -1e-9)
    assert adjusted_rand_index(members, labels) == 1.0
    slopes = sorted(model.coefs[:, 1] / (data.n_times - 1))
    assert slopes == pytest.approx([-1.0, 1.0], abs=0.05)
    assert np.all(model.variances > 0)
    assert np.allclose(members.probs.sum(axis=1), 1.0, atol=1e-12)


def test_gbtm_errors():
    with pytest.raises(SingularDesign):
        gbtm_fit(np.zeros((5, 2)), 1, poly_order=2)
    with pytest.raises(KTooLarge):
        gbtm_fit(np.zeros((2, 4)), 3)
