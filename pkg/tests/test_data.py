"""Tests for the synthetic dataset generators."""

import json
import math

import numpy as np
import pytest

from shallowreg.data import (Dataset, fig2_regression, gen_fig2,
                             gen_zero_model, generate, sample_ball,
                             sample_sphere)


def test_sphere_radius_sqrt2():
    X = sample_sphere(5, 3, math.sqrt(2.0), seed=7)
    norms = np.linalg.norm(X, axis=1)
    assert np.all(np.abs(norms - math.sqrt(2.0)) <= 1e-12 * math.sqrt(2.0))


def test_sphere_d1_is_sign():
    X = sample_sphere(1, 1, 1.0, seed=123)
    assert X.shape == (1, 1)
    assert abs(abs(X[0, 0]) - 1.0) <= 1e-15


def test_sphere_coordinate_means_vanish():
    # symmetry: each coordinate has mean 0, CI width 4/sqrt(n) at radius 1
    n = 10**4
    X = sample_sphere(n, 4, 1.0, seed=1)
    means = X.mean(axis=0)
    assert np.all(np.abs(means) <= 4.0 / math.sqrt(n))


def test_sphere_rejects_bad_args():
    with pytest.raises(ValueError):
        sample_sphere(5, 0, 1.0, seed=0)
    with pytest.raises(ValueError):
        sample_sphere(5, 2, 0.0, seed=0)
    with pytest.raises(ValueError):
        sample_sphere(0, 2, 1.0, seed=0)


def test_ball_membership():
    X = sample_ball(100, 2, seed=3)
    assert np.all(np.linalg.norm(X, axis=1) <= 1.0 + 1e-15)


def test_ball_1d_uniform_mean():
    X = sample_ball(10**4, 1, seed=9)
    assert abs(X.mean()) <= 0.04
    assert np.all(np.abs(X) <= 1.0)


def test_ball_deterministic():
    assert np.array_equal(sample_ball(50, 3, seed=4), sample_ball(50, 3, seed=4))


def test_fig2_regression_value():
    # f(sqrt(2), 0, 0, 0) = sqrt(2) + cos(0) = sqrt(2) + 1
    X = np.array([[math.sqrt(2.0), 0.0, 0.0, 0.0]])
    assert fig2_regression(X)[0] == pytest.approx(math.sqrt(2.0) + 1.0, abs=1e-12)


def test_fig2_noiseless_y_equals_m():
    ds = gen_fig2(50, 6, sigma=0.0, seed=2)
    assert np.array_equal(ds.y, ds.m_true)


def test_fig2_rejects_small_d():
    with pytest.raises(ValueError):
        gen_fig2(10, 3, 0.2, seed=0)


def test_fig2_full_scale_shape_and_radius():
    ds = gen_fig2(1024, 32, sigma=0.2, seed=5)
    assert ds.X.shape == (1024, 32)
    norms = np.linalg.norm(ds.X, axis=1)
    assert np.allclose(norms, math.sqrt(2.0), rtol=1e-12, atol=0)


def test_zero_model_noiseless():
    ds = gen_zero_model(20, 1, sigma=0.0, seed=8)
    assert np.all(ds.y == 0.0)
    assert np.all(ds.m_true == 0.0)


def test_zero_model_unit_variance():
    ds = gen_zero_model(10**4, 1, sigma=1.0, seed=10)
    assert 0.94 <= np.var(ds.y) <= 1.06
    assert np.all(ds.m_true == 0.0)
    assert np.all((0.0 <= ds.X) & (ds.X <= 1.0))


def test_generators_bit_identical():
    a = gen_fig2(64, 8, 0.2, seed=77)
    b = gen_fig2(64, 8, 0.2, seed=77)
    assert np.array_equal(a.X, b.X)
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.m_true, b.m_true)


def test_generate_dispatch_and_unknown_model():
    ds = generate("zero", 10, 2, 0.5, 3)
    assert ds.model_id == "zero"
    with pytest.raises(ValueError):
        generate("nope", 10, 2, 0.5, 3)


def test_dataset_invariant_y_is_m_plus_noise():
    ds = gen_fig2(128, 5, sigma=0.3, seed=6)
    eps = (ds.y - ds.m_true) / ds.sigma
    # standardized residuals look like N(0,1) draws
    assert abs(eps.mean()) < 4.0 / math.sqrt(128)


def test_dataset_csv_roundtrip(tmp_path):
    ds = gen_fig2(17, 4, sigma=0.2, seed=13)
    csv_path = tmp_path / "ds.csv"
    ds.to_csv(csv_path)
    with open(csv_path) as fh:
        header = fh.readline().strip().split(",")
    assert header == ["x1", "x2", "x3", "x4", "y", "m_true"]
    meta = json.loads((tmp_path / "ds.meta.json").read_text())
    assert meta == {"model_id": "fig2", "n": 17, "d": 4, "sigma": 0.2,
                    "seed": 13}
    back = Dataset.from_csv(csv_path)
    assert np.array_equal(back.X, ds.X)
    assert np.array_equal(back.y, ds.y)
    assert np.array_equal(back.m_true, ds.m_true)


def test_dataset_rejects_nonfinite():
    with pytest.raises(ValueError):
        Dataset(X=np.array([[np.nan]]), y=np.zeros(1), m_true=np.zeros(1),
                sigma=0.0, model_id="zero", seed=0)
