"""Tests for error metrics and aggregation."""

import math

import numpy as np
import pytest

from shallowreg.data import gen_zero_model
from shallowreg.metrics import (ErrorReport, aggregate, empirical_error,
                                prediction_error_mc)
from shallowreg.netcore import ShallowNet, build_relu_interpolant_1d


def constant_net(c0: float, d: int = 1) -> ShallowNet:
    # relu(0 . x + 1) = 1, so the network is identically c0
    return ShallowNet(a=np.array([c0]), Theta=np.zeros((1, d)),
                      b=np.array([1.0]))


def test_empirical_error_identical_is_zero():
    v = np.array([0.3, -1.0, 2.0])
    assert empirical_error(v, v) == 0.0


def test_empirical_error_unit():
    assert empirical_error(np.array([1.0, 1.0]), np.zeros(2)) == 1.0


def test_empirical_error_length_mismatch():
    with pytest.raises(ValueError):
        empirical_error(np.zeros(3), np.zeros(4))


def test_empirical_error_permutation_invariant():
    rng = np.random.default_rng(0)
    pred = rng.standard_normal(40)
    m = rng.standard_normal(40)
    perm = rng.permutation(40)
    assert empirical_error(pred, m) == pytest.approx(
        empirical_error(pred[perm], m[perm]), rel=1e-15)


def test_interpolant_empirical_error_near_noise_variance():
    # short version of the replication experiment; expectation is sigma^2 = 1
    vals = []
    for rep in range(50):
        ds = gen_zero_model(32, 1, 1.0, 1000 + rep)
        net = build_relu_interpolant_1d(ds.X[:, 0], ds.y)
        vals.append(empirical_error(net.eval(ds.X), ds.m_true))
    assert 0.7 <= np.mean(vals) <= 1.3


def test_prediction_error_zero_net_on_zero_model():
    net = ShallowNet(a=np.zeros(1), Theta=np.zeros((1, 2)), b=np.zeros(1))
    value, se = prediction_error_mc(net, "zero", 256, seed=0)
    assert value == 0.0
    assert se == 0.0


def test_prediction_error_constant_net():
    net = constant_net(0.5, d=3)
    value, se = prediction_error_mc(net, "zero", 512, seed=1)
    assert value == 0.25
    assert se == 0.0


def test_prediction_error_truncated_reporting():
    # clamping a wild constant to the truncation level caps its error
    net = constant_net(100.0, d=2)
    plain, _ = prediction_error_mc(net, "zero", 128, seed=5)
    clamped, _ = prediction_error_mc(net, "zero", 128, seed=5, truncate_at=2.0)
    assert plain == 10000.0
    assert clamped == 4.0


def test_prediction_error_deterministic():
    net = constant_net(1.25, d=2)
    assert prediction_error_mc(net, "zero", 128, seed=3) == \
        prediction_error_mc(net, "zero", 128, seed=3)


def test_prediction_error_unknown_model():
    with pytest.raises(ValueError):
        prediction_error_mc(constant_net(1.0), "what", 16, seed=0)


def test_prediction_error_se_clt_shrink():
    # doubling n_test shrinks the standard error by about 1/sqrt(2)
    rng = np.random.default_rng(9)
    net = ShallowNet(a=rng.standard_normal(4),
                     Theta=rng.standard_normal((4, 4)),
                     b=rng.standard_normal(4))
    ratios = []
    for trial in range(50):
        _, se1 = prediction_error_mc(net, "fig2", 512, seed=trial)
        _, se2 = prediction_error_mc(net, "fig2", 1024, seed=10_000 + trial)
        ratios.append(se2 / se1)
    target = 1.0 / math.sqrt(2.0)
    assert abs(np.mean(ratios) - target) <= 0.2 * target


def test_aggregate_constant():
    mean, sd, ci = aggregate([1.0, 1.0, 1.0])
    assert mean == 1.0 and sd == 0.0
    assert ci == (1.0, 1.0)


def test_aggregate_hand_values():
    mean, sd, ci = aggregate([0.0, 2.0])
    assert mean == 1.0
    assert sd == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert ci[0] <= mean <= ci[1]


def test_aggregate_needs_two():
    with pytest.raises(ValueError):
        aggregate([1.0])


def test_error_report_validation():
    rep = ErrorReport(empirical=0.5, prediction=0.4, pred_se=0.01,
                      n_test=100, train_mse=0.0)
    assert rep.prediction == 0.4
    with pytest.raises(ValueError):
        ErrorReport(empirical=-0.1, prediction=0.4, pred_se=0.01,
                    n_test=100, train_mse=0.0)
    with pytest.raises(ValueError):
        ErrorReport(empirical=0.1, prediction=float("nan"), pred_se=0.01,
                    n_test=100, train_mse=0.0)
