import math

import numpy as np
import pytest

from rlsbias.errors import NotPersistentlyExcitingError
from rlsbias.estimators import Observation, Regularizer, RegressorAccumulator
from rlsbias.excitation import CEstimate
from rlsbias.diagnostics import (
    TraceRecord,
    average_over_trials,
    exact_bias,
    log_slope,
    log_slope_sequence,
    moving_average,
    predict_bias_asymptote,
)


def test_asymptote_diagonal_hand_case():
    # C = diag(0.1, 1, 10, 100), R = 1e-5 I, theta0 = 0, theta = ones
    # gives v = -1e-5 / diag(C), i.e. (-1e-4, -1e-5, -1e-6, -1e-7).
    C = CEstimate(C=np.diag([0.1, 1.0, 10.0, 100.0]), k=10_000)
    reg = Regularizer.scaled_identity(4, 1e-5)
    pred = predict_bias_asymptote(C, reg, np.ones(4))
    want = np.array([-1e-4, -1e-5, -1e-6, -1e-7])
    assert np.allclose(pred.v, want, rtol=1e-12)
    assert np.array_equal(pred.per_component_scaled_error, pred.v)


def test_asymptote_rejects_singular_excitation():
    C = CEstimate(C=np.zeros((2, 2)), k=5)
    reg = Regularizer.scaled_identity(2, 1.0)
    with pytest.raises(NotPersistentlyExcitingError):
        predict_bias_asymptote(C, reg, np.ones(2))


def test_exact_bias_scalar_hand_case():
    # One noise-free observation phi=1 at r=1, theta0=0, theta=1:
    # estimate is 0.5, so the error is -0.5.
    reg = Regularizer.scaled_identity(1, 1.0)
    acc = RegressorAccumulator.zeros(1)
    acc.add(Observation(np.array([1.0]), np.array([1.0])))
    b = exact_bias(acc, reg, np.array([1.0]))
    assert b[0] == pytest.approx(-0.5, abs=1e-15)


def test_exact_bias_with_no_data_is_prior_error():
    reg = Regularizer(np.eye(2), np.array([2.0, 0.0]))
    acc = RegressorAccumulator.zeros(2)
    b = exact_bias(acc, reg, np.array([1.0, 1.0]))
    assert np.allclose(b, [1.0, -1.0])


def test_exact_bias_matches_recursion_error():
    from rlsbias.estimators import rls_init, rls_step

    rng = np.random.default_rng(91)
    theta = rng.standard_normal(3)
    reg = Regularizer(0.05 * np.eye(3), rng.standard_normal(3))
    state = rls_init(reg)
    acc = RegressorAccumulator.zeros(3)
    for _ in range(40):
        phi = rng.standard_normal((1, 3))
        obs = Observation(phi, phi @ theta)
        state = rls_step(state, obs)
        acc.add(obs)
    assert np.allclose(state.theta - theta, exact_bias(acc, reg, theta), atol=1e-10)


def test_log_slope_recovers_power_law_exponent():
    for c in (-2.0, -1.0, -0.5, 1.0):
        for k in (2, 3, 17, 9999):
            f_k = 3.7 * float(k) ** c
            f_km1 = 3.7 * float(k - 1) ** c
            assert log_slope(f_k, f_km1, k) == pytest.approx(c, abs=1e-10)


def test_log_slope_edge_cases():
    with pytest.raises(ValueError):
        log_slope(1.0, 1.0, 1)
    assert math.isnan(log_slope(0.0, 1.0, 5))
    assert math.isnan(log_slope(1.0, 0.0, 5))
    assert math.isnan(log_slope(-1.0, 1.0, 5))


def test_log_slope_sequence_warmup_and_values():
    k = np.arange(6, dtype=float)
    vals = np.empty(6)
    vals[0] = 0.0
    vals[1:] = 2.0 * k[1:] ** -1.0
    s = log_slope_sequence(vals)
    assert s.shape == (6,)
    assert np.all(np.isnan(s[:2]))
    assert np.allclose(s[2:], -1.0, atol=1e-12)


def test_log_slope_sequence_short_input():
    assert np.all(np.isnan(log_slope_sequence(np.array([1.0, 2.0]))))


def test_moving_average_trailing_window():
    got = moving_average(np.array([1.0, 2.0, 3.0, 4.0]), 2)
    assert math.isnan(got[0])
    assert np.allclose(got[1:], [1.5, 2.5, 3.5])


def test_moving_average_skips_nan_prefix():
    x = np.array([np.nan, np.nan, 2.0, 4.0])
    got = moving_average(x, 2)
    # nan entries are dropped from their windows, all-nan windows stay nan
    assert np.all(np.isnan(got[:2]))
    assert got[2] == pytest.approx(2.0)
    assert got[3] == pytest.approx(3.0)


def test_moving_average_guards():
    with pytest.raises(ValueError):
        moving_average(np.array([]), 2)
    with pytest.raises(ValueError):
        moving_average(np.array([1.0]), 0)
    assert np.all(np.isnan(moving_average(np.array([1.0, 2.0]), 5)))


def _record(k, err, kappa=float("nan")):
    err = np.asarray(err, dtype=float)
    return TraceRecord(
        k=k, per_component_error=err, error_norm=float(np.linalg.norm(err)), kappa=kappa
    )


def test_average_over_trials_means_and_recomputed_slope():
    t1 = [_record(0, [1.0, 1.0], kappa=2.0), _record(1, [0.5, 0.5], kappa=4.0)]
    t2 = [_record(0, [3.0, 1.0], kappa=6.0), _record(1, [1.5, 0.5], kappa=8.0)]
    avg = average_over_trials([t1, t2])
    assert len(avg) == 2
    assert np.allclose(avg[0].per_component_error, [2.0, 1.0])
    assert avg[0].kappa == pytest.approx(4.0)
    assert avg[1].kappa == pytest.approx(6.0)
    assert avg[1].delta_kappa == pytest.approx(2.0)
    # the averaged trace carries the mean of the per-trial norms
    want = 0.5 * (np.linalg.norm([0.5, 0.5]) + np.linalg.norm([1.5, 0.5]))
    assert avg[1].error_norm == pytest.approx(want)


def test_average_over_trials_rejects_mismatched_grids():
    t1 = [_record(0, [1.0]), _record(1, [1.0])]
    t2 = [_record(0, [1.0]), _record(2, [1.0])]
    with pytest.raises(ValueError):
        average_over_trials([t1, t2])
    with pytest.raises(ValueError):
        average_over_trials([])
