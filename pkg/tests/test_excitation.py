import numpy as np
import pytest

from rlsbias.estimators import Observation, Regularizer, RegressorAccumulator
from rlsbias.excitation import (
    estimate_C,
    pe_window_check,
    regularized_condition_trajectory,
)


def _step_grams(rows):
    return [np.outer(r, r) for r in rows]


def test_window_check_excited_by_basis_rows():
    # e_1 and e_2 together span R^2, so any window containing both passes.
    grams = _step_grams([np.array([1.0, 0.0]), np.array([0.0, 1.0])] * 3)
    rep = pe_window_check(grams, start=0, window_length=1)
    assert rep.satisfied
    assert rep.alpha == pytest.approx(1.0)
    assert rep.beta == pytest.approx(1.0)
    assert rep.window_length == 1


def test_window_check_fails_on_repeated_direction():
    grams = _step_grams([np.array([1.0, 1.0])] * 5)
    rep = pe_window_check(grams, start=0, window_length=4)
    assert not rep.satisfied
    assert rep.alpha <= 1e-10 * max(1.0, rep.beta)
    assert rep.beta == pytest.approx(10.0)


def test_window_check_window_is_inclusive():
    # window_length L sums L+1 consecutive step grams
    grams = _step_grams([np.array([2.0, 0.0]), np.array([0.0, 3.0]), np.array([1.0, 0.0])])
    rep = pe_window_check(grams, start=0, window_length=2)
    assert rep.beta == pytest.approx(9.0)  # max eig of diag(5, 9)
    assert rep.alpha == pytest.approx(5.0)


def test_window_check_bounds():
    grams = _step_grams([np.array([1.0, 0.0])] * 4)
    with pytest.raises(ValueError):
        pe_window_check(grams, start=0, window_length=-1)
    with pytest.raises(ValueError):
        pe_window_check(grams, start=2, window_length=2)


def test_estimate_C_is_count_normalized():
    acc = RegressorAccumulator.zeros(2)
    acc.add(Observation(np.array([2.0, 0.0]), np.array([1.0])))
    acc.add(Observation(np.array([0.0, 2.0]), np.array([1.0])))
    est = estimate_C(acc)
    assert est.k == 2
    assert np.allclose(est.C, 2.0 * np.eye(2))


def test_estimate_C_requires_data():
    with pytest.raises(ValueError):
        estimate_C(RegressorAccumulator.zeros(2))


def test_condition_trajectory_decreases_as_gram_fills_in():
    rng = np.random.default_rng(77)
    reg = Regularizer.scaled_identity(3, 1e-3)
    acc = RegressorAccumulator.zeros(3)
    snaps = []
    for _ in range(30):
        phi = rng.standard_normal(3)
        acc.add(Observation(phi, np.array([0.0])))
        snaps.append(acc.copy())
    kappas = regularized_condition_trajectory(snaps, reg)
    assert len(kappas) == 30
    assert all(np.isfinite(k) and k >= 1.0 for k in kappas)
    # before the gram has rank 3, conditioning is set by r and is huge
    assert kappas[0] > 1e2
    # well past full rank it settles near the data's own conditioning
    assert kappas[-1] < kappas[0]
