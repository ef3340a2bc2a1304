import numpy as np
import pytest

from glkern.calibration import (EmptyHoldoutError,
                                InsufficientHoldoutError, build_gamma_grid,
                                calibrate, calibration_error, holdout_grid,
                                holdout_weights, predictions_over_gammas,
                                split_sample)
from glkern.estimators import known_design_density
from glkern.kernels import GAUSSIAN
from glkern.processes import ProcessSpec, RegressionSample, bump_line, generate_sample
from glkern.selection import DELTA_EXPONENT_EMPIRICAL


class TestGammaGrid:
    def test_published_grid(self):
        grid = build_gamma_grid(5e-8, 0.05, 21)
        assert grid[0] == pytest.approx(5e-8)
        assert grid[-1] == pytest.approx(0.05)
        step = (0.05 - 5e-8) / 20
        assert np.diff(grid) == pytest.approx(np.full(20, step))

    def test_two_point_grid(self):
        assert build_gamma_grid(0.1, 0.2, 2) == pytest.approx([0.1, 0.2])

    def test_strictly_increasing(self):
        assert np.all(np.diff(build_gamma_grid(1e-6, 1.0, 17)) > 0)

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            build_gamma_grid(0.5, 0.5, 5)
        with pytest.raises(ValueError):
            build_gamma_grid(0.0, 0.5, 5)
        with pytest.raises(ValueError):
            build_gamma_grid(0.1, 0.5, 1)


class TestHoldoutGrid:
    def test_filter_and_sort(self):
        holdout = RegressionSample(x=np.array([1.5, -0.3, 0.8, -2.0]),
                                   y=np.array([10.0, 20.0, 30.0, 40.0]))
        pairs = holdout_grid(holdout)
        assert pairs.x == pytest.approx([-0.3, 0.8])
        assert pairs.y == pytest.approx([20.0, 30.0])

    def test_all_outside(self):
        holdout = RegressionSample(x=np.array([1.5, -2.0]), y=np.array([1.0, 2.0]))
        with pytest.raises(EmptyHoldoutError):
            holdout_grid(holdout)

    def test_idempotent_on_sorted_input(self):
        holdout = RegressionSample(x=np.array([-0.9, -0.1, 0.4]),
                                   y=np.array([1.0, 2.0, 3.0]))
        pairs = holdout_grid(holdout)
        assert np.array_equal(pairs.x, holdout.x)
        assert np.array_equal(pairs.y, holdout.y)


class TestWeights:
    def test_two_points_tile_the_interval(self):
        d = holdout_weights(np.array([-0.5, 0.5]))
        assert d == pytest.approx([1.0, 1.0])

    def test_weights_sum_to_interval_length(self):
        rng = np.random.default_rng(3)
        for p in (2, 3, 7, 40):
            x = np.sort(rng.uniform(-1, 1, p))
            assert holdout_weights(x).sum() == pytest.approx(2.0, abs=1e-12)

    def test_three_point_manual_arithmetic(self):
        x = np.array([-0.6, 0.1, 0.7])
        d = holdout_weights(x)
        assert d[0] == pytest.approx((-0.6 + 0.1) / 2 + 1.0)
        assert d[1] == pytest.approx((0.7 - (-0.6)) / 2)
        assert d[2] == pytest.approx(1.0 - (0.1 + 0.7) / 2)

    def test_single_point_rejected(self):
        with pytest.raises(InsufficientHoldoutError):
            holdout_weights(np.array([0.3]))


def pipeline_fixture(n=400, q=60, sigma=0.4, seed=2024):
    sample = generate_sample(ProcessSpec(), bump_line, sigma, n + 2 * q, seed)
    split = split_sample(sample, n, q)
    return split, known_design_density(2.0)


class TestCalibrationError:
    def test_perfect_predictions_zero(self):
        split, g = pipeline_fixture()
        pairs = holdout_grid(split.holdout)
        preds, _ = predictions_over_gammas(
            split.estimation, g, GAUSSIAN, pairs.x, np.array([0.01]),
            delta_exponent=DELTA_EXPONENT_EMPIRICAL, sigma2=0.16)
        oracle_pairs = type(pairs)(x=pairs.x, y=preds[0])
        err = calibration_error(0.01, split.estimation, oracle_pairs, g, GAUSSIAN,
                                delta_exponent=DELTA_EXPONENT_EMPIRICAL, sigma2=0.16)
        assert err == 0.0

    def test_matches_manual_weighted_sum(self):
        split, g = pipeline_fixture()
        pairs = holdout_grid(split.holdout)
        three = type(pairs)(x=pairs.x[:3], y=pairs.y[:3])
        preds, _ = predictions_over_gammas(
            split.estimation, g, GAUSSIAN, three.x, np.array([0.02]),
            delta_exponent=DELTA_EXPONENT_EMPIRICAL, sigma2=0.16)
        d = holdout_weights(three.x)
        manual = float(np.sum(d * (preds[0] - three.y) ** 2))
        err = calibration_error(0.02, split.estimation, three, g, GAUSSIAN,
                                delta_exponent=DELTA_EXPONENT_EMPIRICAL, sigma2=0.16)
        assert err == pytest.approx(manual, rel=1e-12)

    def test_insufficient_holdout(self):
        split, g = pipeline_fixture()
        pairs = holdout_grid(split.holdout)
        single = type(pairs)(x=pairs.x[:1], y=pairs.y[:1])
        with pytest.raises(InsufficientHoldoutError):
            calibration_error(0.01, split.estimation, single, g, GAUSSIAN)

    def test_gamma_validated(self):
        split, g = pipeline_fixture()
        pairs = holdout_grid(split.holdout)
        with pytest.raises(ValueError):
            calibration_error(0.0, split.estimation, pairs, g, GAUSSIAN)


class TestCalibrate:
    def test_single_gamma_returned(self):
        split, g = pipeline_fixture()
        result = calibrate(split, np.array([0.013]), g, GAUSSIAN, sigma2=0.16)
        assert result.gamma_star == pytest.approx(0.013)
        assert len(result.errors) == 1

    def test_curve_matches_independent_calls(self):
        # the shared gamma-independent cache must not change any value
        split, g = pipeline_fixture()
        gammas = build_gamma_grid(1e-6, 0.03, 5)
        result = calibrate(split, gammas, g, GAUSSIAN,
                           delta_exponent=DELTA_EXPONENT_EMPIRICAL, sigma2=0.16)
        pairs = holdout_grid(split.holdout)
        for gamma, error in zip(result.gammas, result.errors):
            direct = calibration_error(float(gamma), split.estimation, pairs, g,
                                       GAUSSIAN,
                                       delta_exponent=DELTA_EXPONENT_EMPIRICAL,
                                       sigma2=0.16)
            assert error == pytest.approx(direct, rel=1e-12)

    def test_tie_breaks_to_smallest_gamma(self):
        # two gammas tiny enough to induce identical selections everywhere
        split, g = pipeline_fixture()
        result = calibrate(split, np.array([1e-12, 2e-12]), g, GAUSSIAN, sigma2=0.16)
        assert result.errors[0] == result.errors[1]
        assert result.gamma_star == 1e-12

    def test_full_pipeline_smoke(self):
        sample = generate_sample(ProcessSpec(), bump_line, 0.5, 2000 + 200, seed=42)
        split = split_sample(sample, 2000, 100)
        g = known_design_density(2.0)
        gammas = build_gamma_grid(5e-8, 0.05, 21)
        result = calibrate(split, gammas, g, GAUSSIAN,
                           delta_exponent=DELTA_EXPONENT_EMPIRICAL)
        assert result.gamma_star in result.gammas
        assert np.all(np.isfinite(result.errors))


class TestSplit:
    def test_blocks_are_disjoint_and_ordered(self):
        sample = RegressionSample(x=np.arange(10.0), y=np.arange(10.0))
        split = split_sample(sample, 6, 2)
        assert np.array_equal(split.estimation.x, np.arange(6.0))
        assert np.array_equal(split.holdout.x, np.array([8.0, 9.0]))
        assert split.gap == 2

    def test_length_must_match(self):
        sample = RegressionSample(x=np.arange(9.0), y=np.arange(9.0))
        with pytest.raises(ValueError):
            split_sample(sample, 6, 2)
