"""Affect-math kernels: lateralization, peaks, losses, gradients."""

import math

import numpy as np
import pytest

from affectcausal import (
    LabelVector,
    ScoreTrajectory,
    SpectralFrame,
    build_feature_tensor,
    causal_asymmetry_weights,
    hr_candidate_plane,
    hr_candidates,
    lateralization_feature,
    lc_loss,
    lc_loss_gradients,
    margin,
    run_kernel_checks,
    tm_loss,
    tm_loss_gradient,
)
from affectcausal.kernels import _central_difference


class TestLateralization:
    def test_symmetric_hemispheres_zero(self):
        z = np.full((3, 4), 2.0)
        xi = np.ones((3, 4))
        assert np.all(lateralization_feature(SpectralFrame(z, z.copy(), xi)) == 0.0)

    def test_hand_value(self):
        frame = SpectralFrame([[3.0]], [[1.0]], [[1.0]])
        assert lateralization_feature(frame)[0, 0] == pytest.approx(0.5, abs=1e-15)

    def test_swap_negates_exactly(self):
        rng = np.random.default_rng(0)
        zl, zr = rng.random((5, 6)) * 4, rng.random((5, 6)) * 4
        xi = rng.standard_normal((5, 6))
        b = lateralization_feature(SpectralFrame(zl, zr, xi))
        b_swapped = lateralization_feature(SpectralFrame(zr, zl, xi))
        assert np.array_equal(b, -b_swapped)

    def test_bounded_by_weights(self):
        rng = np.random.default_rng(1)
        zl, zr = rng.random((4, 4)), rng.random((4, 4))
        xi = rng.standard_normal((4, 4)) * 3
        b = lateralization_feature(SpectralFrame(zl, zr, xi))
        assert np.all(np.abs(b) <= np.abs(xi) + 1e-12)

    def test_double_zero_power_is_zero_not_error(self):
        frame = SpectralFrame([[0.0]], [[0.0]], [[5.0]])
        assert lateralization_feature(frame)[0, 0] == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            SpectralFrame(np.ones((2, 2)), np.ones((2, 3)), np.ones((2, 2)))

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            SpectralFrame(-np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)))


class TestHrCandidates:
    def test_single_triangular_peak(self):
        assert hr_candidates([0, 1, 3, 1, 0, 0], max_peaks=4) == [2]

    def test_two_peaks_truncated_to_strongest(self):
        psd = [0, 5, 0, 9, 0]
        assert hr_candidates(psd, max_peaks=1) == [3]
        assert hr_candidates(psd, max_peaks=2) == [3, 1]

    def test_monotone_spectrum_empty(self):
        assert hr_candidates([1, 2, 3, 4, 5], max_peaks=3) == []

    def test_flat_spectrum_empty(self):
        assert hr_candidates([2, 2, 2, 2], max_peaks=3) == []

    def test_short_spectrum_rejected(self):
        with pytest.raises(ValueError):
            hr_candidates([1, 2], max_peaks=1)

    def test_candidate_plane_one_hot(self):
        frames = np.array([[0.0, 1.0], [3.0, 0.5], [0.0, 2.0], [1.0, 0.0]])
        plane = hr_candidate_plane(frames, max_peaks=1)
        assert plane[1, 0] == 1 and plane.sum(axis=0)[0] == 1
        assert plane[2, 1] == 1

    def test_feature_tensor_shape(self):
        b = np.zeros((4, 6))
        h = np.ones((4, 6))
        tensor = build_feature_tensor(b, h)
        assert tensor.values.shape == (4, 6, 2)
        with pytest.raises(ValueError):
            build_feature_tensor(b, np.ones((4, 5)))


class TestMargin:
    def test_hand_cases(self):
        scores = np.array([[0.7, 0.2, 0.1]])
        assert margin(scores, 0, 0) == pytest.approx(0.5, abs=1e-12)
        uniform = np.array([[1 / 3, 1 / 3, 1 / 3]])
        assert margin(uniform, 0, 0) == pytest.approx(0.0, abs=1e-12)
        wrong = np.array([[0.2, 0.8]])
        assert margin(wrong, 0, 0) == pytest.approx(-0.6, abs=1e-12)

    def test_needs_two_classes(self):
        with pytest.raises(ValueError):
            margin(np.array([[1.0]]), 0, 0)


class TestTmLoss:
    def test_monotone_margins_reduce_to_cross_entropy(self):
        scores = np.array([[0.5, 0.5], [0.55, 0.45], [0.6, 0.4]])
        assert tm_loss(scores, 1, 2, 0) == pytest.approx(-math.log(0.6), abs=1e-12)

    def test_hand_value(self):
        # margins 0.5, 0.6, 0.4 with true-class score 0.6 at the last step
        scores = np.array([
            [0.75, 0.25],
            [0.80, 0.20],
            [0.60, 0.20],
        ])
        value = tm_loss(scores, 1, 2, 0)
        assert value == pytest.approx(-math.log(0.6) + 0.2, abs=1e-9)
        assert value == pytest.approx(0.7108256237659907, abs=1e-9)

    def test_lambda_must_be_positive_integer(self):
        scores = np.array([[0.6, 0.4], [0.6, 0.4]])
        for bad in (0, -1, 1.5, True):
            with pytest.raises(ValueError):
                tm_loss(scores, bad, 1, 0)

    def test_zero_score_domain_error(self):
        scores = np.array([[0.5, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError):
            tm_loss(scores, 1, 1, 0)

    def test_requires_history(self):
        scores = np.array([[0.5, 0.5], [0.6, 0.4]])
        with pytest.raises(IndexError):
            tm_loss(scores, 1, 0, 0)

    def test_non_negative_and_zero_only_at_certainty(self):
        scores = np.array([[0.4, 0.6], [1.0, 0.0]])
        assert tm_loss(scores, 1, 1, 0) == pytest.approx(0.0, abs=1e-12)
        rng = np.random.default_rng(0)
        for _ in range(50):
            raw = rng.random((3, 3)) + 0.05
            raw /= raw.sum(axis=1, keepdims=True)
            assert tm_loss(raw, 2, 2, 1) >= 0.0

    def test_hinge_inactive_when_margin_attains_running_max(self):
        scores = np.array([[0.6, 0.4], [0.7, 0.3]])
        assert tm_loss(scores, 3, 1, 0) == pytest.approx(-math.log(0.7), abs=1e-12)

    def test_monotone_in_current_margin(self):
        losses = []
        for m_now in (0.5, 0.3, 0.1):
            s = (1 + m_now) / 2
            scores = np.array([[0.8, 0.2], [s, 1 - s]])
            losses.append(tm_loss(scores, 1, 1, 0) + math.log(s))
        assert losses[0] <= losses[1] <= losses[2]

    def test_trajectory_type_delegates(self):
        traj = ScoreTrajectory(np.array([[0.5, 0.5], [0.6, 0.4]]), 0)
        assert traj.tm_loss(1, 1) == tm_loss(traj.scores, 1, 1, 0)
        assert traj.margin(1) == pytest.approx(0.2)


class TestTmLossGradient:
    def test_hinge_inactive_gradient(self):
        scores = np.array([[0.5, 0.5], [0.6, 0.4]])
        grad = tm_loss_gradient(scores, 1, 1, 0)
        assert grad[0] == pytest.approx(-1 / 0.6, abs=1e-12)
        assert grad[1] == 0.0

    def test_hinge_active_gradient(self):
        scores = np.array([[0.9, 0.1], [0.55, 0.45]])
        lam = 2
        grad = tm_loss_gradient(scores, lam, 1, 0)
        assert grad[0] == pytest.approx(-1 / 0.55 - lam, abs=1e-12)
        assert grad[1] == pytest.approx(lam, abs=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(12)
        worst = 0.0
        for _ in range(100):
            n_steps = int(rng.integers(2, 6))
            n_classes = int(rng.integers(2, 5))
            raw = rng.random((n_steps, n_classes)) + 0.1
            scores = raw / raw.sum(axis=1, keepdims=True)
            label = int(rng.integers(n_classes))
            t = n_steps - 1
            margins = [margin(scores, u, label) for u in range(t + 1)]
            others = np.delete(scores[t], label)
            if abs(max(margins[:-1]) - margins[-1]) < 1e-4:
                continue
            if others.size > 1 and np.ptp(np.sort(others)[-2:]) < 1e-4:
                continue
            analytic = tm_loss_gradient(scores, 1, t, label)

            def f(row):
                bumped = scores.copy()
                bumped[t] = row
                return tm_loss(bumped, 1, t, label)

            numeric = _central_difference(f, scores[t].copy())
            scale = max(1.0, float(np.abs(analytic).max()))
            worst = max(worst, float(np.abs(analytic - numeric).max()) / scale)
        assert worst <= 1e-5


class TestLcLoss:
    def test_hand_value(self):
        value = lc_loss([0.3], [1.0], [0.5], [1.0])
        assert value == pytest.approx(0.7 - math.log(0.5), abs=1e-9)
        assert value == pytest.approx(1.3931471805599452, abs=1e-9)

    def test_perfect_cleaning_and_prediction(self):
        u = np.array([1.0, 0.0, 1.0])
        assert lc_loss(u, u, u, u) == pytest.approx(0.0, abs=1e-9)

    def test_decomposition_cleaning_block(self):
        # prediction perfect: the loss is the pure L1 cleaning error
        u = np.array([1.0, 0.0])
        value = lc_loss([0.8, 0.1], [1.0, 0.0], u, u)
        assert value == pytest.approx(0.3, abs=1e-9)

    def test_decomposition_prediction_block(self):
        # cleaning perfect: the loss is pure cross-entropy
        y = np.array([1.0, 0.0])
        value = lc_loss(y, y, [0.9, 0.2], y)
        assert value == pytest.approx(-math.log(0.9) - math.log(0.8), abs=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(100):
            d = int(rng.integers(1, 7))
            y_bar = rng.uniform(0.05, 0.95, d)
            y = rng.uniform(0.05, 0.95, d)
            y_hat = rng.uniform(0.05, 0.95, d)
            u = rng.uniform(0.0, 1.0, d)
            analytic = lc_loss_gradients(y_bar, y, y_hat, u)[1]
            numeric = _central_difference(lambda p: lc_loss(y_bar, y, p, u), y_hat.copy())
            scale = max(1.0, float(np.abs(analytic).max()))
            worst = max(worst, float(np.abs(analytic - numeric).max()) / scale)
        assert worst <= 1e-5

    def test_cleaning_gradient_is_sign(self):
        d_cleaned, _ = lc_loss_gradients([0.8, 0.1], [0.5, 0.5], [0.5, 0.5], [1, 0])
        assert list(d_cleaned) == [1.0, -1.0]

    def test_boundary_predictions_clamped_finite(self):
        value = lc_loss([1.0], [1.0], [0.0], [1.0])
        assert math.isfinite(value) and value > 20

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lc_loss([0.5], [0.5, 0.5], [0.5], [0.5])


class TestLabelVector:
    def test_target_prefers_truth_when_available(self):
        lv = LabelVector(
            noisy=[0.2, 0.9], cleaned=[0.4, 0.6], predicted=[0.5, 0.5],
            truth=[1.0, 0.0], available=[True, False],
        )
        assert list(lv.target) == [1.0, 0.6]

    def test_domain_check(self):
        with pytest.raises(ValueError):
            LabelVector([1.5], [0.5], [0.5], [0.5], [True])


class TestScoreTrajectory:
    def test_rows_must_be_distributions(self):
        with pytest.raises(ValueError):
            ScoreTrajectory(np.array([[0.7, 0.2]]), 0)

    def test_label_range(self):
        with pytest.raises(ValueError):
            ScoreTrajectory(np.array([[0.5, 0.5]]), 2)


class TestAsymmetryWeights:
    def test_directional_coupling_signs_weight(self):
        rng = np.random.default_rng(6)
        n = 600
        left = rng.random((2, n))
        right = np.zeros_like(left)
        right[:, 1:] = left[:, :-1]  # right follows left
        weights = causal_asymmetry_weights(left, right + rng.random((2, n)) * 0.1)
        assert weights.shape == (2, n)
        assert np.all(weights[:, 0] == weights[:, 1])  # constant per row
        assert (weights[:, 0] > 0).all()


def test_kernel_check_suite_passes():
    report = run_kernel_checks(seed=0, n_random=40)
    assert report["passed"], report
    assert {c["name"] for c in report["checks"]} >= {
        "lateralization_antisymmetry",
        "tm_loss_gradient_matches_finite_differences",
    }
