"""Standalone affect-math kernels with analytic gradients.

These are the numerical pieces of the affect pipeline, exposed as plain
array operations: the hemispheric lateralization feature, heart-rate
candidate peaks from a power spectrum, the temporal-margin training loss
on per-time class scores, and the label-cleaning loss that mixes an L1
cleaning error with a cross-entropy prediction error.  Every
differentiable kernel ships an analytic gradient that is checked against
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .baselines import transfer_entropy

#: Guard for spectral ratio denominators and for logarithm arguments.
DENOM_GUARD = 1e-9
PROB_CLAMP = 1e-12


# -- Value types ---------------------------------------------------------------

@dataclass(frozen=True)
class SpectralFrame:
    """Band powers of the left/right channels plus asymmetry weights.

    ``zeta_l`` and ``zeta_r`` are non-negative (spectral bins x time
    steps) matrices; ``xi_rl`` weights each cell of the asymmetry ratio.
    """

    zeta_l: np.ndarray
    zeta_r: np.ndarray
    xi_rl: np.ndarray

    def __post_init__(self):
        zl = np.asarray(self.zeta_l, dtype=float)
        zr = np.asarray(self.zeta_r, dtype=float)
        xi = np.asarray(self.xi_rl, dtype=float)
        if not (zl.shape == zr.shape == xi.shape):
            raise ValueError(
                f"shape mismatch: {zl.shape}, {zr.shape}, {xi.shape}"
            )
        if (zl < 0).any() or (zr < 0).any():
            raise ValueError("band powers must be non-negative")
        object.__setattr__(self, "zeta_l", zl)
        object.__setattr__(self, "zeta_r", zr)
        object.__setattr__(self, "xi_rl", xi)


@dataclass(frozen=True)
class FeatureTensor:
    """Stacked (bins x time x 2) feature planes: lateralization and HR mask."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"expected an (M, N, 2) tensor, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("tensor entries must be finite")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class ScoreTrajectory:
    """Per-time class-score distributions with the true class label."""

    scores: np.ndarray
    label: int

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ValueError("scores must be (n_steps, n_classes>=2)")
        if (arr < 0).any() or (arr > 1).any():
            raise ValueError("scores must lie in [0, 1]")
        if np.abs(arr.sum(axis=1) - 1.0).max() > 1e-9:
            raise ValueError("each time step's scores must sum to 1")
        if not 0 <= self.label < arr.shape[1]:
            raise ValueError(f"label {self.label} out of range")
        object.__setattr__(self, "scores", arr)

    def margin(self, t: int) -> float:
        return margin(self.scores, t, self.label)

    def tm_loss(self, lam: int, t: int) -> float:
        return tm_loss(self.scores, lam, t, self.label)


@dataclass(frozen=True)
class LabelVector:
    """Noisy/cleaned/predicted/true label vectors plus the rating mask.

    The supervision target takes the verified label where a rating is
    available and the cleaned label elsewhere.
    """

    noisy: np.ndarray
    cleaned: np.ndarray
    predicted: np.ndarray
    truth: np.ndarray
    available: np.ndarray

    def __post_init__(self):
        arrays = {}
        for name in ("noisy", "cleaned", "predicted", "truth"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a vector")
            if (arr < 0).any() or (arr > 1).any():
                raise ValueError(f"{name} entries must lie in [0, 1]")
            arrays[name] = arr
        mask = np.asarray(self.available, dtype=bool)
        shapes = {a.shape for a in arrays.values()} | {mask.shape}
        if len(shapes) != 1:
            raise ValueError("all label vectors must share one dimension")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "available", mask)

    @property
    def target(self) -> np.ndarray:
        return np.where(self.available, self.truth, self.cleaned)


# -- Lateralization and HR candidates -------------------------------------------

def lateralization_feature(frame, eps_guard: float = DENOM_GUARD) -> np.ndarray:
    """Weighted normalized left/right band-power difference.

    ``B = xi * (zeta_l - zeta_r) / max(zeta_l + zeta_r, eps_guard)``
    elementwise; cells with no power in either channel come out 0.
    """
    if eps_guard <= 0:
        raise ValueError("eps_guard must be positive")
    if not isinstance(frame, SpectralFrame):
        frame = SpectralFrame(*frame)
    denom = np.maximum(frame.zeta_l + frame.zeta_r, eps_guard)
    return frame.xi_rl * (frame.zeta_l - frame.zeta_r) / denom


def hr_candidates(psd, max_peaks: int) -> list[int]:
    """Candidate heart-rate bins: strict local maxima ranked by power.

    Only interior bins strictly greater than both neighbours qualify; the
    list is ordered by descending power (ties by bin index) and truncated
    to ``max_peaks``.  A flat or monotone spectrum has no candidates.
    """
    spectrum = np.asarray(psd, dtype=float)
    if spectrum.ndim != 1 or spectrum.shape[0] < 3:
        raise ValueError("spectrum must be a vector of at least 3 bins")
    if max_peaks < 0:
        raise ValueError("max_peaks must be non-negative")
    interior = np.arange(1, spectrum.shape[0] - 1)
    is_peak = (spectrum[interior] > spectrum[interior - 1]) & (
        spectrum[interior] > spectrum[interior + 1]
    )
    peaks = interior[is_peak]
    ranked = sorted(peaks, key=lambda b: (-spectrum[b], b))
    return [int(b) for b in ranked[:max_peaks]]


def hr_candidate_plane(psd_frames: np.ndarray, max_peaks: int) -> np.ndarray:
    """One-hot candidate masks, one column per time step of a (M, N) PSD."""
    frames = np.asarray(psd_frames, dtype=float)
    if frames.ndim != 2:
        raise ValueError("psd_frames must be (bins, time)")
    plane = np.zeros_like(frames, dtype=np.uint8)
    for col in range(frames.shape[1]):
        for b in hr_candidates(frames[:, col], max_peaks):
            plane[b, col] = 1
    return plane


def build_feature_tensor(b_plane: np.ndarray, h_plane: np.ndarray) -> FeatureTensor:
    b = np.asarray(b_plane, dtype=float)
    h = np.asarray(h_plane, dtype=float)
    if b.shape != h.shape:
        raise ValueError(f"plane shapes differ: {b.shape} vs {h.shape}")
    return FeatureTensor(np.stack([b, h], axis=-1))


def causal_asymmetry_weights(zeta_l, zeta_r, k: int = 1, l: int = 1) -> np.ndarray:
    """Reference constructor for the asymmetry weight matrix.

    Per spectral bin, the left and right band-power series are binarized
    at their medians and the weight is the transfer-entropy difference
    TE(left -> right) - TE(right -> left), constant across the row.  This
    is one replaceable policy; callers may supply any weight matrix.
    """
    zl = np.asarray(zeta_l, dtype=float)
    zr = np.asarray(zeta_r, dtype=float)
    if zl.shape != zr.shape or zl.ndim != 2:
        raise ValueError("band-power matrices must share an (M, N) shape")
    weights = np.zeros(zl.shape)
    for m in range(zl.shape[0]):
        bl = (zl[m] > np.median(zl[m])).astype(np.int64)
        br = (zr[m] > np.median(zr[m])).astype(np.int64)
        weights[m, :] = transfer_entropy(bl, br, k, l) - transfer_entropy(br, bl, k, l)
    return weights


# -- Temporal-margin loss -------------------------------------------------------

def _unpack_scores(scores, label: Optional[int]):
    if isinstance(scores, ScoreTrajectory):
        return scores.scores, scores.label
    if label is None:
        raise ValueError("label is required with a raw score array")
    arr = np.asarray(scores, dtype=float)
    if arr.ndim != 2:
        raise ValueError("scores must be a 2-D (n_steps, n_classes) array")
    return arr, int(label)


def margin(scores, t: int, label: Optional[int] = None) -> float:
    """Discriminative margin: true-class score minus the best other class."""
    arr, y = _unpack_scores(scores, label)
    if arr.shape[1] < 2:
        raise ValueError("margin needs at least 2 classes")
    if not 0 <= t < arr.shape[0]:
        raise IndexError(f"t={t} outside the trajectory")
    row = arr[t]
    others = np.delete(row, y)
    return float(row[y] - others.max())


def _check_lambda(lam) -> int:
    if isinstance(lam, bool) or not isinstance(lam, (int, np.integer)) or lam < 1:
        raise ValueError(f"lambda must be a positive integer, got {lam!r}")
    return int(lam)


def tm_loss(scores, lam: int, t: int, label: Optional[int] = None) -> float:
    """Cross-entropy plus a hinge on any drop of the running-max margin.

    ``L_t = -ln s_t(y) + lam * max(0, max_{t' < t} m_{t'}(y) - m_t(y))``.
    Requires ``t`` past the trajectory start and a positive true-class
    score.
    """
    arr, y = _unpack_scores(scores, label)
    lam = _check_lambda(lam)
    if t < 1 or t >= arr.shape[0]:
        raise IndexError(f"t={t} must be inside (0, {arr.shape[0]})")
    s_ty = arr[t, y]
    if s_ty <= 0.0:
        raise ValueError(f"true-class score is 0 at t={t}: loss is unbounded")
    margins = [margin(arr, u, y) for u in range(t + 1)]
    hinge = max(0.0, max(margins[:-1]) - margins[-1])
    return float(-np.log(max(s_ty, PROB_CLAMP)) + lam * hinge)


def tm_loss_gradient(scores, lam: int, t: int, label: Optional[int] = None) -> np.ndarray:
    """Analytic partials of the temporal-margin loss w.r.t. the scores at t.

    The cross-entropy term contributes ``-1/s_t(y)`` on the true class;
    an active hinge adds ``-lam`` on the true class and ``+lam`` on the
    runner-up.  At the hinge kink the inactive-side subgradient (zero) is
    chosen.
    """
    arr, y = _unpack_scores(scores, label)
    lam = _check_lambda(lam)
    if t < 1 or t >= arr.shape[0]:
        raise IndexError(f"t={t} must be inside (0, {arr.shape[0]})")
    s_ty = arr[t, y]
    if s_ty <= 0.0:
        raise ValueError(f"true-class score is 0 at t={t}: loss is unbounded")
    grad = np.zeros(arr.shape[1])
    grad[y] = -1.0 / s_ty
    running = max(margin(arr, u, y) for u in range(t))
    if running - margin(arr, t, y) > 0.0:
        others = np.delete(arr[t], y)
        runner_up = int(np.argmax(others))
        if runner_up >= y:
            runner_up += 1
        grad[y] -= lam
        grad[runner_up] += lam
    return grad


# -- Label-cleaning loss --------------------------------------------------------

def _lc_arrays(cleaned, truth, predicted, target):
    arrays = [np.asarray(a, dtype=float) for a in (cleaned, truth, predicted, target)]
    if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
        raise ValueError("label vectors must share one dimension")
    return arrays


def lc_loss(cleaned, truth, predicted, target) -> float:
    """L1 cleaning error plus cross-entropy of predictions against targets.

    ``L = sum |cleaned - truth| - sum [u ln p + (1-u) ln(1-p)]`` with
    predictions clamped away from 0/1 so boundary targets stay finite.
    """
    y_bar, y, y_hat, u = _lc_arrays(cleaned, truth, predicted, target)
    p = np.clip(y_hat, PROB_CLAMP, 1.0 - PROB_CLAMP)
    l1 = np.abs(y_bar - y).sum()
    ce = -(u * np.log(p) + (1.0 - u) * np.log1p(-p)).sum()
    return float(l1 + ce)


def lc_loss_gradients(cleaned, truth, predicted, target) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the label-cleaning loss.

    The L1 block flows only to the cleaned labels (sign subgradient, zero
    at ties) and the cross-entropy block only to the predictions; the
    supervision target is a constant.
    """
    y_bar, y, y_hat, u = _lc_arrays(cleaned, truth, predicted, target)
    p = np.clip(y_hat, PROB_CLAMP, 1.0 - PROB_CLAMP)
    d_cleaned = np.sign(y_bar - y)
    d_predicted = -u / p + (1.0 - u) / (1.0 - p)
    return d_cleaned, d_predicted


# -- Self-check suite ------------------------------------------------------------

def _central_difference(fn, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x, dtype=float)
    for i in range(x.size):
        bumped = x.copy()
        bumped.flat[i] += h
        hi = fn(bumped)
        bumped.flat[i] -= 2 * h
        lo = fn(bumped)
        grad.flat[i] = (hi - lo) / (2 * h)
    return grad


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(analytic).max()))
    return float(np.abs(analytic - numeric).max() / scale)


def _random_trajectory(rng: np.random.Generator):
    """Scores away from hinge kinks and runner-up ties, for clean differences."""
    while True:
        n_steps = int(rng.integers(3, 7))
        n_classes = int(rng.integers(2, 6))
        raw = rng.random((n_steps, n_classes)) + 0.1
        scores = raw / raw.sum(axis=1, keepdims=True)
        label = int(rng.integers(0, n_classes))
        t = n_steps - 1
        margins = [margin(scores, u, label) for u in range(t + 1)]
        hinge_arg = max(margins[:-1]) - margins[-1]
        others = np.delete(scores[t], label)
        gap = np.ptp(others) if others.size > 1 else 1.0
        if abs(hinge_arg) > 1e-4 and (others.size < 2 or gap > 1e-4):
            return scores, label, t


def run_kernel_checks(seed: int = 0, n_random: int = 100, tolerance: float = 1e-5) -> dict:
    """Run the kernel invariant and gradient-check suite; return a report."""
    rng = np.random.default_rng(seed)
    checks = []

    def record(name: str, passed: bool, detail: str = ""):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    zl = rng.random((6, 8)) * 3.0
    zr = rng.random((6, 8)) * 3.0
    xi = rng.standard_normal((6, 8))
    b = lateralization_feature(SpectralFrame(zl, zr, xi))
    b_swapped = lateralization_feature(SpectralFrame(zr, zl, xi))
    record(
        "lateralization_antisymmetry",
        np.array_equal(b, -b_swapped),
        "swapping hemispheres must negate every entry exactly",
    )
    record(
        "lateralization_bounded_by_weights",
        bool((np.abs(b) <= np.abs(xi) + 1e-12).all()),
        "the normalized ratio has magnitude at most 1",
    )

    hand = tm_loss(np.array([[0.5, 0.5], [0.55, 0.45], [0.6, 0.4]]), 1, 2, 0)
    record(
        "tm_loss_monotone_margin_reduces_to_cross_entropy",
        abs(hand - (-np.log(0.6))) < 1e-12,
        "hinge stays inactive while the margin is non-decreasing",
    )

    worst_tm = 0.0
    for _ in range(n_random):
        scores, label, t = _random_trajectory(rng)
        lam = int(rng.integers(1, 4))
        analytic = tm_loss_gradient(scores, lam, t, label)

        def loss_of_row(row, scores=scores, lam=lam, t=t, label=label):
            bumped = scores.copy()
            bumped[t] = row
            return tm_loss(bumped, lam, t, label)

        numeric = _central_difference(loss_of_row, scores[t].copy())
        worst_tm = max(worst_tm, _relative_error(analytic, numeric))
    record(
        "tm_loss_gradient_matches_finite_differences",
        worst_tm <= tolerance,
        f"worst relative error {worst_tm:.3e} over {n_random} random inputs",
    )

    worst_lc = 0.0
    for _ in range(n_random):
        d = int(rng.integers(1, 8))
        y_bar = rng.uniform(0.05, 0.95, size=d)
        y = rng.uniform(0.05, 0.95, size=d)
        y_hat = rng.uniform(0.05, 0.95, size=d)
        u = rng.uniform(0.0, 1.0, size=d)
        d_pred = lc_loss_gradients(y_bar, y, y_hat, u)[1]
        numeric = _central_difference(lambda p: lc_loss(y_bar, y, p, u), y_hat.copy())
        worst_lc = max(worst_lc, _relative_error(d_pred, numeric))
    record(
        "lc_loss_prediction_gradient_matches_finite_differences",
        worst_lc <= tolerance,
        f"worst relative error {worst_lc:.3e} over {n_random} random inputs",
    )

    lc_hand = lc_loss([0.3], [1.0], [0.5], [1.0])
    record(
        "lc_loss_hand_value",
        abs(lc_hand - (0.7 + np.log(2.0))) < 1e-9,
        "|0.3-1| - ln 0.5 = 0.7 + ln 2",
    )

    record(
        "hr_candidates_ranking",
        hr_candidates([0.0, 2.0, 0.0, 5.0, 0.0], max_peaks=1) == [3],
        "the higher peak wins under truncation",
    )

    return {"checks": checks, "passed": all(c["passed"] for c in checks)}
