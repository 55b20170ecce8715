"""Directed-dependence baselines: transfer entropy and Granger causality.

Transfer entropy uses a plug-in estimator over binary histories; its
significance is judged against circular-shift surrogates of the source,
which preserve the marginal and autocorrelation structure while
destroying cross-coupling.  Granger causality compares nested
least-squares autoregressions with an F-test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .direction import Verdict
from .sequences import BinaryEventSequence
from .special import f_survival


@dataclass(frozen=True)
class BaselineVerdict:
    """Direction decision of a baseline detector for one ordered pair."""

    method: str
    direction: Optional[Verdict]
    statistic: float
    reverse_statistic: float
    p_value: Optional[float] = None
    reverse_p_value: Optional[float] = None
    threshold: Optional[float] = None
    reverse_threshold: Optional[float] = None
    degenerate: bool = False

    def to_dict(self) -> dict:
        doc = {
            "method": self.method,
            "direction": self.direction.value if self.direction else "none",
            "statistic": self.statistic,
            "reverse_statistic": self.reverse_statistic,
        }
        for key in ("p_value", "reverse_p_value", "threshold", "reverse_threshold"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        if self.degenerate:
            doc["degenerate"] = True
        return doc


def _binary_values(seq) -> np.ndarray:
    values = seq.values if isinstance(seq, BinaryEventSequence) else seq
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("expected a 1-D sequence")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("transfer entropy expects binary sequences")
    return arr


def _history_code(arr: np.ndarray, depth: int, m: int) -> np.ndarray:
    """Base-2 code of ``(arr(t), ..., arr(t - depth + 1))`` for t in [m-1, T-2]."""
    T = arr.shape[0]
    code = np.zeros(T - m, dtype=np.int64)
    for i in range(depth):
        code += arr[m - 1 - i : T - 1 - i] << i
    return code


def _te_from_codes(target_code: np.ndarray, source_code: np.ndarray, k: int, l: int) -> float:
    """Plug-in transfer entropy from precomputed target/source history codes.

    ``target_code`` packs ``y(t+1)`` (bit 0) with the k-bit history of y;
    ``source_code`` is the l-bit history of x.
    """
    n = target_code.shape[0]
    joint = np.bincount(
        target_code + (source_code << (k + 1)), minlength=1 << (1 + k + l)
    ).reshape(1 << l, 1 << k, 2)
    n_src_hist = joint.sum(axis=2)            # (x-hist, y-hist)
    n_tgt = joint.sum(axis=0)                 # (y-hist, y-next)
    n_hist = n_tgt.sum(axis=1)                # (y-hist,)
    c = joint.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (
            c * n_hist[np.newaxis, :, np.newaxis]
            / (
                n_src_hist[:, :, np.newaxis].astype(float)
                * n_tgt[np.newaxis, :, :].astype(float)
            )
        )
        terms = np.where(c > 0, c * np.log(ratio), 0.0)
    return float(terms.sum() / n)


def _check_te_args(T: int, k: int, l: int) -> None:
    if not (1 <= k <= 4 and 1 <= l <= 4):
        raise ValueError(f"history lengths must be in [1, 4], got k={k}, l={l}")
    required = 10 * (1 << (k + l + 1))
    if T <= required:
        raise ValueError(
            f"transfer entropy with k={k}, l={l} needs more than {required} "
            f"timestamps, got {T}"
        )


def transfer_entropy(x, y, k: int = 1, l: int = 1) -> float:
    """Plug-in transfer entropy from x to y, in nats (non-negative).

    Measures how much the source's l-step history reduces uncertainty
    about the target's next value beyond the target's own k-step history.
    """
    xv, yv = _binary_values(x), _binary_values(y)
    if xv.shape != yv.shape:
        raise ValueError("sequences must have equal length")
    T = xv.shape[0]
    _check_te_args(T, k, l)
    m = max(k, l)
    target_code = yv[m:] + (_history_code(yv, k, m) << 1)
    source_code = _history_code(xv, l, m)
    return _te_from_codes(target_code, source_code, k, l)


def te_direction(
    x,
    y,
    k: int = 1,
    l: int = 1,
    n_permutations: int = 200,
    alpha: float = 0.05,
    rng=None,
) -> BaselineVerdict:
    """Decide a causal direction from surrogate-calibrated transfer entropy.

    Forward when TE(x -> y) exceeds the ``1 - alpha`` quantile of TEs on
    circularly shifted sources and beats TE(y -> x); symmetric for
    backward; otherwise no direction.
    """
    if n_permutations < 100:
        raise ValueError("n_permutations must be at least 100")
    rng = np.random.default_rng(rng)
    xv, yv = _binary_values(x), _binary_values(y)
    if xv.shape != yv.shape:
        raise ValueError("sequences must have equal length")
    T = xv.shape[0]
    _check_te_args(T, k, l)
    m = max(k, l)

    codes = {}
    for label, src, tgt in (("xy", xv, yv), ("yx", yv, xv)):
        codes[label] = (
            tgt[m:] + (_history_code(tgt, k, m) << 1),
            src,
        )
    te_xy = _te_from_codes(codes["xy"][0], _history_code(xv, l, m), k, l)
    te_yx = _te_from_codes(codes["yx"][0], _history_code(yv, l, m), k, l)

    shifts = rng.integers(m + 1, T - m, size=n_permutations)
    null_xy = np.empty(n_permutations)
    null_yx = np.empty(n_permutations)
    for i, shift in enumerate(shifts):
        null_xy[i] = _te_from_codes(
            codes["xy"][0], _history_code(np.roll(xv, shift), l, m), k, l
        )
        null_yx[i] = _te_from_codes(
            codes["yx"][0], _history_code(np.roll(yv, shift), l, m), k, l
        )
    q_xy = float(np.quantile(null_xy, 1.0 - alpha))
    q_yx = float(np.quantile(null_yx, 1.0 - alpha))

    direction = None
    if te_xy > q_xy and te_xy > te_yx:
        direction = Verdict.FORWARD
    elif te_yx > q_yx and te_yx > te_xy:
        direction = Verdict.BACKWARD
    return BaselineVerdict(
        method="te",
        direction=direction,
        statistic=te_xy,
        reverse_statistic=te_yx,
        threshold=q_xy,
        reverse_threshold=q_yx,
    )


# -- Granger causality --------------------------------------------------------

def _granger_rss(target: np.ndarray, source: np.ndarray, p: int) -> tuple[float, float, int]:
    """Residual sums of squares of the restricted and full lag regressions."""
    T = target.shape[0]
    rows = T - p
    y_out = target[p:]
    design = [np.ones(rows)]
    for lag in range(1, p + 1):
        design.append(target[p - lag : T - lag])
    restricted = np.column_stack(design)
    for lag in range(1, p + 1):
        design.append(source[p - lag : T - lag])
    full = np.column_stack(design)

    def rss(mat: np.ndarray) -> float:
        coef, _, _, _ = np.linalg.lstsq(mat, y_out, rcond=None)
        resid = y_out - mat @ coef
        return float(resid @ resid)

    return rss(restricted), rss(full), rows


def _granger_one_way(source: np.ndarray, target: np.ndarray, p: int):
    """F statistic and p-value for 'source improves target's autoregression'."""
    T = target.shape[0]
    rss_r, rss_f, rows = _granger_rss(target, source, p)
    df2 = T - 2 * p - 1
    tiny = 1e-12 * max(float(np.var(target[p:])) * rows, 1e-30)
    if rss_f <= tiny:
        if rss_r <= tiny:
            return None  # own lags already fit perfectly: nothing testable
        return float("inf"), 0.0  # exact fit only with the source's lags
    f_stat = max(0.0, (rss_r - rss_f) / p / (rss_f / df2))
    return f_stat, f_survival(f_stat, p, df2)


def granger(x, y, p: int = 1, alpha: float = 0.05) -> BaselineVerdict:
    """F-test Granger direction decision between two sequences.

    Both orientations are tested; the smaller p-value wins when it is
    below ``alpha``.  Constant sequences make the design singular and
    yield a degenerate no-direction verdict.
    """
    if not 1 <= p <= 8:
        raise ValueError(f"lag order must be in [1, 8], got {p}")
    xv = np.asarray(x.values if isinstance(x, BinaryEventSequence) else x, dtype=float)
    yv = np.asarray(y.values if isinstance(y, BinaryEventSequence) else y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ValueError("sequences must be equal-length vectors")
    T = xv.shape[0]
    if T <= 20 * p:
        raise ValueError(f"Granger test with p={p} needs more than {20 * p} timestamps")
    if np.ptp(xv) == 0 or np.ptp(yv) == 0:
        return BaselineVerdict(
            method="gc", direction=None, statistic=0.0, reverse_statistic=0.0,
            degenerate=True,
        )
    forward = _granger_one_way(xv, yv, p)
    backward = _granger_one_way(yv, xv, p)
    if forward is None or backward is None:
        f_f = forward[0] if forward else 0.0
        f_b = backward[0] if backward else 0.0
        return BaselineVerdict(
            method="gc", direction=None, statistic=f_f, reverse_statistic=f_b,
            degenerate=True,
        )
    (f_xy, p_xy), (f_yx, p_yx) = forward, backward
    direction = None
    if p_xy < alpha and p_xy <= p_yx:
        direction = Verdict.FORWARD
    elif p_yx < alpha and p_yx < p_xy:
        direction = Verdict.BACKWARD
    return BaselineVerdict(
        method="gc",
        direction=direction,
        statistic=f_xy,
        reverse_statistic=f_yx,
        p_value=p_xy,
        reverse_p_value=p_yx,
    )
