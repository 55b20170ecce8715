"""G-squared conditional-independence testing on 3-D contingency tables.

Counts are indexed ``counts[o, p, q]``: the number of samples with the
first variable in state ``o``, the second in state ``p`` and the
conditioning composite state ``q``.  Expected counts under conditional
independence come from the per-slice marginals, the statistic is the
likelihood-ratio G² against those expectations, and the chi-square
degrees of freedom are penalized by the number of zero-count cells to
counteract sparse tables.

Degenerate contrasts: a table whose penalized degrees of freedom reach 0
yields p = 1 when G² is exactly 0 (nothing to test, treated as
independent) and p = 0 when G² > 0 (the observed deviation cannot be
explained by any remaining free cell, treated as dependent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import chi2_survival


@dataclass(frozen=True)
class ContingencyTable3D:
    """Non-negative integer counts over a (2, 2, K)-style grid."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.ndim != 3:
            raise ValueError(f"counts must be 3-D, got shape {arr.shape}")
        if (arr < 0).any():
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(self.counts.shape)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContingencyTable3D):
            return NotImplemented
        return self.counts.shape == other.counts.shape and bool(
            np.array_equal(self.counts, other.counts)
        )


@dataclass(frozen=True)
class CiVerdict:
    g2: float
    df: int
    p_value: float
    independent: bool

    def to_dict(self) -> dict:
        return {
            "g2": self.g2,
            "df": self.df,
            "p_value": self.p_value,
            "independent": self.independent,
        }


def build_contingency(a_i, a_j, a_k, n_i: int = 2, n_j: int = 2, n_k: int | None = None) -> ContingencyTable3D:
    """Count triplet samples ``(a_i(t), a_j(t), a_k(t))`` into a 3-D table.

    ``n_k`` fixes the conditioning cardinality (e.g. ``2**eta`` for a
    window state); when omitted it is inferred from the data.
    """
    a_i = np.asarray(a_i, dtype=np.int64)
    a_j = np.asarray(a_j, dtype=np.int64)
    a_k = np.asarray(a_k, dtype=np.int64)
    if not (a_i.shape == a_j.shape == a_k.shape) or a_i.ndim != 1:
        raise ValueError(
            f"samples must be three equal-length vectors, got shapes "
            f"{a_i.shape}, {a_j.shape}, {a_k.shape}"
        )
    if a_i.size == 0:
        raise ValueError("no samples to tabulate")
    if n_k is None:
        n_k = int(a_k.max()) + 1
    for name, arr, n in (("a_i", a_i, n_i), ("a_j", a_j, n_j), ("a_k", a_k, n_k)):
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError(f"{name} states out of range [0, {n})")
    code = (a_k * n_j + a_j) * n_i + a_i
    flat = np.bincount(code, minlength=n_i * n_j * n_k)
    counts = flat.reshape(n_k, n_j, n_i).transpose(2, 1, 0)
    return ContingencyTable3D(counts)


def expected_counts(table: ContingencyTable3D) -> np.ndarray:
    """Expected cell counts under conditional independence within each slice.

    ``E[o, p, q] = C(., p, q) * C(o, ., q) / C(., ., q)``; slices with no
    samples are defined to have expectation 0 everywhere.
    """
    counts = table.counts.astype(float)
    row = counts.sum(axis=1, keepdims=True)      # C(o, ., q)
    col = counts.sum(axis=0, keepdims=True)      # C(., p, q)
    tot = counts.sum(axis=(0, 1), keepdims=True)  # C(., ., q)
    safe_tot = np.where(tot > 0, tot, 1.0)
    expected = row * col / safe_tot
    return np.where(tot > 0, expected, 0.0)


def g2_statistic(table: ContingencyTable3D) -> float:
    """Likelihood-ratio statistic 2 * sum C * ln(C / E), zero cells excluded."""
    counts = table.counts.astype(float)
    expected = expected_counts(table)
    mask = counts > 0
    # E > 0 wherever C > 0: both marginals of a non-empty cell are positive.
    terms = np.zeros_like(counts)
    terms[mask] = counts[mask] * np.log(counts[mask] / expected[mask])
    return float(2.0 * terms.sum())


def degrees_of_freedom(table: ContingencyTable3D) -> int:
    """Zero-cell-penalized degrees of freedom, floored at 0.

    The nominal chi-square df ``(n_i - 1) * (n_j - 1) * n_k`` is reduced
    by the number of zero-count cells across the full table.
    """
    n_i, n_j, n_k = table.dims
    nominal = (n_i - 1) * (n_j - 1) * n_k
    zero_cells = int(np.count_nonzero(table.counts == 0))
    return max(0, nominal - zero_cells)


def ci_test(a_i, a_j, conditioning=None, alpha: float = 0.05, n_k: int | None = None) -> CiVerdict:
    """Test whether two samples are independent given a conditioning state.

    With ``conditioning=None`` the test is marginal (single conditioning
    slice).  Independence is declared when the chi-square upper-tail
    probability of G² at the penalized df exceeds ``alpha``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    a_i = np.asarray(a_i, dtype=np.int64)
    if conditioning is None:
        conditioning = np.zeros(a_i.shape[0], dtype=np.int64)
        n_k = 1
    table = build_contingency(a_i, a_j, conditioning, n_k=n_k)
    g2 = g2_statistic(table)
    df = degrees_of_freedom(table)
    if df == 0:
        # No free cells left: only an exactly-zero statistic (up to float
        # noise) is an empty contrast; any real deviation is dependence.
        p_value = 1.0 if g2 <= 1e-9 else 0.0
    else:
        p_value = chi2_survival(g2, df)
    return CiVerdict(g2=g2, df=df, p_value=p_value, independent=p_value > alpha)
