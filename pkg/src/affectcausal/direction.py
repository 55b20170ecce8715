"""Asymmetric causal-direction learning between event-sequence pairs.

For a candidate pair (situation C, emotion M) two screening statements
are evaluated by scanning window depths ``eta = 1..eta_max``:

* source side (``s1``): at some depth, C(t) is independent of M(t-1)
  given the composite state of C's own recent window;
* target side (``s2``): at some depth, M(t) is independent of C(t-1)
  given M's own recent window.

A genuine cause's own history screens it from the lagged effect while
the effect stays dependent on the lagged cause, so ``s1 and not s2``
reads as forward causation, ``not s1 and s2`` as backward causation, and
the two symmetric patterns as an unobserved common factor.

Pairs enter direction learning only after dependence screening: the pair
must be lag-dependent marginally and no single third sequence's window
may render both lag alignments independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .citest import build_contingency, ci_test, degrees_of_freedom, g2_statistic
from .graph import CausalGraph, Edge, EdgeKind
from .special import chi2_survival
from .sequences import (
    BinaryEventSequence,
    SequenceBundle,
    encode_window_series,
    require_valid,
)

#: Default depth of the window scan.  Shallow windows keep the
#: contingency tables dense at daily-life horizons; deeper windows starve
#: the slices and add multiple-testing noise to the exists-a-depth scan
#: (no correction is applied across depths, so each extra depth is one
#: more chance to accept independence by fluke).
DEFAULT_ETA_MAX = 3

#: A window depth is only tested when it has at least this many samples
#: per conditioning state on average.
MIN_SAMPLES_PER_STATE = 8


class Verdict(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    LATENT = "latent"


def verdict_from_flags(s1: bool, s2: bool) -> Verdict:
    """Map the two screening outcomes onto a causal verdict."""
    if s1 and not s2:
        return Verdict.FORWARD
    if s2 and not s1:
        return Verdict.BACKWARD
    return Verdict.LATENT


@dataclass(frozen=True)
class EtaTestRecord:
    """Audit entry for one window depth of a screening scan."""

    eta: int
    skipped: bool
    reason: Optional[str] = None
    g2: Optional[float] = None
    df: Optional[int] = None
    p_value: Optional[float] = None
    independent: Optional[bool] = None

    def to_dict(self) -> dict:
        doc = {"eta": self.eta, "skipped": self.skipped}
        if self.skipped:
            doc["reason"] = self.reason
        else:
            doc.update(
                g2=self.g2, df=self.df, p_value=self.p_value,
                independent=self.independent,
            )
        return doc


@dataclass(frozen=True)
class SideResult:
    """Outcome of one side's exists-a-depth independence scan."""

    exists: bool
    witness: Optional[int]
    records: tuple

    @property
    def all_skipped(self) -> bool:
        return all(r.skipped for r in self.records)


def _self_window_scan(own: np.ndarray, other: np.ndarray, eta_max: int, alpha: float) -> SideResult:
    """Scan depths testing own(t) vs other(t-1) given own's window state."""
    T = own.shape[0]
    records = []
    exists = False
    witness = None
    for eta in range(1, eta_max + 1):
        n_states = 1 << eta
        n_samples = T - eta
        needed = MIN_SAMPLES_PER_STATE * n_states
        if n_samples < needed:
            records.append(EtaTestRecord(
                eta=eta, skipped=True,
                reason=f"insufficient samples: need {needed}, have {n_samples}",
            ))
            continue
        verdict = ci_test(
            own[eta:],
            other[eta - 1 : T - 1],
            encode_window_series(own, eta),
            alpha=alpha,
            n_k=n_states,
        )
        records.append(EtaTestRecord(
            eta=eta, skipped=False, g2=verdict.g2, df=verdict.df,
            p_value=verdict.p_value, independent=verdict.independent,
        ))
        if verdict.independent and not exists:
            exists = True
            witness = eta
    return SideResult(exists=exists, witness=witness, records=tuple(records))


def source_side_test(cause, effect, eta_max: int = DEFAULT_ETA_MAX, alpha: float = 0.05) -> SideResult:
    """Does the candidate cause's own history screen it from the lagged effect?

    True (``s1``) when some depth ``eta_c`` makes cause(t) independent of
    effect(t-1) given the cause's own window state.
    """
    _check_scan_args(cause, effect, eta_max)
    return _self_window_scan(_seq_values(cause), _seq_values(effect), eta_max, alpha)


def target_side_test(effect, cause, eta_max: int = DEFAULT_ETA_MAX, alpha: float = 0.05) -> SideResult:
    """Role-swapped screen: effect(t) vs cause(t-1) given the effect's window."""
    _check_scan_args(effect, cause, eta_max)
    return _self_window_scan(_seq_values(effect), _seq_values(cause), eta_max, alpha)


def _check_scan_args(a, b, eta_max):
    if not 1 <= eta_max <= 8:
        raise ValueError(f"eta_max must be in [1, 8], got {eta_max}")
    va, vb = _seq_values(a), _seq_values(b)
    if va.shape != vb.shape:
        raise ValueError("sequences must share the grid")
    if va.shape[0] <= eta_max + 1:
        raise ValueError(f"horizon {va.shape[0]} too short for eta_max={eta_max}")


def _seq_values(seq) -> np.ndarray:
    if isinstance(seq, BinaryEventSequence):
        return np.asarray(seq.values, dtype=np.int64)
    return np.asarray(seq, dtype=np.int64)


@dataclass(frozen=True)
class DirectionResult:
    """Verdict for one screened pair, with the full per-depth audit."""

    situation: str
    emotion: str
    s1: bool
    s2: bool
    eta_c: Optional[int]
    eta_m: Optional[int]
    verdict: Verdict
    s1_records: tuple = field(default=())
    s2_records: tuple = field(default=())

    @property
    def testable(self) -> bool:
        return not (
            all(r.skipped for r in self.s1_records)
            or all(r.skipped for r in self.s2_records)
        )

    def to_dict(self) -> dict:
        return {
            "situation": self.situation,
            "emotion": self.emotion,
            "s1": self.s1,
            "s2": self.s2,
            "eta_c": self.eta_c,
            "eta_m": self.eta_m,
            "verdict": self.verdict.value,
            "s1_audit": [r.to_dict() for r in self.s1_records],
            "s2_audit": [r.to_dict() for r in self.s2_records],
        }


def learn_direction(c_i, m_j, alpha: float = 0.05, eta_max: int = DEFAULT_ETA_MAX) -> DirectionResult:
    """Run both screening scans on a pair and map the flags to a verdict."""
    s1 = source_side_test(c_i, m_j, eta_max=eta_max, alpha=alpha)
    s2 = target_side_test(m_j, c_i, eta_max=eta_max, alpha=alpha)
    return DirectionResult(
        situation=c_i.name if isinstance(c_i, BinaryEventSequence) else "C",
        emotion=m_j.name if isinstance(m_j, BinaryEventSequence) else "M",
        s1=s1.exists,
        s2=s2.exists,
        eta_c=s1.witness,
        eta_m=s2.witness,
        verdict=verdict_from_flags(s1.exists, s2.exists),
        s1_records=s1.records,
        s2_records=s2.records,
    )


# -- Dependence screening ----------------------------------------------------

#: The screening level is this fraction of alpha.  Screening feeds the
#: direction stage, where a false pair almost always lands on the latent
#: verdict, so its false-positive budget is kept well below the per-test
#:  level used inside the direction scans.
SCREEN_LEVEL_FACTOR = 0.1


def pair_dependence_pvalue(a, b, cond=None, n_k: int | None = None) -> float:
    """Pooled dependence p-value of a pair, optionally conditioned.

    Sums the G² statistics and penalized degrees of freedom of the three
    lag alignments (synchronous, a(t) vs b(t-1), b(t) vs a(t-1)) into one
    chi-square test, so dependence spread over the alignments is caught
    with a single test-level spend.  ``cond`` is a window-state series
    aligned to the trailing timestamps (None for a marginal test).
    """
    a = _seq_values(a)
    b = _seq_values(b)
    T = a.shape[0]
    start = 1 if cond is None else T - cond.shape[0]
    if cond is None:
        cond_states = np.zeros(T - start, dtype=np.int64)
        n_k = 1
    else:
        cond_states = np.asarray(cond)
    alignments = (
        (a[start:], b[start:]),
        (a[start:], b[start - 1 : T - 1]),
        (b[start:], a[start - 1 : T - 1]),
    )
    g2_total = 0.0
    df_total = 0
    for first, second in alignments:
        table = build_contingency(first, second, cond_states, n_k=n_k)
        g2_total += g2_statistic(table)
        df_total += degrees_of_freedom(table)
    if df_total == 0:
        return 1.0 if g2_total <= 1e-9 else 0.0
    return chi2_survival(g2_total, df_total)


def pair_marginally_dependent(a, b, alpha: float = 0.05) -> bool:
    """Marginal pair dependence at the conservative screening level."""
    return pair_dependence_pvalue(a, b) < alpha * SCREEN_LEVEL_FACTOR


def deep_dependence_pvalue(a, b, max_lag: int) -> float:
    """Smallest two-sided dependence p-value over lags ``0..max_lag``.

    Used to decide whether a third sequence is related to a pair member at
    all: relations mediated by multi-step chains surface at deeper lags
    that the pair-alignment test does not look at.  Bonferroni-corrected
    over the scanned lags so the answer stays a valid p-value bound.
    """
    a = _seq_values(a)
    b = _seq_values(b)
    T = a.shape[0]
    tests = 0
    smallest = 1.0
    for lag in range(0, max_lag + 1):
        pairs = [(a[lag:], b[: T - lag] if lag else b)]
        if lag:
            pairs.append((b[lag:], a[: T - lag]))
        for first, second in pairs:
            table = build_contingency(first, second, np.zeros(first.shape[0], dtype=np.int64), n_k=1)
            g2 = g2_statistic(table)
            df = degrees_of_freedom(table)
            p = (1.0 if g2 <= 1e-9 else 0.0) if df == 0 else chi2_survival(g2, df)
            smallest = min(smallest, p)
            tests += 1
    return min(1.0, smallest * tests)


def screen_dependent_pairs(
    bundle: SequenceBundle,
    alpha: float = 0.05,
    eta_max: int = DEFAULT_ETA_MAX,
) -> list[tuple[str, str]]:
    """Situation-emotion pairs that are dependent and not explained away.

    A pair is kept when the pooled marginal test finds it dependent and
    no single third sequence's window renders the pooled test independent
    at any depth up to ``eta_max``.  Only third sequences that are
    themselves dependent on both pair members are tried as separators:
    an unrelated conditioner cannot explain a pair away, it only dilutes
    the tables and would mask weak real dependence.
    """
    require_valid(bundle)
    values = {s.name: _seq_values(s) for s in bundle.all_sequences}
    window_cache: dict[tuple[str, int], np.ndarray] = {}

    def windows(name: str, eta: int) -> np.ndarray:
        key = (name, eta)
        if key not in window_cache:
            window_cache[key] = encode_window_series(values[name], eta)
        return window_cache[key]

    level = alpha * SCREEN_LEVEL_FACTOR
    T = bundle.grid.horizon
    related_cache: dict[frozenset, bool] = {}

    def related(x: str, y: str) -> bool:
        """Separator qualification: dependence at any lag up to eta_max + 1."""
        key = frozenset((x, y))
        if key not in related_cache:
            p = deep_dependence_pvalue(values[x], values[y], eta_max + 1)
            related_cache[key] = p < level
        return related_cache[key]

    kept = []
    situation_names = sorted(s.name for s in bundle.situations)
    emotion_names = sorted(e.name for e in bundle.emotions)
    for s_name in situation_names:
        for e_name in emotion_names:
            a, b = values[s_name], values[e_name]
            if pair_dependence_pvalue(a, b) >= level:
                continue
            separated = False
            for other in sorted(set(values) - {s_name, e_name}):
                if not (related(other, s_name) and related(other, e_name)):
                    continue
                for eta in range(1, eta_max + 1):
                    n_states = 1 << eta
                    if T - eta < MIN_SAMPLES_PER_STATE * n_states:
                        continue
                    cond = windows(other, eta)
                    if pair_dependence_pvalue(a, b, cond, n_k=n_states) >= level:
                        separated = True
                        break
                if separated:
                    break
            if not separated:
                kept.append((s_name, e_name))
    return kept


# -- Graph assembly -----------------------------------------------------------

@dataclass(frozen=True)
class DiscoveryResult:
    """Learned graph plus the per-pair audit of how it was assembled."""

    graph: CausalGraph
    results: tuple
    skipped: tuple

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "pairs": [r.to_dict() for r in self.results],
            "skipped": list(self.skipped),
        }


def discover(
    bundle: SequenceBundle,
    alpha: float = 0.05,
    eta_max: int = DEFAULT_ETA_MAX,
) -> DiscoveryResult:
    """Screen all pairs, learn directions, and assemble the causal graph.

    Deterministic given the bundle and parameters: pairs are processed in
    name order regardless of bundle order, and latent factor ids are
    assigned in that order.
    """
    require_valid(bundle)
    kept = screen_dependent_pairs(bundle, alpha=alpha, eta_max=eta_max)
    graph = CausalGraph(
        [s.name for s in bundle.situations],
        [e.name for e in bundle.emotions],
    )
    results = []
    skipped = []
    latent_counter = 0
    for s_name, e_name in kept:
        result = learn_direction(
            bundle.by_name(s_name), bundle.by_name(e_name), alpha=alpha, eta_max=eta_max
        )
        results.append(result)
        if not result.testable:
            skipped.append({
                "situation": s_name,
                "emotion": e_name,
                "reason": "untestable: every window depth was skipped on one side",
            })
            continue
        common = dict(s1=result.s1, s2=result.s2, eta_c=result.eta_c, eta_m=result.eta_m)
        if result.verdict is Verdict.FORWARD:
            graph.add_edge(Edge(s_name, e_name, EdgeKind.FORWARD, **common))
        elif result.verdict is Verdict.BACKWARD:
            graph.add_edge(Edge(e_name, s_name, EdgeKind.BACKWARD, **common))
        else:
            latent_counter += 1
            graph.add_edge(Edge(
                s_name, e_name, EdgeKind.LATENT,
                latent_id=f"H{latent_counter}", **common,
            ))
    return DiscoveryResult(graph=graph, results=tuple(results), skipped=tuple(skipped))


def learn_graph(
    bundle: SequenceBundle,
    alpha: float = 0.05,
    eta_max: int = DEFAULT_ETA_MAX,
) -> CausalGraph:
    """Convenience wrapper around :func:`discover` returning only the graph."""
    return discover(bundle, alpha=alpha, eta_max=eta_max).graph
