"""Scoring learned graphs against planted truth, and parameter sweeps.

An edge counts as recovered only when its endpoints and kind agree;
latent edges match on the confounded pair alone, since latent ids are
unobservable.  Sweeps run every (epsilon, eta, n_c) grid cell for a
number of independently seeded trials per method and macro-average the
per-trial metrics.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import granger, te_direction
from .direction import DEFAULT_ETA_MAX, Verdict, learn_graph
from .errors import ConfigError, DataValidationError
from .generator import GenConfig, gen_dataset
from .graph import CausalGraph, Edge, EdgeKind

METHODS = ("acnet", "te", "gc")
KINDS = (EdgeKind.FORWARD, EdgeKind.BACKWARD, EdgeKind.LATENT)
METRIC_NAMES = ("precision", "recall", "f1") + tuple(
    f"{metric}_{kind.value}"
    for kind in KINDS
    for metric in ("precision", "recall", "f1")
)


@dataclass(frozen=True)
class KindCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
        }


@dataclass(frozen=True)
class EdgeScore:
    """Pooled and per-kind recovery counts of one learned-vs-truth comparison."""

    overall: KindCounts
    per_kind: dict

    def to_dict(self) -> dict:
        return {
            "overall": self.overall.to_dict(),
            "per_kind": {k.value: v.to_dict() for k, v in self.per_kind.items()},
        }


def _edge_key(edge: Edge):
    if edge.kind is EdgeKind.LATENT:
        return (EdgeKind.LATENT, frozenset((edge.src, edge.dst)))
    return (edge.kind, edge.src, edge.dst)


def score_graph(learned: CausalGraph, truth: CausalGraph) -> EdgeScore:
    """Count per-kind true/false positives and misses of the learned edges."""
    if set(learned.nodes) != set(truth.nodes):
        raise DataValidationError(
            "learned and truth graphs must share the node set"
        )
    learned_keys = {_edge_key(e) for e in learned.edges}
    truth_keys = {_edge_key(e) for e in truth.edges}
    per_kind = {}
    for kind in KINDS:
        l_k = {k for k in learned_keys if k[0] is kind}
        t_k = {k for k in truth_keys if k[0] is kind}
        per_kind[kind] = KindCounts(
            tp=len(l_k & t_k), fp=len(l_k - t_k), fn=len(t_k - l_k)
        )
    overall = KindCounts(
        tp=sum(c.tp for c in per_kind.values()),
        fp=sum(c.fp for c in per_kind.values()),
        fn=sum(c.fn for c in per_kind.values()),
    )
    return EdgeScore(overall=overall, per_kind=per_kind)


# -- Sweeps ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """Grid description of one benchmark sweep.

    Missing grids default to the base config's single value.  The Granger
    lag follows each cell's influence lag unless pinned with ``gc_lag``.
    """

    base: GenConfig
    epsilons: tuple = ()
    etas: tuple = ()
    ncs: tuple = ()
    trials: int = 1
    methods: tuple = ("acnet",)
    alpha: float = 0.05
    eta_max: int = DEFAULT_ETA_MAX
    te_k: int = 1
    te_l: int = 1
    te_permutations: int = 200
    gc_lag: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(self.epsilons) or (self.base.epsilon,))
        object.__setattr__(self, "etas", tuple(self.etas) or (self.base.eta,))
        object.__setattr__(self, "ncs", tuple(self.ncs) or (self.base.n_c,))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods: {sorted(unknown)}")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must be in (0, 1)")

    @property
    def cells(self) -> list[tuple[float, float, int]]:
        return [
            (eps, eta, nc)
            for eps in self.epsilons
            for eta in self.etas
            for nc in self.ncs
        ]

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "epsilons": list(self.epsilons),
            "etas": list(self.etas),
            "ncs": list(self.ncs),
            "trials": self.trials,
            "methods": list(self.methods),
            "alpha": self.alpha,
            "eta_max": self.eta_max,
            "te_k": self.te_k,
            "te_l": self.te_l,
            "te_permutations": self.te_permutations,
            "gc_lag": self.gc_lag,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepSpec":
        doc = dict(doc)
        base = GenConfig.from_dict(doc.pop("base", {}))
        known = {f for f in cls.__dataclass_fields__ if f != "base"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown sweep fields: {sorted(unknown)}")
        return cls(base=base, **doc)


def trial_seed(base_seed: int, cell_index: int, trial_index: int) -> int:
    """Collision-free deterministic per-trial seed from base, cell and trial."""
    ss = np.random.SeedSequence([base_seed & 0xFFFFFFFFFFFFFFFF, cell_index, trial_index])
    return int(ss.generate_state(1, np.uint64)[0])


def baseline_graph(
    bundle,
    method: str,
    alpha: float,
    te_k: int = 1,
    te_l: int = 1,
    te_permutations: int = 100,
    gc_lag: int = 1,
    seed: int = 0,
) -> CausalGraph:
    """Per-pair baseline decisions assembled into a graph on the bundle's nodes."""
    graph = CausalGraph(
        [s.name for s in bundle.situations], [e.name for e in bundle.emotions]
    )
    pairs = [
        (s, e)
        for s in sorted(bundle.situations, key=lambda q: q.name)
        for e in sorted(bundle.emotions, key=lambda q: q.name)
    ]
    for index, (s, e) in enumerate(pairs):
        if method == "te":
            verdict = te_direction(
                s.values, e.values, k=te_k, l=te_l,
                n_permutations=te_permutations, alpha=alpha,
                rng=np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index]),
            )
        elif method == "gc":
            verdict = granger(s.values, e.values, p=gc_lag, alpha=alpha)
        else:
            raise ConfigError(f"unknown baseline method {method!r}")
        if verdict.direction is Verdict.FORWARD:
            graph.add_edge(Edge(s.name, e.name, EdgeKind.FORWARD))
        elif verdict.direction is Verdict.BACKWARD:
            graph.add_edge(Edge(e.name, s.name, EdgeKind.BACKWARD))
    return graph


def _method_graph(method: str, bundle, spec: SweepSpec, cell_eta: float, seed: int) -> CausalGraph:
    if method == "acnet":
        return learn_graph(bundle, alpha=spec.alpha, eta_max=spec.eta_max)
    gc_lag = spec.gc_lag if spec.gc_lag is not None else min(8, max(1, int(round(cell_eta))))
    return baseline_graph(
        bundle, method, spec.alpha,
        te_k=spec.te_k, te_l=spec.te_l, te_permutations=spec.te_permutations,
        gc_lag=gc_lag, seed=seed,
    )


def _run_trial_safe(task):
    try:
        return True, _run_trial(task)
    except Exception as exc:  # per-trial failures must not kill the sweep
        return False, (task[1], task[2], str(exc))


def _run_trial(task):
    spec, cell_index, trial_index = task
    eps, eta, nc = spec.cells[cell_index]
    seed = trial_seed(spec.base.seed, cell_index, trial_index)
    config = spec.base.with_overrides(epsilon=eps, eta=eta, n_c=nc, seed=seed)
    bundle, truth = gen_dataset(config)
    out = {}
    for method in spec.methods:
        graph = _method_graph(method, bundle, spec, eta, seed)
        score = score_graph(graph, truth)
        metrics = {
            "precision": score.overall.precision,
            "recall": score.overall.recall,
            "f1": score.overall.f1,
        }
        for kind, counts in score.per_kind.items():
            metrics[f"precision_{kind.value}"] = counts.precision
            metrics[f"recall_{kind.value}"] = counts.recall
            metrics[f"f1_{kind.value}"] = counts.f1
        out[method] = metrics
    return cell_index, trial_index, out


@dataclass
class SweepResult:
    """Aggregated sweep output: one record per (cell, method, metric)."""

    spec: SweepSpec
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    CSV_COLUMNS = ("epsilon", "eta", "n_c", "method", "metric", "mean", "std", "n_trials")

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([row[c] for c in self.CSV_COLUMNS])
        return buf.getvalue()

    def to_json_text(self) -> str:
        return json.dumps(
            {"spec": self.spec.to_dict(), "rows": self.rows, "failures": self.failures},
            separators=(",", ":"),
        )

    def cell_metric(self, epsilon, eta, n_c, method: str, metric: str) -> float:
        for row in self.rows:
            if (
                row["epsilon"] == epsilon and row["eta"] == eta
                and row["n_c"] == n_c and row["method"] == method
                and row["metric"] == metric
            ):
                return row["mean"]
        raise KeyError((epsilon, eta, n_c, method, metric))


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Run every grid cell for every method; macro-average metrics per cell.

    Deterministic given the spec: trial seeds derive from (base seed,
    cell index, trial index), so results do not depend on scheduling or
    on ``jobs``.  Per-trial failures are recorded and the cell aggregates
    over the successes that remain.
    """
    tasks = [
        (spec, cell_index, trial_index)
        for cell_index in range(len(spec.cells))
        for trial_index in range(spec.trials)
    ]
    outcomes: dict[tuple[int, int], dict] = {}
    failures = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            settled = list(pool.map(_run_trial_safe, tasks, chunksize=1))
    else:
        settled = [_run_trial_safe(task) for task in tasks]
    for ok, payload in settled:
        if ok:
            cell_index, trial_index, per_method = payload
            outcomes[(cell_index, trial_index)] = per_method
        else:
            cell_index, trial_index, error = payload
            failures.append({
                "cell_index": cell_index, "trial_index": trial_index, "error": error,
            })
    result = SweepResult(spec=spec, failures=failures)
    for cell_index, (eps, eta, nc) in enumerate(spec.cells):
        for method in spec.methods:
            collected: dict[str, list[float]] = {}
            for trial_index in range(spec.trials):
                per_method = outcomes.get((cell_index, trial_index))
                if per_method is None:
                    continue
                for name, value in per_method[method].items():
                    collected.setdefault(name, []).append(value)
            for name in METRIC_NAMES:
                values = collected.get(name, [])
                result.rows.append({
                    "epsilon": eps, "eta": eta, "n_c": nc,
                    "method": method, "metric": name,
                    "mean": float(np.mean(values)) if values else 0.0,
                    "std": float(np.std(values)) if values else 0.0,
                    "n_trials": len(values),
                })
    return result
