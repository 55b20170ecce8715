"""Graph scoring and the sweep harness."""

import numpy as np
import pytest

from affectcausal import (
    CausalGraph,
    ConfigError,
    DataValidationError,
    Edge,
    EdgeKind,
    GenConfig,
    SweepSpec,
    gen_dataset,
    gen_structure,
    learn_graph,
    run_sweep,
    score_graph,
)
from affectcausal.evaluate import trial_seed


def graph_with(edges, situations=("S1", "S2"), emotions=("E1", "E2")):
    return CausalGraph(situations, emotions, edges)


class TestScoreGraph:
    def test_perfect_recovery(self):
        truth = graph_with([Edge("S1", "E1", EdgeKind.FORWARD)])
        learned = graph_with([Edge("S1", "E1", EdgeKind.FORWARD)])
        score = score_graph(learned, truth)
        assert score.overall.precision == 1.0
        assert score.overall.recall == 1.0
        assert score.overall.f1 == 1.0

    def test_empty_learned_graph(self):
        truth = graph_with([
            Edge("S1", "E1", EdgeKind.FORWARD),
            Edge("S2", "E2", EdgeKind.FORWARD),
        ])
        score = score_graph(graph_with([]), truth)
        assert score.overall.precision == 0.0
        assert score.overall.recall == 0.0
        assert score.overall.f1 == 0.0

    def test_direction_error_counts_fp_and_fn(self):
        truth = graph_with([Edge("S1", "E1", EdgeKind.FORWARD)])
        learned = graph_with([Edge("E1", "S1", EdgeKind.BACKWARD)])
        score = score_graph(learned, truth)
        assert score.per_kind[EdgeKind.FORWARD].fn == 1
        assert score.per_kind[EdgeKind.BACKWARD].fp == 1
        assert score.overall.tp == 0

    def test_latent_matches_regardless_of_id(self):
        truth = graph_with([Edge("S1", "E1", EdgeKind.LATENT, latent_id="H1")])
        learned = graph_with([Edge("S1", "E1", EdgeKind.LATENT, latent_id="H7")])
        assert score_graph(learned, truth).overall.f1 == 1.0

    def test_node_set_mismatch_rejected(self):
        truth = graph_with([], situations=("S1",), emotions=("E1",))
        learned = graph_with([])
        with pytest.raises(DataValidationError):
            score_graph(learned, truth)

    def test_truth_scores_one_against_itself(self):
        for seed in range(100):
            cfg = GenConfig(n_situations=4, n_emotions=4, d_g=0.75, n_c=1, seed=seed)
            truth = gen_structure(cfg, np.random.default_rng(seed))
            score = score_graph(truth, truth)
            assert score.overall.f1 == 1.0


class TestSweepSpec:
    def base(self):
        return GenConfig(n_situations=2, n_emotions=2, epsilon=24.0, d_g=1.0, days=5, seed=3)

    def test_zero_trials_rejected(self):
        with pytest.raises(ConfigError):
            SweepSpec(base=self.base(), trials=0)

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError):
            SweepSpec(base=self.base(), methods=("acnet", "magic"))

    def test_grid_defaults_to_base_values(self):
        spec = SweepSpec(base=self.base(), trials=1)
        assert spec.cells == [(24.0, 1.0, 0)]

    def test_dict_round_trip(self):
        spec = SweepSpec(
            base=self.base(), epsilons=(8.0, 24.0), trials=2,
            methods=("acnet", "gc"), gc_lag=2,
        )
        again = SweepSpec.from_dict(spec.to_dict())
        assert again == spec


class TestRunSweep:
    def small_spec(self, **kwargs):
        base = GenConfig(n_situations=2, n_emotions=2, epsilon=24.0, eta=1.0, d_g=1.0, days=10, seed=17)
        defaults = dict(base=base, trials=2, methods=("acnet",))
        defaults.update(kwargs)
        return SweepSpec(**defaults)

    def test_single_cell_matches_direct_run(self):
        spec = self.small_spec(trials=1)
        result = run_sweep(spec)
        seed = trial_seed(spec.base.seed, 0, 0)
        bundle, truth = gen_dataset(spec.base.with_overrides(seed=seed))
        direct = score_graph(learn_graph(bundle, alpha=spec.alpha, eta_max=spec.eta_max), truth)
        assert result.cell_metric(24.0, 1.0, 0, "acnet", "f1") == pytest.approx(direct.overall.f1)
        assert result.cell_metric(24.0, 1.0, 0, "acnet", "precision") == pytest.approx(direct.overall.precision)

    def test_deterministic_rows(self):
        spec = self.small_spec()
        assert run_sweep(spec).to_csv_text() == run_sweep(spec).to_csv_text()

    def test_parallel_equals_serial(self):
        spec = self.small_spec()
        assert run_sweep(spec, jobs=1).to_csv_text() == run_sweep(spec, jobs=2).to_csv_text()

    def test_csv_layout(self):
        result = run_sweep(self.small_spec(trials=1))
        lines = result.to_csv_text().strip().splitlines()
        assert lines[0] == "epsilon,eta,n_c,method,metric,mean,std,n_trials"
        # 12 metrics (3 pooled + 3 per kind x 3 kinds) for 1 cell x 1 method
        assert len(lines) == 1 + 12

    def test_baseline_methods_present(self):
        spec = self.small_spec(trials=1, methods=("te", "gc"), te_permutations=100)
        result = run_sweep(spec)
        methods = {row["method"] for row in result.rows}
        assert methods == {"te", "gc"}

    def test_trial_seed_is_deterministic_and_distinct(self):
        seeds = {trial_seed(7, c, t) for c in range(4) for t in range(16)}
        assert len(seeds) == 64
        assert trial_seed(7, 2, 3) == trial_seed(7, 2, 3)

    def test_per_trial_failures_recorded_without_killing_sweep(self):
        # one grid value violates the per-bin rate bound: those trials fail,
        # the other cell still aggregates normally
        spec = self.small_spec(epsilons=(24.0, 150.0), trials=2)
        result = run_sweep(spec)
        assert len(result.failures) == 2
        assert all("epsilon" in f["error"] for f in result.failures)
        good = result.cell_metric(24.0, 1.0, 0, "acnet", "f1")
        assert 0.0 <= good <= 1.0
        bad_rows = [r for r in result.rows if r["epsilon"] == 150.0]
        assert bad_rows and all(r["n_trials"] == 0 for r in bad_rows)
