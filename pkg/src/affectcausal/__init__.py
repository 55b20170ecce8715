"""Causal-direction learning over binary event sequences.

The library covers the full pipeline: event-sequence value types, the
G-squared conditional-independence test with zero-cell-penalized degrees
of freedom, asymmetric direction learning with latent-confounder
detection, a planted-structure Poisson benchmark with transfer-entropy
and Granger baselines, an evaluation/sweep harness, and standalone
affect loss kernels with checked gradients.
"""

__version__ = "0.1.0"

from .baselines import BaselineVerdict, granger, te_direction, transfer_entropy
from .citest import (
    CiVerdict,
    ContingencyTable3D,
    build_contingency,
    ci_test,
    degrees_of_freedom,
    expected_counts,
    g2_statistic,
)
from .direction import (
    DEFAULT_ETA_MAX,
    DirectionResult,
    DiscoveryResult,
    Verdict,
    discover,
    learn_direction,
    learn_graph,
    screen_dependent_pairs,
    source_side_test,
    target_side_test,
    verdict_from_flags,
)
from .errors import ConfigError, DataValidationError, NumericalError
from .evaluate import EdgeScore, SweepResult, SweepSpec, baseline_graph, run_sweep, score_graph
from .generator import GenConfig, gen_dataset, gen_root_sequence, gen_structure, influence_probability
from .graph import CausalGraph, Edge, EdgeKind, GroundTruthGraph
from .kernels import (
    FeatureTensor,
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
from .sequences import (
    BinaryEventSequence,
    LagWindow,
    SequenceBundle,
    SequenceKind,
    TimeGrid,
    bundle_from_csv,
    bundle_from_json,
    bundle_to_json,
    decode_window,
    encode_window,
    encode_window_series,
    lag1,
    load_bundle,
    make_bundle,
    save_bundle,
    validate_bundle,
)
from .special import chi2_survival, f_survival, regularized_beta, regularized_gamma_q
