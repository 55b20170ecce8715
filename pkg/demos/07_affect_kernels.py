"""
Affect-math kernels: lateralization, peak candidates, and the losses
====================================================================

Standalone numerical pieces of the affect pipeline: the hemispheric
lateralization feature, heart-rate candidate peaks from a power
spectrum, the temporal-margin loss that penalizes losing confidence in
the true class while an emotion lasts, and the label-cleaning loss that
mixes an L1 cleaning error with a cross-entropy prediction error.
"""
import numpy as np

from affectcausal import (
    SpectralFrame,
    build_feature_tensor,
    hr_candidate_plane,
    hr_candidates,
    lateralization_feature,
    lc_loss,
    lc_loss_gradients,
    run_kernel_checks,
    tm_loss,
    tm_loss_gradient,
)

# %%
# Lateralization: weighted normalized left/right band-power difference.
rng = np.random.default_rng(0)
zl = rng.random((4, 6)) * 3       # band power, left channel
zr = rng.random((4, 6)) * 3       # band power, right channel
xi = np.ones((4, 6))              # asymmetry weights (caller-supplied policy)
b_plane = lateralization_feature(SpectralFrame(zl, zr, xi))
print("lateralization plane, first row:", np.round(b_plane[0], 3))

# %%
# Heart-rate candidates: strict local maxima of the PSD, ranked by power.
psd = np.array([0.1, 2.0, 0.3, 5.0, 0.2, 1.4, 0.1])
print("candidate bins:", hr_candidates(psd, max_peaks=2))
h_plane = hr_candidate_plane(rng.random((4, 6)), max_peaks=1)
tensor = build_feature_tensor(b_plane, h_plane)
print("feature tensor shape:", tensor.values.shape)

# %%
# Temporal-margin loss: pure cross-entropy while the margin keeps
# growing, hinge-penalized once it drops below its running maximum.
scores = np.array([
    [0.75, 0.25],   # margin 0.5
    [0.80, 0.20],   # margin 0.6 (the running maximum)
    [0.60, 0.20],   # margin 0.4: the hinge activates
])
print("tm_loss =", round(tm_loss(scores, 1, 2, 0), 6))
print("gradient at the last step:", tm_loss_gradient(scores, 1, 2, 0))

# %%
# Label-cleaning loss: L1 against verified labels plus cross-entropy of
# the predictions against the cleaned-or-verified targets.
value = lc_loss(cleaned=[0.3], truth=[1.0], predicted=[0.5], target=[1.0])
print("lc_loss =", round(value, 6))
print("prediction-block gradient:", lc_loss_gradients([0.3], [1.0], [0.5], [1.0])[1])

# %%
# The packaged self-check suite (also exposed as `affectcausal
# kernels-check` on the command line).
report = run_kernel_checks(seed=0, n_random=50)
print("all kernel checks passed:", report["passed"])
