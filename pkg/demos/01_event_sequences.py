"""
Binary event sequences and lagged-window encodings
===================================================

The core data model: everything observed is a 0/1 occurrence indicator
on a uniform time grid (10 minutes per bin by default).  A sequence's
recent history is summarised by packing the last ``eta`` values into one
composite categorical state, which later serves as the conditioning
variable of independence tests.
"""
import numpy as np

from affectcausal import (
    bundle_from_json,
    bundle_to_json,
    decode_window,
    encode_window,
    lag1,
    make_bundle,
    validate_bundle,
)

# %%
# A tiny one-day bundle: two situations and one emotional state.
rng = np.random.default_rng(0)
T = 144  # one day of 10-minute bins
bundle = make_bundle(
    situations=[
        ("coffee", (rng.random(T) < 0.05).astype(int)),
        ("studying", (rng.random(T) < 0.20).astype(int)),
    ],
    emotions=[("stress", (rng.random(T) < 0.10).astype(int))],
)
print("grid:", bundle.grid)
print("validation problems:", validate_bundle(bundle))

# %%
# Window encoding: the last three values of "studying" before t=30,
# packed little-endian (lag 1 is the lowest bit).
studying = bundle.by_name("studying")
state = encode_window(studying, eta=3, t=30)
print("window state at t=30:", state, "decodes to lags 1..3 =", decode_window(state, 3))
print("value one bin earlier:", lag1(studying, 30))

# %%
# Bundles round-trip through a compact JSON document.
text = bundle_to_json(bundle)
again = bundle_from_json(text)
print("round-trip preserves sequences:", again.situations == bundle.situations)
print("document size:", len(text), "bytes")
