"""Planted-structure benchmark generation.

Root sequences are thinned Poisson processes: independent Bernoulli
draws per time bin at rate ``epsilon / bins_per_day``.  An effect
sequence fires at ``t`` with a probability that decays exponentially in
the time since its cause most recently occurred, superimposed (logical
OR) with its own background process.  Confounded pairs share a hidden
root sequence driving both members.

Everything is reproducible from the config seed: the structure, the
hidden roots and every sequence are drawn from one seeded generator in a
fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import ConfigError
from .graph import CausalGraph, Edge, EdgeKind, GroundTruthGraph
from .sequences import BinaryEventSequence, SequenceBundle, SequenceKind, TimeGrid


@dataclass(frozen=True)
class GenConfig:
    """Benchmark parameters.

    ``epsilon`` is the expected number of occurrences per day of each
    root process; ``eta`` is the average influence lag in timestamps
    (the exponential kernel's mean); ``d_g`` the average in-degree of
    emotion nodes, so ``round(d_g * n_emotions)`` edges are planted;
    ``n_c`` the number of additionally confounded node pairs.
    """

    n_situations: int = 5
    n_emotions: int = 5
    epsilon: float = 24.0
    eta: float = 1.0
    d_g: float = 1.0
    n_c: int = 0
    days: int = 30
    seed: int = 0
    step_minutes: int = 10
    effect_background: bool = True
    confounder_kind: Literal["lagged", "synchronous", "persistent"] = "lagged"

    def __post_init__(self):
        if self.n_situations < 1 or self.n_emotions < 1:
            raise ConfigError("n_situations and n_emotions must be positive")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.eta < 1:
            raise ConfigError("eta (average influence lag) must be at least 1 timestamp")
        if self.d_g < 0:
            raise ConfigError("d_g must be non-negative")
        if self.n_c < 0:
            raise ConfigError("n_c must be non-negative")
        if self.days < 1:
            raise ConfigError("days must be positive")
        if self.step_minutes <= 0 or 1440 % self.step_minutes != 0:
            raise ConfigError("step_minutes must be positive and divide 1440")
        if self.edge_count > self.n_situations * self.n_emotions:
            raise ConfigError(
                f"d_g={self.d_g} asks for {self.edge_count} edges but only "
                f"{self.n_situations * self.n_emotions} pairs exist"
            )
        if self.epsilon / self.bins_per_day >= 1.0:
            raise ConfigError(
                f"epsilon={self.epsilon} means >= 1 occurrence per "
                f"{self.step_minutes}-minute bin"
            )
        if self.confounder_kind not in ("lagged", "synchronous", "persistent"):
            raise ConfigError(f"unknown confounder_kind {self.confounder_kind!r}")

    @property
    def bins_per_day(self) -> int:
        return 1440 // self.step_minutes

    @property
    def horizon(self) -> int:
        return self.days * self.bins_per_day

    @property
    def edge_count(self) -> int:
        return int(round(self.d_g * self.n_emotions))

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.step_minutes, self.horizon)

    def to_dict(self) -> dict:
        return {
            "n_situations": self.n_situations,
            "n_emotions": self.n_emotions,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "d_g": self.d_g,
            "n_c": self.n_c,
            "days": self.days,
            "seed": self.seed,
            "step_minutes": self.step_minutes,
            "effect_background": self.effect_background,
            "confounder_kind": self.confounder_kind,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GenConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    def with_overrides(self, **kwargs) -> "GenConfig":
        return replace(self, **kwargs)


def influence_probability(delta_t: float, eta: float) -> float:
    """Per-timestep firing probability ``min(1, eta * exp(-delta_t * eta))``.

    ``eta`` here is the decay rate of the exponential kernel (the kernel's
    mean lag is ``1 / eta``); :func:`gen_dataset` passes ``1 / config.eta``
    so that the config parameter reads as the average lag in timestamps.
    ``delta_t`` counts timestamps since the cause's most recent occurrence.
    """
    if delta_t < 0:
        raise ValueError("delta_t must be non-negative")
    if eta <= 0:
        raise ValueError("eta must be positive")
    return min(1.0, eta * math.exp(-delta_t * eta))


def _persistent_regime(T: int, rng: np.random.Generator, stay: float = 0.995) -> np.ndarray:
    """Two-state hidden regime with geometric dwell times (mean 1/(1-stay))."""
    flips = (rng.random(T) > stay).astype(np.uint8)
    flips[0] = rng.random() < 0.5
    return (np.cumsum(flips) % 2).astype(np.uint8)


def _influence_profile(cause: np.ndarray, rate: float) -> np.ndarray:
    """Per-timestep firing probabilities induced by a cause sequence.

    Entry ``t`` is ``influence_probability(t - s, rate)`` with ``s`` the
    cause's most recent occurrence strictly before ``t``, or 0 when the
    cause has not yet occurred.
    """
    T = cause.shape[0]
    idx = np.arange(T)
    seen = np.where(cause > 0, idx, -1)
    last = np.maximum.accumulate(seen)
    last_before = np.concatenate(([-1], last[:-1]))
    delta = idx - last_before
    probs = np.minimum(1.0, rate * np.exp(-delta.astype(float) * rate))
    probs[last_before < 0] = 0.0
    return probs


def gen_root_sequence(
    epsilon: float,
    grid: TimeGrid,
    rng: np.random.Generator,
    name: str = "root",
    kind: SequenceKind = SequenceKind.SITUATION,
) -> BinaryEventSequence:
    """Thinned-Poisson root: i.i.d. Bernoulli(epsilon / bins_per_day) per bin."""
    if epsilon < 0:
        raise ConfigError("epsilon must be non-negative")
    p = epsilon / grid.bins_per_day
    if p >= 1.0:
        raise ConfigError(
            f"epsilon={epsilon} means >= 1 occurrence per bin on this grid"
        )
    values = (rng.random(grid.horizon) < p).astype(np.uint8)
    return BinaryEventSequence(grid, name, kind, values)


def gen_structure(config: GenConfig, rng: np.random.Generator) -> GroundTruthGraph:
    """Sample the planted graph: directed edges, then disjoint confounded pairs.

    Situation-emotion pairs are drawn uniformly without replacement until
    ``edge_count`` directed edges exist.  Confounded pairs are then drawn
    from the unconnected pairs, node-disjoint from each other, and each
    gets its own latent factor id.
    """
    situations = [f"S{i + 1}" for i in range(config.n_situations)]
    emotions = [f"E{j + 1}" for j in range(config.n_emotions)]
    graph = CausalGraph(situations, emotions)
    n_pairs = config.n_situations * config.n_emotions
    chosen = rng.choice(n_pairs, size=config.edge_count, replace=False)
    edge_pairs = set()
    for flat in sorted(int(c) for c in chosen):
        s = situations[flat // config.n_emotions]
        e = emotions[flat % config.n_emotions]
        edge_pairs.add((s, e))
        graph.add_edge(Edge(s, e, EdgeKind.FORWARD))
    if config.n_c > 0:
        candidates = [
            (s, e)
            for s in situations
            for e in emotions
            if (s, e) not in edge_pairs
        ]
        order = rng.permutation(len(candidates))
        used_nodes: set[str] = set()
        latent_idx = 0
        for pos in order:
            s, e = candidates[int(pos)]
            if s in used_nodes or e in used_nodes:
                continue
            latent_idx += 1
            graph.add_edge(Edge(s, e, EdgeKind.LATENT, latent_id=f"H{latent_idx}"))
            used_nodes.update((s, e))
            if latent_idx == config.n_c:
                break
        if latent_idx < config.n_c:
            raise ConfigError(
                f"could not place {config.n_c} disjoint confounded pairs; "
                f"managed {latent_idx}"
            )
    return graph


def gen_dataset(config: GenConfig) -> tuple[SequenceBundle, GroundTruthGraph]:
    """Generate a bundle and its planted ground truth, reproducibly from the seed.

    Draw order is fixed (structure, hidden confounder roots, situations,
    then emotions) so identical configs yield identical bundles.
    """
    rng = np.random.default_rng(config.seed)
    grid = config.grid
    truth = gen_structure(config, rng)
    rate = 1.0 / config.eta
    p_bg = config.epsilon / config.bins_per_day

    latent_edges = sorted(
        (e for e in truth.edges if e.kind is EdgeKind.LATENT),
        key=lambda e: e.latent_id,
    )
    hidden: dict[str, np.ndarray] = {}
    for edge in latent_edges:
        if config.confounder_kind == "persistent":
            hidden[edge.latent_id] = _persistent_regime(grid.horizon, rng)
        else:
            hidden[edge.latent_id] = (rng.random(grid.horizon) < p_bg).astype(np.uint8)

    confounder_of: dict[str, np.ndarray] = {}
    for edge in latent_edges:
        confounder_of[edge.src] = hidden[edge.latent_id]
        confounder_of[edge.dst] = hidden[edge.latent_id]

    causes_of: dict[str, list[str]] = {}
    for edge in truth.edges:
        if edge.kind is EdgeKind.FORWARD:
            causes_of.setdefault(edge.dst, []).append(edge.src)

    def draw_member(name: str, parents: list[np.ndarray]) -> np.ndarray:
        """Background OR one independent influence draw per parent profile."""
        has_parents = bool(parents) or name in confounder_of
        if config.effect_background or not has_parents:
            values = (rng.random(grid.horizon) < p_bg).astype(np.uint8)
        else:
            values = np.zeros(grid.horizon, dtype=np.uint8)
        for profile in parents:
            fired = rng.random(grid.horizon) < profile
            values = np.maximum(values, fired.astype(np.uint8))
        if name in confounder_of:
            h = confounder_of[name]
            if config.confounder_kind == "synchronous":
                values = np.maximum(values, h)
            elif config.confounder_kind == "persistent":
                rates = np.where(h == 1, min(0.9, 2.5 * p_bg), 0.4 * p_bg)
                fired = rng.random(grid.horizon) < rates
                values = np.maximum(values, fired.astype(np.uint8))
            else:
                fired = rng.random(grid.horizon) < _influence_profile(h, rate)
                values = np.maximum(values, fired.astype(np.uint8))
        return values

    situations = []
    situation_values: dict[str, np.ndarray] = {}
    for name in (f"S{i + 1}" for i in range(config.n_situations)):
        values = draw_member(name, [])
        situation_values[name] = values
        situations.append(BinaryEventSequence(grid, name, SequenceKind.SITUATION, values))

    emotions = []
    for name in (f"E{j + 1}" for j in range(config.n_emotions)):
        profiles = [
            _influence_profile(situation_values[cause], rate)
            for cause in sorted(causes_of.get(name, []))
        ]
        values = draw_member(name, profiles)
        emotions.append(BinaryEventSequence(grid, name, SequenceKind.EMOTION, values))

    return SequenceBundle(grid, situations, emotions), truth
