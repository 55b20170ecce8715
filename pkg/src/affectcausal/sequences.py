"""Timestamped binary event sequences and their lagged-window encodings.

A sequence records, on a uniform time grid, whether an event (a life
situation or an emotional state) occurred in each time bin.  Recent
history of a sequence is summarised by encoding the window of the last
``eta`` values as a single base-2 composite state, which downstream code
uses as the conditioning variable of independence tests.

All types are plain values: immutable after construction, comparable,
and round-trippable through JSON.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DataValidationError

#: Largest supported window depth; composite states live in [0, 2**eta).
ETA_MAX_SUPPORTED = 8


class SequenceKind(str, Enum):
    SITUATION = "situation"
    EMOTION = "emotion"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: ``horizon`` bins of ``step_minutes`` minutes each."""

    step_minutes: int
    horizon: int

    def __post_init__(self):
        if self.step_minutes <= 0:
            raise DataValidationError("step_minutes must be positive")
        if self.horizon < 2:
            raise DataValidationError("horizon must be at least 2 timestamps")

    @property
    def bins_per_day(self) -> float:
        return 1440.0 / self.step_minutes


@dataclass(frozen=True)
class BinaryEventSequence:
    """0/1 occurrence indicator per timestamp of a shared grid.

    Construction is permissive about values so that malformed inputs can
    be loaded and then reported by :func:`validate_bundle`; producers in
    this package only ever build valid sequences.
    """

    grid: TimeGrid
    name: str
    kind: SequenceKind
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryEventSequence):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.name == other.name
            and self.kind == other.kind
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )


@dataclass(frozen=True)
class LagWindow:
    """The window ``(source(t-eta), ..., source(t-1))`` at anchor ``t``.

    Valid only for ``t >= eta``; the tuple is encoded as one composite
    categorical state in ``[0, 2**eta)``.
    """

    source: BinaryEventSequence
    eta: int
    t: int

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be at least 1")
        if self.t < self.eta or self.t >= len(self.source):
            raise IndexError(
                f"window anchor t={self.t} out of range for eta={self.eta}, "
                f"T={len(self.source)}"
            )

    def state(self) -> int:
        return encode_window(self.source, self.eta, self.t)


def encode_window(seq, eta: int, t: int) -> int:
    """Encode the lagged values ``(A(t-1), ..., A(t-eta))`` as an integer.

    Lag 1 carries weight 1, lag 2 weight 2, lag k weight ``2**(k-1)``, so
    the result is ``sum_k A(t-k) * 2**(k-1)`` in ``[0, 2**eta)``.
    """
    values = _values_of(seq)
    if eta < 1 or eta > ETA_MAX_SUPPORTED:
        raise ValueError(f"eta must be in [1, {ETA_MAX_SUPPORTED}], got {eta}")
    if t < eta or t >= values.shape[0]:
        raise IndexError(f"t={t} out of range for eta={eta}, T={values.shape[0]}")
    state = 0
    for k in range(1, eta + 1):
        state += int(values[t - k]) << (k - 1)
    return state


def decode_window(state: int, eta: int) -> tuple:
    """Inverse of :func:`encode_window`: recover ``(A(t-1), ..., A(t-eta))``."""
    if not 0 <= state < (1 << eta):
        raise ValueError(f"state {state} out of range for eta={eta}")
    return tuple((state >> k) & 1 for k in range(eta))


def encode_window_series(values: np.ndarray, eta: int) -> np.ndarray:
    """Composite window states for every valid anchor ``t`` in ``[eta, T)``.

    Returns an array of length ``T - eta`` whose entry ``i`` is the window
    state at anchor ``t = eta + i``.
    """
    values = np.asarray(values, dtype=np.int64)
    T = values.shape[0]
    if eta < 1 or eta > ETA_MAX_SUPPORTED:
        raise ValueError(f"eta must be in [1, {ETA_MAX_SUPPORTED}], got {eta}")
    if T <= eta:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(T - eta, dtype=np.int64)
    for k in range(1, eta + 1):
        out += values[eta - k : T - k] << (k - 1)
    return out


def lag1(seq, t: int) -> int:
    """Value of the sequence one timestamp before ``t``."""
    values = _values_of(seq)
    if t < 1 or t >= values.shape[0]:
        raise IndexError(f"t={t} out of range for lag-1 lookup, T={values.shape[0]}")
    return int(values[t - 1])


def _values_of(seq) -> np.ndarray:
    if isinstance(seq, BinaryEventSequence):
        return seq.values
    return np.asarray(seq)


@dataclass(frozen=True)
class SequenceBundle:
    """All situation and emotion sequences of one recording, on one grid."""

    grid: TimeGrid
    situations: tuple
    emotions: tuple

    def __init__(self, grid, situations, emotions):
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "situations", tuple(situations))
        object.__setattr__(self, "emotions", tuple(emotions))

    @property
    def all_sequences(self) -> tuple:
        return self.situations + self.emotions

    def by_name(self, name: str) -> BinaryEventSequence:
        for seq in self.all_sequences:
            if seq.name == name:
                return seq
        raise KeyError(name)


def validate_bundle(bundle: SequenceBundle) -> list[str]:
    """Check the bundle's structural contracts; return a problem report.

    An empty list means the bundle is valid.  Each problem names the
    offending sequence and, for bad values, the index.
    """
    problems: list[str] = []
    seen: set[str] = set()
    horizon = bundle.grid.horizon
    for seq in bundle.all_sequences:
        if seq.name in seen:
            problems.append(f"duplicate sequence name {seq.name!r}")
        seen.add(seq.name)
        if seq.grid != bundle.grid:
            problems.append(
                f"sequence {seq.name!r} grid {seq.grid} differs from bundle grid "
                f"{bundle.grid}"
            )
        if len(seq) != horizon:
            problems.append(
                f"sequence {seq.name!r} has length {len(seq)}, grid horizon is "
                f"{horizon}"
            )
        values = np.asarray(seq.values)
        if values.size and not np.issubdtype(values.dtype, np.number):
            problems.append(f"sequence {seq.name!r} has non-numeric values")
            continue
        bad = np.flatnonzero((values != 0) & (values != 1))
        for idx in bad[:5]:
            problems.append(
                f"sequence {seq.name!r} has non-binary value {values[idx]!r} at "
                f"index {int(idx)}"
            )
        if bad.size > 5:
            problems.append(
                f"sequence {seq.name!r} has {bad.size - 5} further non-binary values"
            )
    return problems


def require_valid(bundle: SequenceBundle) -> SequenceBundle:
    problems = validate_bundle(bundle)
    if problems:
        raise DataValidationError(problems)
    return bundle


# -- Serialization -----------------------------------------------------------

def bundle_to_dict(bundle: SequenceBundle) -> dict:
    return {
        "grid": {"step_minutes": bundle.grid.step_minutes, "T": bundle.grid.horizon},
        "situations": [
            {"name": s.name, "values": np.asarray(s.values).astype(int).tolist()}
            for s in bundle.situations
        ],
        "emotions": [
            {"name": s.name, "values": np.asarray(s.values).astype(int).tolist()}
            for s in bundle.emotions
        ],
    }


def bundle_from_dict(doc: dict, validate: bool = True) -> SequenceBundle:
    try:
        grid = TimeGrid(int(doc["grid"]["step_minutes"]), int(doc["grid"]["T"]))
        situations = [
            BinaryEventSequence(
                grid, str(s["name"]), SequenceKind.SITUATION, np.asarray(s["values"])
            )
            for s in doc["situations"]
        ]
        emotions = [
            BinaryEventSequence(
                grid, str(s["name"]), SequenceKind.EMOTION, np.asarray(s["values"])
            )
            for s in doc["emotions"]
        ]
    except (KeyError, TypeError) as exc:
        raise DataValidationError(f"malformed bundle document: {exc}") from exc
    bundle = SequenceBundle(grid, situations, emotions)
    if validate:
        require_valid(bundle)
    return bundle


def bundle_to_json(bundle: SequenceBundle) -> str:
    return json.dumps(bundle_to_dict(bundle), separators=(",", ":"))


def bundle_from_json(text: str, validate: bool = True) -> SequenceBundle:
    return bundle_from_dict(json.loads(text), validate=validate)


def save_bundle(bundle: SequenceBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bundle_to_json(bundle))
        fh.write("\n")


def load_bundle(path, validate: bool = True) -> SequenceBundle:
    with open(path, "r", encoding="utf-8") as fh:
        return bundle_from_json(fh.read(), validate=validate)


def bundle_from_csv(path, step_minutes: int = 10) -> SequenceBundle:
    """Import a bundle from CSV: one column per sequence.

    Header names must be prefixed ``S:`` (situation) or ``E:`` (emotion);
    rows are the 0/1 values per timestamp, oldest first.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if len(rows) < 2:
        raise DataValidationError("CSV must have a header row and data rows")
    header, data = rows[0], rows[1:]
    columns = [[] for _ in header]
    for r, row in enumerate(data):
        if len(row) != len(header):
            raise DataValidationError(f"CSV row {r + 2} has {len(row)} fields, expected {len(header)}")
        for c, cell in enumerate(row):
            columns[c].append(cell)
    grid = TimeGrid(step_minutes, len(data))
    situations, emotions = [], []
    for name, column in zip(header, columns):
        name = name.strip()
        try:
            values = np.asarray([int(v) for v in column])
        except ValueError as exc:
            raise DataValidationError(f"column {name!r} has a non-integer cell: {exc}") from exc
        if name.startswith("S:"):
            situations.append(
                BinaryEventSequence(grid, name[2:], SequenceKind.SITUATION, values)
            )
        elif name.startswith("E:"):
            emotions.append(
                BinaryEventSequence(grid, name[2:], SequenceKind.EMOTION, values)
            )
        else:
            raise DataValidationError(
                f"CSV column {name!r} is not prefixed with 'S:' or 'E:'"
            )
    return require_valid(SequenceBundle(grid, situations, emotions))


def make_bundle(
    situations: Iterable[tuple[str, Sequence[int]]],
    emotions: Iterable[tuple[str, Sequence[int]]],
    step_minutes: int = 10,
) -> SequenceBundle:
    """Convenience constructor from ``(name, values)`` pairs."""
    situations = list(situations)
    emotions = list(emotions)
    if not situations and not emotions:
        raise DataValidationError("bundle needs at least one sequence")
    first = situations[0][1] if situations else emotions[0][1]
    grid = TimeGrid(step_minutes, len(first))
    return require_valid(
        SequenceBundle(
            grid,
            [
                BinaryEventSequence(grid, n, SequenceKind.SITUATION, np.asarray(v))
                for n, v in situations
            ],
            [
                BinaryEventSequence(grid, n, SequenceKind.EMOTION, np.asarray(v))
                for n, v in emotions
            ],
        )
    )
