"""Command-line entry points for seeded, reproducible runs.

Subcommands: ``generate`` (synthetic bundle + ground truth), ``discover``
(learn a causal graph from a bundle), ``baseline`` (transfer-entropy or
Granger verdicts per pair), ``sweep`` (grid benchmark to CSV/JSON),
``ci`` (one conditional-independence verdict, for debugging) and
``kernels-check`` (the affect-kernel invariant/gradient suite).

Every file-writing run drops a ``<subcommand>-manifest.json`` next to its
outputs; rerunning with the same parameters reproduces every output byte
for byte (the manifest's duration field aside).  Exit codes: 0 success,
2 usage or configuration error, 3 data validation error, 4 numerical
failure.  Errors are mirrored as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .citest import ci_test
from .direction import DEFAULT_ETA_MAX, discover
from .errors import ConfigError, DataValidationError, NumericalError
from .evaluate import SweepSpec, run_sweep, baseline_graph
from .baselines import granger, te_direction
from .generator import GenConfig, gen_dataset
from .kernels import run_kernel_checks
from .sequences import encode_window_series, load_bundle, save_bundle

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


@dataclass
class RunManifest:
    """Record of one CLI run: resolved parameters, seed, files, duration."""

    subcommand: str
    parameters: dict
    seed: int | None
    inputs: list
    outputs: list
    duration_seconds: float
    artifact_version: str = __version__

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "duration_seconds": self.duration_seconds,
        }

    def write(self, out_dir: Path) -> Path:
        path = out_dir / f"{self.subcommand}-manifest.json"
        _write_text(path, json.dumps(self.to_dict(), indent=2) + "\n")
        return path


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _out_dir(raw: str) -> Path:
    path = Path(raw)
    if not path.exists():
        raise DataValidationError(f"output directory {raw!r} does not exist")
    if not path.is_dir():
        raise DataValidationError(f"output path {raw!r} is not a directory")
    return path


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise DataValidationError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path} is not valid JSON: {exc}") from exc


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    return alpha


# -- generate -------------------------------------------------------------------

def _gen_config_from_args(args) -> GenConfig:
    doc = _load_json(args.config) if args.config else {}
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    overrides = {
        "epsilon": args.epsilon,
        "eta": args.eta,
        "d_g": args.dg,
        "n_c": args.nc,
        "days": args.days,
        "seed": args.seed,
        "n_situations": args.n_situations,
        "n_emotions": args.n_emotions,
        "step_minutes": args.step_minutes,
        "confounder_kind": args.confounder_kind,
    }
    for key, value in overrides.items():
        if value is not None:
            doc[key] = value
    if args.no_effect_background:
        doc["effect_background"] = False
    return GenConfig.from_dict(doc)


def cmd_generate(args) -> int:
    started = time.perf_counter()
    config = _gen_config_from_args(args)
    out = _out_dir(args.out)
    bundle, truth = gen_dataset(config)
    bundle_path = out / "bundle.json"
    truth_path = out / "truth.json"
    save_bundle(bundle, bundle_path)
    _write_text(truth_path, truth.to_json() + "\n")
    manifest = RunManifest(
        subcommand="generate",
        parameters=config.to_dict(),
        seed=config.seed,
        inputs=[args.config] if args.config else [],
        outputs=[bundle_path.name, truth_path.name],
        duration_seconds=time.perf_counter() - started,
    )
    manifest.write(out)
    print(
        f"generated {len(bundle.situations)} situations + "
        f"{len(bundle.emotions)} emotions over {config.horizon} timestamps "
        f"-> {bundle_path}"
    )
    return EXIT_OK


# -- discover -------------------------------------------------------------------

def cmd_discover(args) -> int:
    started = time.perf_counter()
    alpha = _check_alpha(args.alpha)
    if not 1 <= args.eta_max <= 8:
        raise ConfigError(f"eta-max must be in [1, 8], got {args.eta_max}")
    out = _out_dir(args.out)
    bundle = load_bundle(args.bundle)
    result = discover(bundle, alpha=alpha, eta_max=args.eta_max)
    graph_path = out / "graph.json"
    dot_path = out / "graph.dot"
    audit_path = out / "discovery.json"
    _write_text(graph_path, result.graph.to_json() + "\n")
    _write_text(dot_path, result.graph.to_dot())
    _write_text(audit_path, json.dumps(result.to_dict(), separators=(",", ":")) + "\n")
    manifest = RunManifest(
        subcommand="discover",
        parameters={"alpha": alpha, "eta_max": args.eta_max},
        seed=None,
        inputs=[args.bundle],
        outputs=[graph_path.name, dot_path.name, audit_path.name],
        duration_seconds=time.perf_counter() - started,
    )
    manifest.write(out)
    print(f"{'pair':<16}{'s1':<7}{'s2':<7}{'verdict':<10}")
    for r in result.results:
        print(f"{r.situation + '-' + r.emotion:<16}{str(r.s1):<7}{str(r.s2):<7}{r.verdict.value:<10}")
    print(f"{len(result.graph.edges)} edges -> {graph_path}")
    return EXIT_OK


# -- baseline -------------------------------------------------------------------

def cmd_baseline(args) -> int:
    started = time.perf_counter()
    alpha = _check_alpha(args.alpha)
    out = _out_dir(args.out)
    bundle = load_bundle(args.bundle)
    pairs = [
        (s, e)
        for s in sorted(bundle.situations, key=lambda q: q.name)
        for e in sorted(bundle.emotions, key=lambda q: q.name)
    ]
    verdicts = []
    for index, (s, e) in enumerate(pairs):
        if args.method == "te":
            verdict = te_direction(
                s.values, e.values, k=args.k, l=args.l,
                n_permutations=args.n_permutations, alpha=alpha,
                rng=np.random.default_rng([args.seed & 0xFFFFFFFFFFFFFFFF, index]),
            )
        else:
            verdict = granger(s.values, e.values, p=args.lag, alpha=alpha)
        verdicts.append({"from": s.name, "to": e.name, **verdict.to_dict()})
    graph = baseline_graph(
        bundle, args.method, alpha,
        te_k=args.k, te_l=args.l, te_permutations=args.n_permutations,
        gc_lag=args.lag, seed=args.seed,
    )
    doc = {"method": args.method, "edges": graph.to_dict()["edges"], "verdicts": verdicts}
    verdict_path = out / "baseline.json"
    _write_text(verdict_path, json.dumps(doc, separators=(",", ":")) + "\n")
    manifest = RunManifest(
        subcommand="baseline",
        parameters={
            "method": args.method, "alpha": alpha, "k": args.k, "l": args.l,
            "n_permutations": args.n_permutations, "lag": args.lag,
        },
        seed=args.seed,
        inputs=[args.bundle],
        outputs=[verdict_path.name],
        duration_seconds=time.perf_counter() - started,
    )
    manifest.write(out)
    decided = sum(1 for v in verdicts if v["direction"] != "none")
    print(f"{args.method}: {decided}/{len(verdicts)} pairs decided -> {verdict_path}")
    return EXIT_OK


# -- sweep ----------------------------------------------------------------------

def cmd_sweep(args) -> int:
    started = time.perf_counter()
    spec = SweepSpec.from_dict(_load_json(args.spec))
    if args.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    out = _out_dir(args.out)
    result = run_sweep(spec, jobs=args.jobs)
    csv_path = out / "results.csv"
    json_path = out / "results.json"
    _write_text(csv_path, result.to_csv_text())
    _write_text(json_path, result.to_json_text() + "\n")
    manifest = RunManifest(
        subcommand="sweep",
        parameters=spec.to_dict(),
        seed=spec.base.seed,
        inputs=[args.spec],
        outputs=[csv_path.name, json_path.name],
        duration_seconds=time.perf_counter() - started,
    )
    manifest.write(out)
    cells = len(spec.cells)
    print(
        f"swept {cells} cells x {spec.trials} trials x {len(spec.methods)} methods "
        f"({len(result.failures)} failures) -> {csv_path}"
    )
    return EXIT_OK


# -- ci -------------------------------------------------------------------------

def cmd_ci(args) -> int:
    alpha = _check_alpha(args.alpha)
    bundle = load_bundle(args.bundle)
    try:
        a = bundle.by_name(args.a)
        b = bundle.by_name(args.b)
        cond = bundle.by_name(args.cond) if args.cond else None
    except KeyError as exc:
        raise DataValidationError(f"no sequence named {exc.args[0]!r} in bundle") from exc
    if args.lag < 0:
        raise ConfigError("lag must be non-negative")
    av = np.asarray(a.values, dtype=np.int64)
    bv = np.asarray(b.values, dtype=np.int64)
    T = av.shape[0]
    eta = args.eta
    if cond is not None and not 1 <= eta <= 8:
        raise ConfigError(f"eta must be in [1, 8], got {eta}")
    start = max(args.lag, eta if cond is not None else 0)
    if start >= T:
        raise DataValidationError("sequences too short for the requested lag/eta")
    cond_states = None
    n_k = None
    if cond is not None:
        cond_states = encode_window_series(np.asarray(cond.values, dtype=np.int64), eta)
        cond_states = cond_states[start - eta :]
        n_k = 1 << eta
    verdict = ci_test(
        av[start:],
        bv[start - args.lag : T - args.lag],
        cond_states,
        alpha=alpha,
        n_k=n_k,
    )
    print(json.dumps(verdict.to_dict(), separators=(",", ":")))
    return EXIT_OK


# -- kernels-check ----------------------------------------------------------------

def cmd_kernels_check(args) -> int:
    report = run_kernel_checks(seed=args.seed, n_random=args.n_random)
    print(json.dumps(report, indent=2))
    if not report["passed"]:
        raise NumericalError("kernel checks failed")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affectcausal",
        description="Causal-direction learning over binary event sequences",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic bundle + ground truth")
    gen.add_argument("--config", help="JSON file of generator parameters")
    gen.add_argument("--epsilon", type=float, help="occurrences per day per root")
    gen.add_argument("--eta", type=float, help="average influence lag in timestamps")
    gen.add_argument("--dg", type=float, help="average in-degree of emotion nodes")
    gen.add_argument("--nc", type=int, help="number of confounded pairs")
    gen.add_argument("--days", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--n-situations", type=int)
    gen.add_argument("--n-emotions", type=int)
    gen.add_argument("--step-minutes", type=int)
    gen.add_argument("--no-effect-background", action="store_true")
    gen.add_argument("--confounder-kind", choices=("lagged", "synchronous", "persistent"))
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=cmd_generate)

    dis = sub.add_parser("discover", help="learn a causal graph from a bundle")
    dis.add_argument("bundle", help="bundle JSON file")
    dis.add_argument("--alpha", type=float, default=0.05)
    dis.add_argument("--eta-max", type=int, default=DEFAULT_ETA_MAX)
    dis.add_argument("--out", required=True)
    dis.set_defaults(func=cmd_discover)

    base = sub.add_parser("baseline", help="run a baseline direction detector")
    base.add_argument("bundle")
    base.add_argument("--method", choices=("te", "gc"), required=True)
    base.add_argument("--alpha", type=float, default=0.05)
    base.add_argument("--k", type=int, default=1, help="target history length (te)")
    base.add_argument("--l", type=int, default=1, help="source history length (te)")
    base.add_argument("--n-permutations", type=int, default=200)
    base.add_argument("--lag", type=int, default=1, help="lag order (gc)")
    base.add_argument("--seed", type=int, default=0)
    base.add_argument("--out", required=True)
    base.set_defaults(func=cmd_baseline)

    swp = sub.add_parser("sweep", help="run a benchmark sweep from a spec file")
    swp.add_argument("spec", help="sweep spec JSON file")
    swp.add_argument("--jobs", type=int, default=1)
    swp.add_argument("--out", required=True)
    swp.set_defaults(func=cmd_sweep)

    ci = sub.add_parser("ci", help="print one conditional-independence verdict")
    ci.add_argument("bundle")
    ci.add_argument("--a", required=True, help="first sequence name")
    ci.add_argument("--b", required=True, help="second sequence name")
    ci.add_argument("--lag", type=int, default=0, help="test a(t) against b(t-lag)")
    ci.add_argument("--cond", help="conditioning sequence name")
    ci.add_argument("--eta", type=int, default=1, help="conditioning window depth")
    ci.add_argument("--alpha", type=float, default=0.05)
    ci.set_defaults(func=cmd_ci)

    ker = sub.add_parser("kernels-check", help="run the affect-kernel check suite")
    ker.add_argument("--seed", type=int, default=0)
    ker.add_argument("--n-random", type=int, default=100)
    ker.set_defaults(func=cmd_kernels_check)

    return parser


def _emit_error(kind: str, exc: Exception) -> None:
    doc = {"error": kind, "message": str(exc)}
    if isinstance(exc, DataValidationError):
        doc["problems"] = exc.problems
    print(json.dumps(doc), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _emit_error("config", exc)
        return EXIT_CONFIG
    except DataValidationError as exc:
        _emit_error("validation", exc)
        return EXIT_DATA
    except OSError as exc:
        _emit_error("filesystem", exc)
        return EXIT_DATA
    except NumericalError as exc:
        _emit_error("numerical", exc)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError) as exc:
        _emit_error("numerical", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
