"""Command-line interface.

Exit codes: 0 success, 1 invariant failure, 2 usage or input error,
3 numerical failure (rank deficiency).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import (
    CheckResult,
    closure,
    correlation_decay,
    equiangularity,
    fit_reconstruction,
    nestedness,
    ols_completion,
    step_linearity,
)
from .exceptions import ConstantColumnError, RankDeficientError, UnknownTermError
from .hierarchy import (
    DependencyStructure,
    dependencies_from_json,
    dependencies_to_json,
    marginality_dependencies,
)
from .io import (
    MalformedInput,
    read_data_csv,
    read_manifest,
    read_path_csv,
    sha256,
    write_corr_csv,
    write_data_csv,
    write_hist_csv,
    write_manifest,
    write_path_csv,
)
from .simulate import SimConfig, build_design, fit_path, gen_model1, replicate_study

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("hlars")


class UsageError(Exception):
    pass


def _positive_int_or_none(text):
    if text.lower() == "none":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'none', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _resolve_deps(spec, algorithm, dm):
    """Return ``(deps, groups, json_list)`` for the fit."""
    if algorithm == "lars":
        if spec not in (None, "auto"):
            raise UsageError("--deps only applies to --algorithm mlars")
        return None, None, []
    if spec in (None, "auto"):
        deps = marginality_dependencies(dm.terms)
        return deps, None, dependencies_to_json(deps, dm.names)
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read dependency file: {exc}") from None
    try:
        deps, groups = dependencies_from_json(text, dm.names)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad dependency file {spec}: {exc}") from None
    return deps, groups, dependencies_to_json(deps, dm.names, groups)


def _load_design(data, response, design, algorithm, deps_spec):
    X, y, raw_names = read_data_csv(data, response)
    try:
        dm = build_design(X, design)
    except ConstantColumnError as exc:
        label = exc.name
        if label and label.startswith("X") and label[1:].isdigit():
            label = raw_names[int(label[1:]) - 1]
        raise MalformedInput(f"{data}: column {label!r} is constant") from None
    deps, groups, deps_json = _resolve_deps(deps_spec, algorithm, dm)
    return X, y, raw_names, dm, deps, groups, deps_json


def cmd_fit(args):
    X, y, raw_names, dm, deps, groups, deps_json = _load_design(
        args.data, args.response, args.design, args.algorithm, args.deps
    )
    path = fit_path(dm, y, args.algorithm, deps, groups, max_steps=args.max_steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_path_csv(out / "path.csv", path)
    write_corr_csv(out / "corr.csv", path)
    config = {
        "data": str(Path(args.data).resolve()),
        "response": args.response,
        "design": args.design,
        "algorithm": args.algorithm,
        "deps": deps_json,
        "deps_source": args.deps,
        "max_steps": args.max_steps,
        "raw_columns": {f"X{j + 1}": name for j, name in enumerate(raw_names)},
    }
    config["data_sha256"] = sha256(args.data)
    write_manifest(out, "fit", config, [], {"path": "path.csv", "corr": "corr.csv"}, __version__)
    print(f"{len(path.steps)} steps, {dm.n_terms} terms -> {out}")
    return EXIT_OK


def cmd_replicate(args):
    if args.model != "model1":
        raise UsageError(f"unknown model {args.model!r}")
    try:
        cfg = SimConfig(
            n=args.n, reps=args.reps, noise_sd=args.noise_sd, master_seed=args.seed,
            design=args.design, algorithm=args.algorithm,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    hist = replicate_study(cfg, n_jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_hist_csv(out / "hist.csv", hist, truncate=args.truncate)
    config = dict(cfg.to_dict(), model=args.model, truncate=args.truncate,
                  failures=[{"rep": r, "error": e} for r, e in hist.failures])
    write_manifest(out, "replicate", config, [args.seed], {"hist": "hist.csv"}, __version__)
    print(f"{cfg.reps} replications ({len(hist.failures)} failed) -> {out}")
    return EXIT_OK


def cmd_generate(args):
    if args.n < 1 or args.noise_sd < 0:
        raise UsageError("--n must be positive and --noise-sd non-negative")
    X, y = gen_model1(args.n, args.noise_sd, args.seed)
    write_data_csv(args.out, X, y)
    print(f"wrote {args.n} rows to {args.out}")
    return EXIT_OK


def run_checks(path_csv, manifest, data=None):
    """Validate a path.csv against a fresh fit described by ``manifest``."""
    cfg = manifest["config"]
    data = data or cfg["data"]
    X, y, _ = read_data_csv(data, cfg["response"])
    dm = build_design(X, cfg["design"])
    if cfg["algorithm"] == "mlars":
        deps, groups = dependencies_from_json(cfg["deps"], dm.names)
    else:
        deps, groups = DependencyStructure.empty(dm.n_terms), None
    refit = fit_path(dm, y, cfg["algorithm"], deps if cfg["algorithm"] == "mlars" else None,
                     groups, max_steps=cfg.get("max_steps"))
    coef, active = read_path_csv(path_csv, dm.names)

    results = [
        correlation_decay(refit),
        equiangularity(refit),
        step_linearity(refit, dm.data),
        fit_reconstruction(refit, dm.data),
    ]
    expected = np.vstack([np.zeros(dm.n_terms)] + [s.coef for s in refit.steps])
    if coef.shape != expected.shape:
        results.append(CheckResult("coefficient_reconstruction", False, float("inf"), 1e-8,
                                   f"(file has {coef.shape[0]} steps, refit {expected.shape[0]})"))
    else:
        scale = max(1.0, float(np.max(np.abs(expected))))
        results.append(_resid("coefficient_reconstruction", np.max(np.abs(coef - expected)) / scale))
    active_sets = [frozenset(np.flatnonzero(row).tolist()) for row in active[1:]]
    results.append(nestedness(active_sets))
    results.append(closure(active_sets, deps))
    if refit.complete and coef.shape[0]:
        results.append(ols_completion(dm.data, refit.y, coef[-1]))
    return results


def _resid(name, value, tol=1e-8):
    return CheckResult(name, bool(value <= tol), float(value), tol)


def cmd_check(args):
    path_csv = Path(args.path)
    manifest_path = Path(args.manifest) if args.manifest else path_csv.parent / "manifest.json"
    try:
        manifest = read_manifest(manifest_path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read manifest {manifest_path}: {exc}") from None
    results = run_checks(path_csv, manifest, args.data)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def build_parser():
    parser = argparse.ArgumentParser(prog="hlars", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one path and export plot data")
    p.add_argument("data", help="input CSV with a header row")
    p.add_argument("--response", default="y")
    p.add_argument("--design", choices=["main", "full"], default="main")
    p.add_argument("--algorithm", choices=["lars", "mlars"], default="lars")
    p.add_argument("--deps", default="auto", help="'auto' or a JSON dependency file")
    p.add_argument("--max-steps", type=_positive_int_or_none, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("replicate", help="run the selection-order study")
    p.add_argument("--model", default="model1")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--noise-sd", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--design", choices=["main", "full"], default="main")
    p.add_argument("--algorithm", choices=["lars", "mlars"], default="lars")
    p.add_argument("--truncate", type=_positive_int_or_none, default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help="worker count (default: $HLARS_THREADS or 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("generate", help="write one benchmark-model dataset as CSV")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--noise-sd", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="validate a path.csv against its source data")
    p.add_argument("path", help="path.csv written by 'hlars fit'")
    p.add_argument("--manifest", help="defaults to manifest.json next to path.csv")
    p.add_argument("--data", help="override the data file recorded in the manifest")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, MalformedInput, UnknownTermError) as exc:
        print(f"hlars: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RankDeficientError as exc:
        print(f"hlars: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
