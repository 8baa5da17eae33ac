"""Command-line entry point: ``peptide-mlp <stage> [options]``.

Configuration comes from an optional JSON file (``--config``) overlaid by
flags; ``--set section.field=value`` reaches any field. Failures print a
single JSON error record on stderr and exit nonzero (2 for configuration
problems, 1 otherwise).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, config_from_dict, merge

OUTDIR_ENV = "PEPTIDE_MLP_OUTDIR"

# flag dest -> config path
_FLAG_PATHS = {
    "seed": ("master_seed",),
    "balance": ("balance",),
    "placement": ("placement",),
    "k_folds": ("k_folds",),
    "validation_fraction": ("validation_fraction",),
    "no_select": ("select_features",),
    "population": ("ga", "population_size"),
    "generations": ("ga", "generations"),
    "subset_size": ("ga", "subset_size"),
    "evaluator": ("ga", "evaluator"),
    "smote_k": ("smote", "k_neighbors"),
    "max_epochs": ("train", "max_epochs"),
    "max_fail": ("train", "max_fail"),
    "regularization": ("train", "regularization"),
    "hidden": ("hidden_layers",),
    "n_cases": ("synth", "n_cases"),
    "n_controls": ("synth", "n_controls"),
    "n_features": ("synth", "n_features"),
    "n_informative": ("synth", "n_informative"),
    "effect_size": ("synth", "effect_size"),
}


def _nested(path, value):
    out = value
    for key in reversed(path):
        out = {key: out}
    return out


def _parse_set(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError([f"--set {item}: expected key=value"])
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        out = merge(out, _nested(tuple(key.split(".")), value))
    return out


def resolve_config(args):
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"config: cannot read {args.config}: {exc}"]) from None
        if not isinstance(raw, dict):
            raise ConfigError(["config: top level must be a JSON object"])
    overrides = {}
    for dest, path in _FLAG_PATHS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if dest == "no_select":
            if not value:
                continue
            value = False
        overrides = merge(overrides, _nested(path, value))
    overrides = merge(overrides, _parse_set(args.set or []))
    if getattr(args, "input", None):
        overrides["input"] = str(args.input)
    raw = merge(raw, overrides)
    if raw.get("synth") is None and any(getattr(args, k, None) is not None for k in
                                        ("n_cases", "n_controls", "n_features", "n_informative", "effect_size")):
        raw["synth"] = {}
    return config_from_dict(raw)


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.output_dir or os.environ.get(OUTDIR_ENV) or "peptide_mlp_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peptide-mlp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help=f"output directory (default: ${OUTDIR_ENV} or ./peptide_mlp_out)")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any config field, e.g. ga.generations=60 (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    balancing = argparse.ArgumentParser(add_help=False)
    balancing.add_argument("--balance", choices=["smote", "replicate", "none"])
    balancing.add_argument("--placement", choices=["before_cv", "within_fold"])
    balancing.add_argument("--smote-k", dest="smote_k", type=int)

    ga = argparse.ArgumentParser(add_help=False)
    ga.add_argument("--population", type=int)
    ga.add_argument("--generations", type=int)
    ga.add_argument("--subset-size", dest="subset_size", type=int)
    ga.add_argument("--evaluator", choices=["lda", "nb", "mean_of_both"])

    train = argparse.ArgumentParser(add_help=False)
    train.add_argument("--max-epochs", dest="max_epochs", type=int)
    train.add_argument("--max-fail", dest="max_fail", type=int)
    train.add_argument("--regularization", type=float)
    train.add_argument("--hidden", type=int, nargs="+", help="hidden layer sizes")
    train.add_argument("--validation-fraction", dest="validation_fraction", type=float)

    cv = argparse.ArgumentParser(add_help=False)
    cv.add_argument("--k-folds", dest="k_folds", type=int)
    cv.add_argument("--no-select", dest="no_select", action="store_true", default=None,
                    help="skip GA feature selection")

    synth = argparse.ArgumentParser(add_help=False)
    synth.add_argument("--n-cases", dest="n_cases", type=int)
    synth.add_argument("--n-controls", dest="n_controls", type=int)
    synth.add_argument("--n-features", dest="n_features", type=int)
    synth.add_argument("--n-informative", dest="n_informative", type=int)
    synth.add_argument("--effect-size", dest="effect_size", type=float)

    p = sub.add_parser("gen", parents=[common, synth], help="generate a synthetic cohort")
    p = sub.add_parser("balance", parents=[common, balancing], help="balance classes")
    p.add_argument("--input", required=True)
    p = sub.add_parser("select", parents=[common, ga], help="GA feature selection")
    p.add_argument("--input", required=True)
    p = sub.add_parser("train", parents=[common, balancing, train], help="train the MLP on selected features")
    p.add_argument("--input", required=True)
    p.add_argument("--subset", required=True, help="subset CSV from 'select'")
    p = sub.add_parser("evaluate", parents=[common], help="score a stored model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--name", default="evaluation", help="basename of the report files")
    p = sub.add_parser("cv", parents=[common, balancing, ga, train, cv],
                       help="stratified cross-validation of select+train")
    p.add_argument("--input", required=True)
    p = sub.add_parser("run-all", parents=[common, balancing, ga, train, cv, synth],
                       help="gen (if no --input), balance, cv, select, train, evaluate")
    p.add_argument("--input")
    return parser


def _error_record(exc, kind):
    record = {"error": {"type": kind, "message": str(exc)}}
    if isinstance(exc, ConfigError):
        record["error"]["problems"] = exc.problems
    return json.dumps(record, sort_keys=True)


def main(argv=None) -> int:
    from . import pipeline

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        out = _out_dir(args, cfg)
        if args.command == "gen":
            written = pipeline.stage_gen(cfg, out, args.force)
        elif args.command == "balance":
            written = pipeline.stage_balance(cfg, args.input, out, args.force)
        elif args.command == "select":
            written = pipeline.stage_select(cfg, args.input, out, args.force, args.threads)
        elif args.command == "train":
            written = pipeline.stage_train(cfg, args.input, args.subset, out, args.force)
        elif args.command == "evaluate":
            written = pipeline.stage_evaluate(cfg, args.model, args.input, out, args.force, args.name)
        elif args.command == "cv":
            written = pipeline.stage_cv(cfg, args.input, out, args.force, args.threads)
        else:
            written = pipeline.stage_run_all(cfg, out, args.force, args.threads)
    except ConfigError as exc:
        print(_error_record(exc, "config"), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable record
        print(_error_record(exc, type(exc).__name__), file=sys.stderr)
        return 1
    for name, path in written.items():
        print(f"{name}\t{path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
