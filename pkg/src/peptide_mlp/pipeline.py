"""Pipeline stages that read and write artifacts in an output directory.

Each stage function returns the paths it wrote. Outputs never carry
timestamps or absolute paths, so reruns with identical inputs and seed are
byte-identical. CSV outputs get a ``<name>.provenance.json`` sidecar; JSON
reports and the model container embed their provenance directly.
"""
from __future__ import annotations

import dataclasses
import hashlib
import logging
from pathlib import Path
from typing import Optional

from . import __version__
from ._seed import mix
from .config import PipelineConfig
from .crossval import balance_dataset, cross_validate, fit_fold
from .data import LABEL_NAMES, FeatureSubset, LabeledDataset, fit_standardizer, load_csv, save_csv
from .ga import ga_select
from .metrics import evaluate_predictions
from .mlp import predict_proba
from .persist import (
    REPORT_SCHEMA_VERSION,
    ModelBundle,
    load_model,
    load_subset_csv,
    save_history_csv,
    save_model,
    save_roc_csv,
    save_subset_csv,
    write_json,
)
from .synth import SynthConfig, generate, save_planted

log = logging.getLogger(__name__)


class OutputExistsError(FileExistsError):
    pass


def _check_writable(paths, force: bool):
    existing = [str(p) for p in paths if Path(p).exists()]
    if existing and not force:
        raise OutputExistsError(
            "refusing to overwrite existing output (pass --force): " + ", ".join(existing)
        )


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(cfg: PipelineConfig, stage: str, inputs: Optional[dict] = None) -> dict:
    """Resolved config (minus filesystem locations), seed and input digests."""
    conf = cfg.to_dict()
    conf.pop("input", None)
    conf.pop("output_dir", None)
    return {
        "stage": stage,
        "master_seed": cfg.master_seed,
        "package_version": __version__,
        "config": conf,
        "inputs": {name: file_sha256(p) for name, p in (inputs or {}).items()},
    }


def _sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".provenance.json")


def _dataset_summary(data: LabeledDataset) -> dict:
    n_case, n_control = data.class_counts()
    return {
        "n_samples": data.n_samples,
        "n_features": data.n_features,
        "class_counts": {"case": n_case, "control": n_control},
    }


# ---------------------------------------------------------------------------
# Stages

def stage_gen(cfg: PipelineConfig, out_dir, force=False) -> dict:
    synth_cfg = dataclasses.replace(cfg.synth or SynthConfig(), seed=mix(cfg.master_seed, "gen"))
    out_dir = Path(out_dir)
    paths = {"dataset": out_dir / "dataset.csv", "planted": out_dir / "planted.csv"}
    _check_writable(list(paths.values()) + [_sidecar(p) for p in paths.values()], force)
    data, planted = generate(synth_cfg)
    save_csv(data, paths["dataset"])
    save_planted(planted, data.feature_ids, paths["planted"])
    prov = provenance(cfg, "gen")
    for p in paths.values():
        write_json(prov, _sidecar(p))
    return paths


def stage_balance(cfg: PipelineConfig, input_path, out_dir, force=False) -> dict:
    out = Path(out_dir) / "balanced.csv"
    _check_writable([out, _sidecar(out)], force)
    data = load_csv(input_path)
    balanced = balance_dataset(data, cfg, mix(cfg.master_seed, "balance"))
    save_csv(balanced, out)
    write_json(provenance(cfg, "balance", {"dataset": input_path}), _sidecar(out))
    return {"dataset": out}


def stage_select(cfg: PipelineConfig, input_path, out_dir, force=False, threads=1) -> dict:
    out_dir = Path(out_dir)
    paths = {"subset": out_dir / "subset.csv", "ga_history": out_dir / "ga_history.csv"}
    _check_writable(list(paths.values()) + [_sidecar(paths["subset"])], force)
    data = load_csv(input_path)
    std = fit_standardizer(data)
    ga_cfg = dataclasses.replace(cfg.ga, seed=mix(cfg.master_seed, "select"))
    subset, history = ga_select(data.with_values(std.transform(data.values)), ga_cfg, threads=threads)
    save_subset_csv(subset, data.feature_ids, paths["subset"])
    with open(paths["ga_history"], "w", encoding="utf-8") as fh:
        fh.write("generation,best_fitness,mean_fitness\n")
        for g, (b, m) in enumerate(zip(history.best_fitness, history.mean_fitness)):
            fh.write(f"{g},{b!r},{m!r}\n")
    write_json(provenance(cfg, "select", {"dataset": input_path}), _sidecar(paths["subset"]))
    return paths


def stage_train(cfg: PipelineConfig, input_path, subset_path, out_dir, force=False) -> dict:
    out_dir = Path(out_dir)
    paths = {"model": out_dir / "model.pmlp", "curves": out_dir / "curves.csv"}
    _check_writable(list(paths.values()) + [_sidecar(paths["curves"])], force)
    data = load_csv(input_path)
    subset = load_subset_csv(subset_path, data.n_features)
    prov = provenance(cfg, "train", {"dataset": input_path, "subset": subset_path})
    model, std, subset, history, _, _ = fit_fold(data, cfg, mix(cfg.master_seed, "train"), subset)
    bundle = ModelBundle(model, std, subset, tuple(data.feature_ids[j] for j in subset.indices), prov)
    save_model(bundle, paths["model"])
    save_history_csv(history, paths["curves"])
    write_json(prov, _sidecar(paths["curves"]))
    return paths


def evaluation_report(bundle: ModelBundle, data: LabeledDataset, prov: dict) -> tuple[dict, object]:
    proba = predict_proba(bundle.model, bundle.transform(data))
    report = evaluate_predictions(data.labels, proba)
    doc = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "evaluation",
        "provenance": prov,
        "dataset": _dataset_summary(data),
        "metrics": report.to_dict(),
    }
    return doc, report


def stage_evaluate(cfg: PipelineConfig, model_path, input_path, out_dir, force=False,
                   name="evaluation") -> dict:
    out_dir = Path(out_dir)
    paths = {"report": out_dir / f"{name}.json", "roc": out_dir / f"{name}_roc.csv"}
    _check_writable(paths.values(), force)
    bundle = load_model(model_path)
    data = load_csv(input_path)
    prov = provenance(cfg, "evaluate", {"dataset": input_path, "model": model_path})
    # a report describes the stored model, so it carries the model's own settings
    for key in ("config", "master_seed"):
        if key in bundle.provenance:
            prov[key] = bundle.provenance[key]
    doc, report = evaluation_report(bundle, data, prov)
    write_json(doc, paths["report"])
    save_roc_csv(report.roc[LABEL_NAMES[0]], paths["roc"])
    return paths


def cv_report(result, data: LabeledDataset, prov: dict) -> dict:
    final = result.final.report
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "cv_report",
        "provenance": prov,
        "dataset": _dataset_summary(data),
        "k_folds": result.k,
        "mean_cv_accuracy": result.mean_accuracy,
        "fold_accuracies": result.fold_accuracies,
        "folds": [f.summary() for f in result.folds],
        "final_fold": final.to_dict(),
        "final_test_accuracy": final.accuracy,
        "auc_macro": final.auc_macro,
        "auc_micro": final.auc_micro,
        "mcc": final.mcc,
        "kappa": final.kappa,
    }


def stage_cv(cfg: PipelineConfig, input_path, out_dir, force=False, threads=1) -> dict:
    """Cross-validate the pipeline on an (already balanced) dataset."""
    out_dir = Path(out_dir)
    paths = {
        "report": out_dir / "report.json",
        "final_fold_curves": out_dir / "final_fold_curves.csv",
        "final_fold_roc": out_dir / "final_fold_roc.csv",
    }
    _check_writable(paths.values(), force)
    data = load_csv(input_path)
    result = cross_validate(data, cfg, threads=threads)
    write_json(cv_report(result, data, provenance(cfg, "cv", {"dataset": input_path})), paths["report"])
    save_history_csv(result.final.history, paths["final_fold_curves"])
    save_roc_csv(result.final.report.roc[LABEL_NAMES[0]], paths["final_fold_roc"])
    return paths


def stage_run_all(cfg: PipelineConfig, out_dir, force=False, threads=1) -> dict:
    """gen (when no input) -> balance -> cv -> select -> train -> evaluate."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    input_path = cfg.input
    if input_path is None:
        written.update(stage_gen(cfg, out_dir, force))
        input_path = written["dataset"]
    if cfg.placement == "before_cv" and cfg.balance != "none":
        written["balanced"] = stage_balance(cfg, input_path, out_dir, force)["dataset"]
        cv_input = written["balanced"]
    else:
        cv_input = input_path
    written.update(stage_cv(cfg, cv_input, out_dir, force, threads))
    if cfg.select_features:
        written.update(stage_select(cfg, cv_input, out_dir, force, threads))
    else:
        sub_path = out_dir / "subset.csv"
        _check_writable([sub_path], force)
        ids = load_csv(cv_input).feature_ids
        save_subset_csv(FeatureSubset(range(len(ids)), len(ids)), ids, sub_path)
        written["subset"] = sub_path
    written.update(stage_train(cfg, cv_input, written["subset"], out_dir, force))
    ev = stage_evaluate(cfg, written["model"], cv_input, out_dir, force, name="final_model_evaluation")
    written["final_model_evaluation"] = ev["report"]
    written["final_model_roc"] = ev["roc"]
    return written

