"""Outer stratified cross-validation of the select-then-train pipeline.

For every outer fold the training part is split (stratified) into an inner
training subset and a validation subset. The standardizer is fit on the
inner training subset, the GA (when enabled) searches features on that
same subset, the MLP trains with early stopping on the validation subset,
and the fold's untouched test partition is scored.
"""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._seed import mix
from .config import PipelineConfig
from .data import (
    FeatureSubset,
    LabeledDataset,
    Standardizer,
    fit_standardizer,
    stratified_kfold,
    stratified_split,
)
from .ga import ga_select
from .metrics import MetricsReport, evaluate_predictions
from .mlp import MlpModel, TrainingHistory, init_model, predict_proba, scg_train
from .resample import replicate_oversample, smote

log = logging.getLogger(__name__)


@dataclass
class FoldResult:
    fold: int
    report: MetricsReport
    history: TrainingHistory
    subset: FeatureSubset
    model: MlpModel
    standardizer: Standardizer
    n_train: int
    n_val: int
    n_test: int
    ga_best_fitness: Optional[float] = None

    def summary(self) -> dict:
        return {
            "fold": self.fold,
            "n_train": self.n_train,
            "n_val": self.n_val,
            "n_test": self.n_test,
            "accuracy": self.report.accuracy,
            "auc_macro": self.report.auc_macro,
            "best_epoch": self.history.best_epoch,
            "epochs_run": self.history.n_epochs,
            "stop_reason": self.history.stop_reason,
            "ga_best_fitness": self.ga_best_fitness,
            "subset_indices": list(self.subset.indices),
        }


@dataclass
class CvResult:
    folds: list

    @property
    def k(self) -> int:
        return len(self.folds)

    @property
    def fold_accuracies(self) -> list:
        return [f.report.accuracy for f in self.folds]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def final(self) -> FoldResult:
        """The last fold, whose test partition is the headline test report."""
        return self.folds[-1]


def balance_dataset(data: LabeledDataset, cfg: PipelineConfig, seed: int) -> LabeledDataset:
    if cfg.balance == "smote":
        return smote(data, dataclasses.replace(cfg.smote, seed=seed))
    if cfg.balance == "replicate":
        return replicate_oversample(data, seed)
    return data


def fit_fold(
    train_part: LabeledDataset,
    cfg: PipelineConfig,
    seed: int,
    subset: Optional[FeatureSubset] = None,
    threads: int = 1,
):
    """Split, balance (within-fold mode), standardize, select and train.

    Returns ``(model, standardizer_on_subset, subset, history, sizes, ga_best)``
    where ``sizes`` is ``(n_inner_train, n_val)``.
    """
    if min(train_part.class_counts()) >= 2:
        tr, va = stratified_split(train_part.labels, cfg.validation_fraction, mix(seed, "inner_split"))
        inner, val = train_part.subset_rows(tr), train_part.subset_rows(va)
    else:
        log.warning("too few samples for a validation split; validating on the training set")
        inner = val = train_part
    if cfg.placement == "within_fold":
        inner = balance_dataset(inner, cfg, mix(seed, "balance"))

    std = fit_standardizer(inner)
    ga_best = None
    if subset is None:
        if cfg.select_features:
            Z = inner.with_values(std.transform(inner.values))
            ga_cfg = dataclasses.replace(cfg.ga, seed=mix(seed, "ga"))
            subset, hist = ga_select(Z, ga_cfg, threads=threads)
            ga_best = hist.best_fitness[-1]
        else:
            subset = FeatureSubset(range(train_part.n_features), train_part.n_features)
    cols = subset.as_array()
    std_sub = std.restrict(cols)
    X_tr = std_sub.transform(inner.values[:, cols])
    X_va = std_sub.transform(val.values[:, cols])

    sizes = (len(cols),) + tuple(cfg.hidden_layers) + (2,)
    model0 = init_model(sizes, mix(seed, "mlp_init"))
    tcfg = dataclasses.replace(cfg.train_config, seed=mix(seed, "mlp"))
    model, history = scg_train(model0, (X_tr, inner.labels), (X_va, val.labels), tcfg)
    return model, std_sub, subset, history, (inner.n_samples, val.n_samples), ga_best


def _run_fold(data, plan, fold, cfg, subset):
    train_idx, test_idx = plan.train_indices(fold), plan.test_indices(fold)
    seed = mix(cfg.master_seed, "cv_fold", fold)
    model, std, sub, history, (n_tr, n_va), ga_best = fit_fold(
        data.subset_rows(train_idx), cfg, seed, subset
    )
    test = data.subset_rows(test_idx)
    proba = predict_proba(model, std.transform(test.values[:, sub.as_array()]))
    report = evaluate_predictions(test.labels, proba)
    log.info("fold %d: accuracy %.4f, best epoch %d", fold, report.accuracy, history.best_epoch)
    return FoldResult(fold, report, history, sub, model, std, n_tr, n_va, test.n_samples, ga_best)


def cross_validate(
    data: LabeledDataset,
    cfg: PipelineConfig,
    subset: Optional[FeatureSubset] = None,
    threads: int = 1,
) -> CvResult:
    """Stratified k-fold evaluation of the full pipeline.

    ``data`` is used as given (balance it first for the ``before_cv``
    placement). A fixed ``subset`` skips the per-fold GA. Folds run on up to
    ``threads`` workers; each fold derives its seeds from the master seed and
    its index, so results do not depend on scheduling.
    """
    plan = stratified_kfold(data.labels, cfg.k_folds, mix(cfg.master_seed, "cv_plan"))
    folds = range(cfg.k_folds)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda f: _run_fold(data, plan, f, cfg, subset), folds))
    else:
        results = [_run_fold(data, plan, f, cfg, subset) for f in folds]
    return CvResult(results)
