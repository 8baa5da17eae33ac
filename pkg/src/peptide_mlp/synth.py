"""Synthetic peptide-intensity cohorts with planted informative features.

Each feature has its own log-normal intensity distribution. Informative
features shift the case-class log mean by ``effect_size`` log standard
deviations, with a random direction per feature. Everything else is
identically distributed across classes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._seed import rng_for
from .data import CASE, CONTROL, LabeledDataset


@dataclass(frozen=True)
class SynthConfig:
    n_cases: int = 82
    n_controls: int = 345
    n_features: int = 5605
    n_informative: int = 50
    effect_size: float = 1.5
    median_intensity: float = 1e4
    log_median_spread: float = 1.0
    log_sigma: float = 0.5
    seed: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.n_cases < 1 or self.n_controls < 1:
            out.append("n_cases/n_controls: each class needs at least one sample")
        if self.n_features < 1:
            out.append("n_features: must be >= 1")
        if not 0 <= self.n_informative <= self.n_features:
            out.append("n_informative: must lie in [0, n_features]")
        if not self.effect_size > 0:
            out.append("effect_size: must be > 0")
        if not self.median_intensity > 0:
            out.append("median_intensity: must be > 0")
        if self.log_median_spread < 0:
            out.append("log_median_spread: must be >= 0")
        if not self.log_sigma > 0:
            out.append("log_sigma: must be > 0")
        return out

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("invalid SynthConfig: " + "; ".join(problems))


def generate(cfg: SynthConfig):
    """Return ``(dataset, planted_indices)``; deterministic per ``cfg.seed``.

    Rows are cases first, then controls. Feature ids are ``pep00001``...
    """
    rng = rng_for(cfg.seed, "synth")
    n = cfg.n_cases + cfg.n_controls
    d = cfg.n_features
    log_mu = math.log(cfg.median_intensity) + cfg.log_median_spread * rng.standard_normal(d)
    log_sd = np.full(d, cfg.log_sigma)
    planted = np.sort(rng.choice(d, size=cfg.n_informative, replace=False))
    direction = rng.choice([-1.0, 1.0], size=cfg.n_informative)

    Z = rng.standard_normal((n, d))
    logs = log_mu + log_sd * Z
    logs[: cfg.n_cases, planted] += direction * cfg.effect_size * log_sd[planted]
    values = np.exp(logs)

    labels = np.r_[np.full(cfg.n_cases, CASE), np.full(cfg.n_controls, CONTROL)]
    width = max(5, len(str(d)))
    feature_ids = [f"pep{j + 1:0{width}d}" for j in range(d)]
    sample_ids = [f"S{i + 1:04d}" for i in range(n)]
    return LabeledDataset(values, labels, feature_ids, sample_ids), planted


def save_planted(planted, feature_ids, path) -> None:
    """Sidecar CSV ``feature_index,feature_id`` listing planted features."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_index", "feature_id"])
        for j in planted:
            w.writerow([int(j), feature_ids[j]])
