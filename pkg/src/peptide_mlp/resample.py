"""Class balancing: SMOTE interpolation and plain minority replication."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._seed import rng_for
from .data import LabeledDataset, Standardizer

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmoteConfig:
    """SMOTE settings.

    ``target_minority_count=None`` means "match the majority class".
    ``standardize_distances`` controls whether neighbour search runs on
    z-scored features when no explicit standardizer is passed to :func:`smote`.
    """

    k_neighbors: int = 5
    target_minority_count: Optional[int] = None
    seed: int = 0
    standardize_distances: bool = True

    def problems(self) -> list[str]:
        out = []
        if self.k_neighbors < 1:
            out.append("k_neighbors: must be >= 1")
        if self.target_minority_count is not None and self.target_minority_count < 0:
            out.append("target_minority_count: must be >= 0")
        return out

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("invalid SmoteConfig: " + "; ".join(problems))


def _minority_majority(labels):
    counts = np.bincount(labels, minlength=2)
    minority = int(np.argmin(counts))  # tie -> class 0
    return minority, 1 - minority, counts


def nearest_neighbors(X: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest other rows of ``X`` (exact, Euclidean).

    Ties in distance are broken by row index.
    """
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def smote(data: LabeledDataset, cfg: SmoteConfig, standardizer: Optional[Standardizer] = None) -> LabeledDataset:
    """Add synthetic minority rows until the minority reaches its target count.

    Each synthetic row is ``x + lam * (x_nn - x)`` with ``x`` drawn uniformly
    from the minority class, ``x_nn`` one of its ``k`` nearest minority
    neighbours and ``lam ~ U[0, 1)``. Original rows come first and are left
    untouched; synthetic rows follow in generation order with ids
    ``synthetic-1``, ``synthetic-2``, ...
    """
    minority, majority, counts = _minority_majority(data.labels)
    n_min = int(counts[minority])
    if n_min < 2:
        raise ValueError(f"SMOTE needs at least 2 minority samples, found {n_min}")
    target = int(counts[majority]) if cfg.target_minority_count is None else int(cfg.target_minority_count)
    if target < n_min:
        raise ValueError(f"target_minority_count {target} is below the current minority count {n_min}")
    n_new = target - n_min
    if n_new == 0:
        return data

    k = cfg.k_neighbors
    if k > n_min - 1:
        log.warning("k_neighbors=%d clamped to %d (minority class has %d samples)", k, n_min - 1, n_min)
        k = n_min - 1

    min_idx = np.flatnonzero(data.labels == minority)
    X_min = data.values[min_idx]
    if standardizer is not None:
        X_dist = standardizer.transform(X_min)
    elif cfg.standardize_distances:
        std = X_min.std(axis=0, ddof=1)
        X_dist = (X_min - X_min.mean(axis=0)) / np.where(std > 0, std, 1.0)
    else:
        X_dist = X_min
    neighbors = nearest_neighbors(X_dist, k)

    rng = rng_for(cfg.seed, "smote")
    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, k, size=n_new)
    lam = rng.random(n_new)
    nn = neighbors[base, pick]
    synth = X_min[base] + lam[:, None] * (X_min[nn] - X_min[base])

    return LabeledDataset(
        np.vstack([data.values, synth]),
        np.concatenate([data.labels, np.full(n_new, minority, dtype=np.int8)]),
        data.feature_ids,
        data.sample_ids + tuple(f"synthetic-{i + 1}" for i in range(n_new)),
    )


def replicate_oversample(data: LabeledDataset, seed: int) -> LabeledDataset:
    """Duplicate minority rows (sampled with replacement) until classes balance."""
    minority, majority, counts = _minority_majority(data.labels)
    if counts[minority] == 0:
        raise ValueError("replication needs both classes to be present")
    n_new = int(counts[majority] - counts[minority])
    if n_new == 0:
        return data
    min_idx = np.flatnonzero(data.labels == minority)
    rng = rng_for(seed, "replicate")
    picks = min_idx[rng.integers(0, min_idx.size, size=n_new)]
    return LabeledDataset(
        np.vstack([data.values, data.values[picks]]),
        np.concatenate([data.labels, data.labels[picks]]),
        data.feature_ids,
        data.sample_ids + tuple(f"{data.sample_ids[p]}-replica-{i + 1}" for i, p in enumerate(picks)),
    )
