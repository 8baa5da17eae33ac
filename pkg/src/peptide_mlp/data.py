"""Data model, CSV ingestion, standardization and stratified partitioning.

Class labels are stored as small integers: ``CASE = 0`` and ``CONTROL = 1``.
Everything downstream treats the case class as class 0, so tie-breaking rules
that favour "class 0" favour cases.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._seed import rng_for

CASE = 0
CONTROL = 1
LABEL_NAMES = ("case", "control")
_LABEL_CODES = {name: code for code, name in enumerate(LABEL_NAMES)}


class DataFormatError(ValueError):
    """Raised for malformed dataset files. The message carries the line number."""


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledDataset:
    """Sample x feature intensity matrix with binary labels.

    Parameters
    ----------
    values : array of shape (n_samples, n_features)
    labels : array of shape (n_samples,)
        ``CASE`` (0) or ``CONTROL`` (1).
    feature_ids, sample_ids : sequences of str
    """

    values: np.ndarray
    labels: np.ndarray
    feature_ids: tuple
    sample_ids: tuple

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        labels = _frozen(self.labels, np.int8)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_ids", tuple(str(f) for f in self.feature_ids))
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))

        n, d = values.shape
        if labels.shape != (n,) or len(self.sample_ids) != n:
            raise ValueError(
                f"row count mismatch: values {n}, labels {labels.shape[0]}, "
                f"sample_ids {len(self.sample_ids)}"
            )
        if len(self.feature_ids) != d:
            raise ValueError(f"column count mismatch: values {d}, feature_ids {len(self.feature_ids)}")
        if len(set(self.feature_ids)) != d:
            raise ValueError("feature_ids must be unique")
        if not np.all((labels == CASE) | (labels == CONTROL)):
            raise ValueError("labels must be CASE (0) or CONTROL (1)")
        if not np.all(np.isfinite(values)):
            raise ValueError("values contain NaN or Inf")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def class_counts(self) -> tuple[int, int]:
        """Return ``(n_case, n_control)``."""
        n_control = int(np.count_nonzero(self.labels == CONTROL))
        return self.n_samples - n_control, n_control

    def subset_rows(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return LabeledDataset(
            self.values[idx],
            self.labels[idx],
            self.feature_ids,
            tuple(self.sample_ids[i] for i in idx),
        )

    def subset_columns(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return LabeledDataset(
            self.values[:, idx],
            self.labels,
            tuple(self.feature_ids[i] for i in idx),
            self.sample_ids,
        )

    def with_values(self, values) -> "LabeledDataset":
        return LabeledDataset(values, self.labels, self.feature_ids, self.sample_ids)


@dataclass(frozen=True)
class FeatureSubset:
    """Fixed-cardinality set of selected column indices."""

    indices: tuple
    universe_size: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("feature indices must be unique")
        if idx and (idx[0] < 0 or idx[-1] >= self.universe_size):
            raise ValueError(f"feature index out of range [0, {self.universe_size})")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "universe_size", int(self.universe_size))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)


@dataclass(frozen=True)
class Standardizer:
    """Per-feature z-score transform fit on training rows only."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen(self.mean, np.float64))
        object.__setattr__(self, "std", _frozen(self.std, np.float64))
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ValueError("mean and std must be 1-D arrays of equal length")
        if not np.all(self.std > 0):
            raise ValueError("std entries must be positive")

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise ValueError(
                f"dimension mismatch: standardizer has {self.mean.shape[0]} features, input has {X.shape[-1]}"
            )
        return (X - self.mean) / self.std

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        if Z.shape[-1] != self.mean.shape[0]:
            raise ValueError("dimension mismatch")
        return Z * self.std + self.mean

    def restrict(self, idx) -> "Standardizer":
        idx = np.asarray(idx, dtype=np.intp)
        return Standardizer(self.mean[idx], self.std[idx])


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "assignments", _frozen(self.assignments, np.intp))

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def folds(self):
        for f in range(self.k):
            yield self.train_indices(f), self.test_indices(f)


# ---------------------------------------------------------------------------
# CSV ingestion

def _parse_label(token: str, lineno: int) -> int:
    try:
        return _LABEL_CODES[token]
    except KeyError:
        raise DataFormatError(
            f"line {lineno}: unknown label {token!r} (expected 'case' or 'control')"
        ) from None


def load_csv(path) -> LabeledDataset:
    """Read ``sample_id,label,<feature_1>,...`` rows into a dataset.

    Row order is preserved. Any malformed line raises :class:`DataFormatError`
    naming the offending line.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("line 1: missing header") from None
        if len(header) < 3 or header[0] != "sample_id" or header[1] != "label":
            raise DataFormatError(
                "line 1: header must start with 'sample_id,label' followed by at least one feature id"
            )
        feature_ids = header[2:]
        seen = set()
        for fid in feature_ids:
            if not fid:
                raise DataFormatError("line 1: empty feature id in header")
            if fid in seen:
                raise DataFormatError(f"line 1: duplicate feature id {fid!r}")
            seen.add(fid)

        width = len(header)
        rows, labels, sample_ids = [], [], []
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != width:
                raise DataFormatError(f"line {lineno}: expected {width} fields, found {len(row)}")
            sample_ids.append(row[0])
            labels.append(_parse_label(row[1], lineno))
            try:
                vals = [float(v) for v in row[2:]]
            except ValueError:
                bad = next(v for v in row[2:] if not _is_float(v))
                raise DataFormatError(f"line {lineno}: non-numeric intensity {bad!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataFormatError(f"line {lineno}: non-finite intensity")
            rows.append(vals)

    if not rows:
        raise DataFormatError("empty dataset")
    return LabeledDataset(np.array(rows, dtype=np.float64), labels, feature_ids, sample_ids)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def save_csv(data: LabeledDataset, path) -> None:
    """Write a dataset in the ``load_csv`` format, 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(("sample_id", "label") + data.feature_ids) + "\n")
        for sid, lab, row in zip(data.sample_ids, data.labels, data.values):
            fh.write(sid + "," + LABEL_NAMES[lab] + "," + ",".join("%.17g" % v for v in row) + "\n")


# ---------------------------------------------------------------------------
# Standardization

def fit_standardizer(data) -> Standardizer:
    """Column means and n-1 standard deviations; zero deviations become 1."""
    X = data.values if isinstance(data, LabeledDataset) else np.asarray(data, dtype=np.float64)
    if X.shape[0] < 2:
        raise ValueError("at least 2 samples are needed to fit a standardizer")
    mean = X.mean(axis=0)
    std = X.std(axis=0, ddof=1)
    std = np.where(std > 0, std, 1.0)
    return Standardizer(mean, std)


def apply_standardizer(std: Standardizer, data: LabeledDataset) -> LabeledDataset:
    return data.with_values(std.transform(data.values))


# ---------------------------------------------------------------------------
# Stratified partitioning

def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_kfold(labels: Sequence[int], k: int, seed: int) -> FoldPlan:
    """Shuffle each class, then deal all classes round-robin into ``k`` folds.

    Dealing continues across class boundaries, so fold sizes differ by at most
    one overall as well as per class.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = rng_for(seed, "stratified_kfold")
    assignments = np.empty(labels.shape[0], dtype=np.intp)
    position = 0
    for cls in (CASE, CONTROL):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise ValueError(f"class {LABEL_NAMES[cls]!r} has {members.size} members, fewer than k={k}")
        members = rng.permutation(members)
        assignments[members] = (position + np.arange(members.size)) % k
        position += members.size
    return FoldPlan(k, assignments)


def stratified_split(labels: Sequence[int], holdout_fraction: float, seed: int):
    """Split indices into ``(train, holdout)`` preserving class proportions.

    Per class, the holdout gets ``round(count * fraction)`` samples (half
    rounds up), at least one.
    """
    labels = np.asarray(labels)
    if not 0 < holdout_fraction < 1:
        raise ValueError("holdout_fraction must lie strictly between 0 and 1")
    rng = rng_for(seed, "stratified_split")
    train, hold = [], []
    for cls in (CASE, CONTROL):
        members = np.flatnonzero(labels == cls)
        n_hold = max(1, _round_half_up(members.size * holdout_fraction))
        if n_hold >= members.size:
            raise ValueError(
                f"holdout fraction {holdout_fraction} leaves no training samples of class {LABEL_NAMES[cls]!r}"
            )
        members = rng.permutation(members)
        hold.append(members[:n_hold])
        train.append(members[n_hold:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(hold))
