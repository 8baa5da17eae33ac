"""On-disk formats: model container, subset CSV, curve CSVs, JSON reports.

Model container layout (all integers little-endian)::

    offset  size  content
    0       8     magic b"PEPMLP\\x00\\x01"
    8       4     uint32 format version (currently 1)
    12      4     uint32 header length H in bytes
    16      H     UTF-8 JSON header (sorted keys)
    16+H    ...   float64 arrays, little-endian, in this order:
                  standardizer mean (d), standardizer std (d),
                  network parameters (flat, layer by layer: W row-major, then b)

The JSON header holds ``layer_sizes``, ``feature_ids`` (the selected
columns, in model input order), ``subset_indices``, ``universe_size``,
``n_params`` and a free-form ``provenance`` object.
"""
from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import FeatureSubset, Standardizer
from .mlp import MlpModel, TrainingHistory, n_params

MAGIC = b"PEPMLP\x00\x01"
FORMAT_VERSION = 1
REPORT_SCHEMA_VERSION = 1


class ContainerError(ValueError):
    pass


@dataclass(frozen=True)
class ModelBundle:
    """Everything needed to score raw intensities: columns, scaling, network."""

    model: MlpModel
    standardizer: Standardizer
    subset: FeatureSubset
    feature_ids: tuple
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.model.n_inputs
        if self.standardizer.mean.shape[0] != d or len(self.subset) != d or len(self.feature_ids) != d:
            raise ValueError("model, standardizer, subset and feature_ids disagree on input size")

    def select_columns(self, dataset):
        """Columns of ``dataset`` feeding the model, located by feature id."""
        lookup = {fid: j for j, fid in enumerate(dataset.feature_ids)}
        missing = [fid for fid in self.feature_ids if fid not in lookup]
        if missing:
            raise ValueError(f"dataset lacks {len(missing)} model features, e.g. {missing[0]!r}")
        return dataset.values[:, [lookup[fid] for fid in self.feature_ids]]

    def transform(self, dataset) -> np.ndarray:
        return self.standardizer.transform(self.select_columns(dataset))


def save_model(bundle: ModelBundle, path) -> None:
    header = {
        "layer_sizes": list(bundle.model.layer_sizes),
        "feature_ids": list(bundle.feature_ids),
        "subset_indices": list(bundle.subset.indices),
        "universe_size": bundle.subset.universe_size,
        "n_params": int(bundle.model.params.size),
        "provenance": bundle.provenance,
    }
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    le = np.dtype("<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(hbytes)))
        fh.write(hbytes)
        for arr in (bundle.standardizer.mean, bundle.standardizer.std, bundle.model.params):
            fh.write(np.ascontiguousarray(arr, dtype=le).tobytes())


def load_model(path) -> ModelBundle:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ContainerError(f"{path}: not a model container (bad magic)")
    version, hlen = struct.unpack("<II", raw[8:16])
    if version != FORMAT_VERSION:
        raise ContainerError(f"{path}: unsupported container version {version}")
    header = json.loads(raw[16 : 16 + hlen].decode("utf-8"))
    sizes = tuple(header["layer_sizes"])
    d = sizes[0]
    n = n_params(sizes)
    if header["n_params"] != n:
        raise ContainerError(f"{path}: parameter count does not match layer sizes")
    body = np.frombuffer(raw, dtype="<f8", offset=16 + hlen)
    if body.size != 2 * d + n:
        raise ContainerError(f"{path}: expected {2 * d + n} float64 values, found {body.size}")
    std = Standardizer(body[:d], body[d : 2 * d])
    model = MlpModel(sizes, body[2 * d :])
    subset = FeatureSubset(header["subset_indices"], header["universe_size"])
    return ModelBundle(model, std, subset, tuple(header["feature_ids"]), header.get("provenance", {}))


# ---------------------------------------------------------------------------
# CSV exports

def save_subset_csv(subset: FeatureSubset, feature_ids, path, order=None) -> None:
    """Write ``rank,feature_index,feature_id``.

    ``order`` optionally ranks the indices (best first); otherwise ascending
    index order is used.
    """
    indices = list(order) if order is not None else list(subset.indices)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "feature_index", "feature_id"])
        for rank, j in enumerate(indices, start=1):
            w.writerow([rank, int(j), feature_ids[j]])


def load_subset_csv(path, universe_size: int) -> FeatureSubset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["rank", "feature_index", "feature_id"]:
            raise ValueError(f"{path}: expected header rank,feature_index,feature_id")
        idx = [int(row["feature_index"]) for row in reader]
    return FeatureSubset(idx, universe_size)


def _fmt(x) -> str:
    return repr(float(x)) if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def save_roc_csv(curve, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("fpr,tpr,threshold\n")
        for fpr, tpr, thr in curve.points():
            fh.write(f"{_fmt(fpr)},{_fmt(tpr)},{_fmt(thr)}\n")


def save_history_csv(history: TrainingHistory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,val_loss,train_acc,val_acc\n")
        for e, tl, vl, ta, va in history.rows():
            fh.write(f"{e},{_fmt(tl)},{_fmt(vl)},{_fmt(ta)},{_fmt(va)}\n")


def write_json(obj, path) -> None:
    """Deterministic JSON: sorted keys, fixed indent, trailing newline."""
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
