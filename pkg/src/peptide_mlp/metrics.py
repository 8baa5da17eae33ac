"""Confusion-matrix metrics, agreement coefficients and ROC/AUC.

Class 0 is the case class and class 1 the control class throughout. A
confusion matrix has true classes on rows and predicted classes on columns.
Ratios with a zero denominator are reported as 0 and named in the
``degenerate`` list of the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import LABEL_NAMES


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64, copy=True)
        if c.shape != (2, 2) or np.any(c < 0):
            raise ValueError("confusion matrix must be a 2x2 array of nonnegative counts")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def tolist(self):
        return self.counts.tolist()


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.intp)
    y_pred = np.asarray(y_pred, dtype=np.intp)
    if y_true.shape != y_pred.shape or y_true.size < 1:
        raise ValueError("y_true and y_pred must be non-empty and of equal length")
    if np.any((y_true < 0) | (y_true > 1)) or np.any((y_pred < 0) | (y_pred > 1)):
        raise ValueError("labels must be 0 (case) or 1 (control)")
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def _ratio(num, den, name, degenerate):
    if den == 0:
        degenerate.append(name)
        return 0.0
    return num / den


def class_metrics(cm: ConfusionMatrix, degenerate=None) -> dict:
    """Per-class precision, sensitivity, specificity and F1, plus accuracy.

    Returns ``{"per_class": {"case": {...}, "control": {...}}, "accuracy": ..,
    "degenerate": [...]}``.
    """
    c = cm.counts
    degenerate = [] if degenerate is None else degenerate
    total = int(c.sum())
    per_class = {}
    for k, name in enumerate(LABEL_NAMES):
        tp = int(c[k, k])
        fn = int(c[k].sum()) - tp
        fp = int(c[:, k].sum()) - tp
        tn = total - tp - fn - fp
        precision = _ratio(tp, tp + fp, f"{name}.precision", degenerate)
        sensitivity = _ratio(tp, tp + fn, f"{name}.sensitivity", degenerate)
        specificity = _ratio(tn, tn + fp, f"{name}.specificity", degenerate)
        f1 = _ratio(2 * tp, 2 * tp + fp + fn, f"{name}.f1", degenerate)
        per_class[name] = {
            "precision": precision,
            "sensitivity": sensitivity,
            "specificity": specificity,
            "f1": f1,
        }
    accuracy = _ratio(int(np.trace(c)), total, "accuracy", degenerate)
    return {"per_class": per_class, "accuracy": accuracy, "degenerate": degenerate}


def mcc(cm: ConfusionMatrix, degenerate=None) -> float:
    """Matthews correlation; 0 when any marginal is empty."""
    (tp, fn), (fp, tn) = cm.counts.tolist()
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if den == 0:
        if degenerate is not None:
            degenerate.append("mcc")
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(den)


def kappa(cm: ConfusionMatrix, degenerate=None) -> float:
    """Cohen's kappa between predicted and true labels."""
    c = cm.counts
    n = int(c.sum())
    po = int(np.trace(c)) / n
    pe = float(c.sum(axis=1) @ c.sum(axis=0)) / (n * n)
    if pe == 1.0:
        if degenerate is not None:
            degenerate.append("kappa")
        return 0.0
    return (po - pe) / (1.0 - pe)


# ---------------------------------------------------------------------------
# ROC

@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))


def roc_points(scores, positive) -> RocCurve:
    """ROC curve from scores where higher means "more positive".

    ``positive`` is a boolean array (or 0/1) marking positives. Thresholds
    sweep the distinct scores in descending order, each tie group producing
    a single point; the curve runs from (0, 0) at threshold +inf to (1, 1).
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive).astype(bool)
    if scores.shape != positive.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D arrays of equal length")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative sample")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = positive[order]
    tp = np.cumsum(p)
    fp = np.cumsum(~p)
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tpr = np.r_[0.0, tp[last_of_group] / n_pos]
    fpr = np.r_[0.0, fp[last_of_group] / n_neg]
    thresholds = np.r_[np.inf, s[last_of_group]]
    return RocCurve(fpr, tpr, thresholds)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under an ROC curve."""
    x, y = curve.fpr, curve.tpr
    return float(np.sum((x[1:] - x[:-1]) * (y[1:] + y[:-1])) / 2.0)


def auc_micro(proba, y_true) -> float:
    """AUC over the pooled (sample, class) one-vs-rest indicator set."""
    proba = np.asarray(proba, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.intp)
    indicators = np.zeros_like(proba, dtype=bool)
    indicators[np.arange(y_true.size), y_true] = True
    return auc(roc_points(proba.ravel(), indicators.ravel()))


# ---------------------------------------------------------------------------
# Full report

@dataclass
class MetricsReport:
    confusion: ConfusionMatrix
    per_class: dict
    accuracy: float
    macro: dict
    mcc: float
    kappa: float
    auc_per_class: dict
    auc_macro: float
    auc_micro: float
    roc: dict = field(repr=False)
    degenerate: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "classes": list(LABEL_NAMES),
            "confusion_matrix": self.confusion.tolist(),
            "n_samples": self.confusion.total,
            "accuracy": self.accuracy,
            "per_class": {
                name: dict(self.per_class[name], auc=self.auc_per_class[name]) for name in LABEL_NAMES
            },
            "macro": self.macro,
            "mcc": self.mcc,
            "kappa": self.kappa,
            "auc_macro": self.auc_macro,
            "auc_micro": self.auc_micro,
            "roc": {
                name: {"fpr": curve.fpr.tolist(), "tpr": curve.tpr.tolist()}
                for name, curve in self.roc.items()
            },
            "degenerate": list(self.degenerate),
        }


def evaluate_predictions(y_true, proba) -> MetricsReport:
    """Build the complete report from true labels and class probabilities.

    ``proba`` has shape (n, 2); predicted labels are its row-wise argmax,
    ties going to class 0.
    """
    y_true = np.asarray(y_true, dtype=np.intp)
    proba = np.asarray(proba, dtype=np.float64)
    y_pred = np.argmax(proba, axis=1)
    cm = confusion(y_true, y_pred)
    degenerate: list = []
    cls = class_metrics(cm, degenerate)
    macro = {
        key: float(np.mean([cls["per_class"][name][key] for name in LABEL_NAMES]))
        for key in ("precision", "sensitivity", "specificity", "f1")
    }
    roc, auc_pc = {}, {}
    for k, name in enumerate(LABEL_NAMES):
        roc[name] = roc_points(proba[:, k], y_true == k)
        auc_pc[name] = auc(roc[name])
    return MetricsReport(
        confusion=cm,
        per_class=cls["per_class"],
        accuracy=cls["accuracy"],
        macro=macro,
        mcc=mcc(cm, degenerate),
        kappa=kappa(cm, degenerate),
        auc_per_class=auc_pc,
        auc_macro=float(np.mean(list(auc_pc.values()))),
        auc_micro=auc_micro(proba, y_true),
        roc=roc,
        degenerate=degenerate,
    )
