import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peptide_mlp.metrics import (
    ConfusionMatrix,
    RocCurve,
    auc,
    auc_micro,
    class_metrics,
    confusion,
    evaluate_predictions,
    kappa,
    mcc,
    roc_points,
)

REFERENCE = ConfusionMatrix(np.array([[33, 1], [2, 33]]))


def mann_whitney(scores, positive):
    """Tie-corrected rank statistic: P(pos > neg) + 0.5 P(pos == neg), by brute force."""
    pos = scores[positive][:, None]
    neg = scores[~positive][None, :]
    return (np.sum(pos > neg) + 0.5 * np.sum(pos == neg)) / (pos.size * neg.size)


def test_confusion_from_labels():
    y_true = np.r_[np.zeros(34), np.ones(35)].astype(int)
    y_pred = y_true.copy()
    y_pred[0] = 1
    y_pred[34:36] = 0
    np.testing.assert_array_equal(confusion(y_true, y_pred).counts, [[33, 1], [2, 33]])
    np.testing.assert_array_equal(confusion([0, 1, 1], [0, 1, 1]).counts, [[1, 0], [0, 2]])


def test_confusion_errors():
    with pytest.raises(ValueError):
        confusion([0, 1], [0])
    with pytest.raises(ValueError):
        confusion([0, 2], [0, 1])


def test_reference_class_metrics():
    m = class_metrics(REFERENCE)
    case = m["per_class"]["case"]
    assert m["accuracy"] == pytest.approx(0.9565, abs=5e-5)
    assert case["precision"] == pytest.approx(0.9429, abs=5e-5)
    assert case["sensitivity"] == pytest.approx(0.9706, abs=5e-5)
    assert case["specificity"] == pytest.approx(0.9429, abs=5e-5)
    assert case["f1"] == pytest.approx(0.9565, abs=5e-5)
    control = m["per_class"]["control"]
    assert control["precision"] == pytest.approx(0.9706, abs=5e-5)
    assert control["sensitivity"] == pytest.approx(0.9429, abs=5e-5)
    # exact rational values
    assert case["precision"] == 33 / 35 and case["sensitivity"] == 33 / 34
    assert m["accuracy"] == 66 / 69 and m["degenerate"] == []


def test_reference_mcc_kappa():
    assert mcc(REFERENCE) == pytest.approx(1087 / 1190, rel=1e-14)
    assert mcc(REFERENCE) == pytest.approx(0.9134, abs=5e-5)
    po, pe = 66 / 69, (34 * 35 + 35 * 34) / 69**2
    assert kappa(REFERENCE) == pytest.approx((po - pe) / (1 - pe), rel=1e-14)
    assert kappa(REFERENCE) == pytest.approx(0.9131, abs=5e-5)


def test_reference_macro_precision():
    y_true = np.r_[np.zeros(34), np.ones(35)].astype(int)
    y_pred = y_true.copy()
    y_pred[0], y_pred[34], y_pred[35] = 1, 0, 0
    proba = np.c_[1 - y_pred, y_pred].astype(float)
    report = evaluate_predictions(y_true, proba)
    assert report.macro["precision"] == pytest.approx(0.9567, abs=5e-5)
    assert report.macro["f1"] == pytest.approx(0.9565, abs=5e-5)


def test_perfect_and_chance():
    perfect = ConfusionMatrix(np.array([[7, 0], [0, 7]]))
    m = class_metrics(perfect)
    assert all(v == 1.0 for cls in m["per_class"].values() for v in cls.values())
    assert mcc(perfect) == 1.0 and kappa(perfect) == 1.0
    chance = ConfusionMatrix(np.array([[25, 25], [25, 25]]))
    assert mcc(chance) == 0.0 and kappa(chance) == 0.0


def test_degenerate_one_class_predictions():
    cm = ConfusionMatrix(np.array([[5, 0], [5, 0]]))  # everything predicted case
    flags = []
    m = class_metrics(cm, flags)
    assert m["per_class"]["control"]["precision"] == 0.0
    assert "control.precision" in flags
    assert mcc(cm, flags) == 0.0
    assert "mcc" in flags


def test_auc_stated_example_and_complement():
    scores = np.array([0.1, 0.4, 0.35, 0.8])
    pos = np.array([False, False, True, True])
    assert auc(roc_points(scores, pos)) == 0.75
    assert auc(roc_points(-scores, pos)) == 0.25


def test_auc_perfect_passes_through_corner():
    curve = roc_points([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert (0.0, 1.0) in [(f, t) for f, t, _ in curve.points()]
    assert auc(curve) == 1.0


def test_auc_diagonal():
    assert auc(RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.array([np.inf, 0.0]))) == 0.5


def test_roc_errors():
    with pytest.raises(ValueError):
        roc_points([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        roc_points([0.1, np.nan], [0, 1])


def test_auc_matches_mann_whitney_500_sets():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 80))
        pos = rng.random(n) < rng.uniform(0.1, 0.9)
        pos[0], pos[1] = True, False
        # coarse rounding produces plenty of ties
        scores = np.round(rng.normal(size=n) + pos * rng.uniform(0, 2), int(rng.integers(0, 3)))
        worst = max(worst, abs(auc(roc_points(scores, pos)) - mann_whitney(scores, pos)))
    assert worst <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.booleans()), min_size=2, max_size=40))
def test_roc_properties(pairs):
    scores = np.array([float(s) for s, _ in pairs])
    pos = np.array([p for _, p in pairs])
    if pos.all() or not pos.any():
        return
    curve = roc_points(scores, pos)
    assert curve.fpr[0] == 0 and curve.tpr[0] == 0
    assert curve.fpr[-1] == 1 and curve.tpr[-1] == 1
    assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)
    assert auc(curve) + auc(roc_points(-scores, pos)) == pytest.approx(1.0, abs=1e-12)


def test_auc_micro_oracle():
    rng = np.random.default_rng(7)
    y = rng.integers(0, 2, 50)
    p1 = np.clip(0.5 + 0.3 * (y - 0.5) + rng.normal(0, 0.2, 50), 0, 1)
    proba = np.c_[1 - p1, p1]
    flat_scores = proba.ravel()
    flat_pos = np.zeros_like(proba, dtype=bool)
    flat_pos[np.arange(50), y] = True
    assert auc_micro(proba, y) == pytest.approx(mann_whitney(flat_scores, flat_pos.ravel()), abs=1e-12)


def test_report_dict_shape():
    y = np.array([0, 0, 1, 1, 1])
    proba = np.array([[0.9, 0.1], [0.4, 0.6], [0.2, 0.8], [0.3, 0.7], [0.5, 0.5]])
    report = evaluate_predictions(y, proba)
    d = report.to_dict()
    assert d["confusion_matrix"] == [[1, 1], [1, 2]]  # the 0.5/0.5 tie goes to case
    assert set(d["per_class"]) == {"case", "control"}
    assert d["auc_macro"] == pytest.approx((d["per_class"]["case"]["auc"] + d["per_class"]["control"]["auc"]) / 2)
    assert set(d["roc"]["case"]) == {"fpr", "tpr"}
