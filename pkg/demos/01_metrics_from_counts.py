"""
Evaluation metrics from a confusion matrix
==========================================

A held-out fold of 69 samples (34 cases, 35 controls) with one case
missed and two controls misclassified gives the confusion matrix
[[33, 1], [2, 33]]. Rows are true classes, columns are predictions,
and the class order is (case, control).
"""
import numpy as np

from peptide_mlp.metrics import ConfusionMatrix, auc, class_metrics, kappa, mcc, roc_points

cm = ConfusionMatrix(np.array([[33, 1], [2, 33]]))
m = class_metrics(cm)

print(f"accuracy      {m['accuracy']:.4f}")
for name, values in m["per_class"].items():
    print(name, {k: round(v, 4) for k, v in values.items()})

# MCC and Cohen's kappa correct for chance agreement; with balanced
# classes they land close together.
print(f"MCC   {mcc(cm):.4f}")
print(f"kappa {kappa(cm):.4f}")

# %%
# Degenerate matrices do not raise. An undefined ratio is reported as 0
# and its name is added to the flag list, which matters inside GA folds
# where a weak subset can predict a single class.
flags = []
class_metrics(ConfusionMatrix(np.array([[5, 0], [5, 0]])), flags)
mcc(ConfusionMatrix(np.array([[5, 0], [5, 0]])), flags)
print("degenerate:", flags)

# %%
# ROC curves sweep the distinct scores from high to low; tied scores form
# a single diagonal step, so the trapezoidal area equals the rank statistic
# P(pos > neg) + 0.5 P(pos == neg).
scores = np.array([0.1, 0.4, 0.35, 0.8])
positive = np.array([False, False, True, True])
curve = roc_points(scores, positive)
for fpr, tpr, thr in curve.points():
    print(f"threshold {thr:>5}: fpr {fpr:.2f} tpr {tpr:.2f}")
print("AUC", auc(curve))
