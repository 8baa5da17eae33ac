"""
Balancing classes with SMOTE
============================

The minority class (cases, label 0) is grown by interpolating between a
minority sample and one of its k nearest minority neighbours. Here a
2-D toy cohort of 12 cases and 40 controls is balanced to 40/40.
"""
import numpy as np

from peptide_mlp.data import LabeledDataset
from peptide_mlp.resample import SmoteConfig, replicate_oversample, smote

rng = np.random.default_rng(0)
cases = rng.normal([0, 0], 0.5, size=(12, 2))
controls = rng.normal([2, 2], 0.7, size=(40, 2))
data = LabeledDataset(
    np.vstack([cases, controls]),
    np.r_[np.zeros(12), np.ones(40)].astype(int),
    ["x", "y"],
    [f"s{i}" for i in range(52)],
)
print("before:", data.class_counts())

balanced = smote(data, SmoteConfig(k_neighbors=5, seed=1))
print("after SMOTE:", balanced.class_counts())

# Originals come first and are untouched; synthetic rows follow.
assert np.array_equal(balanced.values[:52], data.values)
print(balanced.sample_ids[52:55], "...")

# %%
# Every synthetic point lies on a segment between two original cases, so
# the synthetic cloud stays inside the convex hull of the minority class.
synthetic = balanced.values[52:]
print("synthetic x range", synthetic[:, 0].min().round(3), synthetic[:, 0].max().round(3))
print("original  x range", cases[:, 0].min().round(3), cases[:, 0].max().round(3))

# %%
# Replication is the simpler baseline: existing cases are copied.
replicated = replicate_oversample(data, seed=1)
print("after replication:", replicated.class_counts(), replicated.sample_ids[-1])
