"""Shared synthetic fixtures built directly with numpy (independent of peptide_mlp.synth)."""
import numpy as np

from peptide_mlp.data import LabeledDataset, fit_standardizer


def planted_fixture(seed=0, n_per_class=100, n_features=100, n_planted=5, shift=2.0):
    """Gaussian features; the planted columns' class means differ by ``shift`` sigma.

    Returns the standardized dataset and the sorted planted indices.
    """
    rng = np.random.default_rng([seed, 20231])
    y = np.r_[np.zeros(n_per_class), np.ones(n_per_class)].astype(int)
    X = rng.normal(size=(y.size, n_features))
    planted = np.sort(rng.choice(n_features, size=n_planted, replace=False))
    X[:, planted] += shift * y[:, None]
    ds = LabeledDataset(X, y, [f"f{j}" for j in range(n_features)], [f"s{i}" for i in range(y.size)])
    std = fit_standardizer(ds)
    return ds.with_values(std.transform(ds.values)), planted.tolist()


def separable_fixture(seed=0, n_per_class=50, n_features=20, planted=(2, 7, 11)):
    rng = np.random.default_rng([seed, 7])
    y = np.r_[np.zeros(n_per_class), np.ones(n_per_class)].astype(int)
    X = rng.normal(size=(y.size, n_features))
    sign = np.where(y == 1, 1.0, -1.0)
    X[:, list(planted)] = sign[:, None] * (5.0 + rng.uniform(0, 1, (y.size, len(planted))))
    ds = LabeledDataset(X, y, [f"f{j}" for j in range(n_features)], [f"s{i}" for i in range(y.size)])
    return ds, list(planted)
