import logging

import numpy as np
import pytest

from peptide_mlp.data import LabeledDataset
from peptide_mlp.resample import SmoteConfig, nearest_neighbors, replicate_oversample, smote


def make(values, labels):
    values = np.asarray(values, dtype=float)
    return LabeledDataset(values, labels, [f"f{j}" for j in range(values.shape[1])],
                          [f"s{i}" for i in range(values.shape[0])])


def imbalanced(n_min=82, n_maj=345, d=8, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_min + n_maj, d))
    y = np.r_[np.zeros(n_min), np.ones(n_maj)].astype(int)
    return make(X, y)


def decompose(point, originals):
    """Brute-force search for the pair (i, j) and lambda with point = x_i + lam (x_j - x_i)."""
    D = originals[None, :, :] - originals[:, None, :]        # D[i, j] = x_j - x_i
    R = point[None, :] - originals                          # R[i] = s - x_i
    dd = np.einsum("ijk,ijk->ij", D, D)
    np.fill_diagonal(dd, np.inf)
    lam = np.einsum("ik,ijk->ij", R, D) / dd
    resid = np.linalg.norm(R[:, None, :] - lam[..., None] * D, axis=2)
    i, j = np.unravel_index(np.argmin(resid), resid.shape)
    return i, j, lam[i, j]


def test_reference_counts_82_to_345():
    ds = imbalanced()
    out = smote(ds, SmoteConfig(target_minority_count=345, seed=1))
    assert out.class_counts() == (345, 345)
    assert out.n_samples - ds.n_samples == 263
    assert out.sample_ids[ds.n_samples] == "synthetic-1"
    assert out.sample_ids[-1] == "synthetic-263"


def test_default_target_matches_majority():
    out = smote(imbalanced(), SmoteConfig(seed=2))
    assert out.class_counts() == (345, 345)


def test_noop_when_target_equals_minority():
    ds = imbalanced(n_min=10, n_maj=20)
    assert smote(ds, SmoteConfig(target_minority_count=10)) is ds


def test_two_point_segment():
    ds = make([[0, 0], [1, 1], [5, 5], [6, 6], [7, 7]], [0, 0, 1, 1, 1])
    out = smote(ds, SmoteConfig(k_neighbors=1, target_minority_count=3, seed=9))
    p = out.values[-1]
    assert p[0] == pytest.approx(p[1], abs=1e-15)
    assert 0.0 <= p[0] <= 1.0


def test_originals_preserved_and_majority_untouched():
    ds = imbalanced(n_min=15, n_maj=40)
    out = smote(ds, SmoteConfig(seed=5))
    np.testing.assert_array_equal(out.values[: ds.n_samples], ds.values)
    assert out.sample_ids[: ds.n_samples] == ds.sample_ids
    assert np.sum(out.labels == 1) == 40
    assert np.all(out.labels[ds.n_samples:] == 0)


def test_convexity_with_oracle():
    ds = imbalanced(n_min=12, n_maj=40, d=5, seed=3)
    out = smote(ds, SmoteConfig(k_neighbors=3, seed=11))
    originals = ds.values[ds.labels == 0]
    for p in out.values[ds.n_samples:]:
        i, j, lam = decompose(p, originals)
        d = originals[j] - originals[i]
        coord_lams = (p - originals[i]) / d
        assert np.ptp(coord_lams) < 1e-9
        assert -1e-12 <= lam <= 1 + 1e-12


def test_neighbors_are_among_k_nearest():
    ds = imbalanced(n_min=20, n_maj=30, d=3, seed=8)
    cfg = SmoteConfig(k_neighbors=2, seed=4, standardize_distances=False)
    out = smote(ds, cfg)
    originals = ds.values[ds.labels == 0]
    nn = nearest_neighbors(originals, 2)
    for p in out.values[ds.n_samples:]:
        i, j, _ = decompose(p, originals)
        # lambda can land at either end; accept the pair in either orientation
        assert j in nn[i] or i in nn[j]


def test_k_clamped_with_warning(caplog):
    ds = make([[0.0], [1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1, 1])
    with caplog.at_level(logging.WARNING):
        out = smote(ds, SmoteConfig(k_neighbors=5, seed=0))
    assert "clamped" in caplog.text
    assert out.class_counts() == (3, 3)


def test_smote_errors():
    ds = make([[0.0], [1.0], [2.0]], [0, 1, 1])
    with pytest.raises(ValueError, match="at least 2 minority"):
        smote(ds, SmoteConfig())
    with pytest.raises(ValueError):
        SmoteConfig(k_neighbors=0)
    with pytest.raises(ValueError, match="below the current minority"):
        smote(imbalanced(10, 20), SmoteConfig(target_minority_count=5))


def test_smote_deterministic():
    ds = imbalanced(n_min=10, n_maj=25)
    a = smote(ds, SmoteConfig(seed=3))
    b = smote(ds, SmoteConfig(seed=3))
    np.testing.assert_array_equal(a.values, b.values)


def test_nearest_neighbors_bruteforce():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(15, 4))
    nn = nearest_neighbors(X, 3)
    for i in range(15):
        d = [np.linalg.norm(X[i] - X[j]) if j != i else np.inf for j in range(15)]
        assert set(nn[i]) == set(np.argsort(d)[:3])


# ---------------------------------------------------------------------------
# Replication

def test_replicate_reference_counts():
    ds = imbalanced()
    out = replicate_oversample(ds, seed=1)
    assert out.class_counts() == (345, 345)
    extra = out.values[ds.n_samples:]
    assert extra.shape[0] == 263
    originals = {tuple(r) for r in ds.values[ds.labels == 0]}
    assert all(tuple(r) in originals for r in extra)


def test_replicate_single_minority():
    ds = make([[1.0], [2.0], [3.0], [4.0]], [0, 1, 1, 1])
    out = replicate_oversample(ds, seed=0)
    assert np.sum(out.values[:, 0] == 1.0) == 3
    assert out.class_counts() == (3, 3)


def test_replicate_balanced_unchanged_and_errors():
    ds = make([[1.0], [2.0]], [0, 1])
    assert replicate_oversample(ds, seed=0) is ds
    with pytest.raises(ValueError):
        replicate_oversample(make([[1.0], [2.0]], [1, 1]), seed=0)
