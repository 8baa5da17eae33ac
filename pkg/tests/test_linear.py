import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peptide_mlp.linear import lda_fit, lda_predict, nb_fit, nb_predict

X1D = np.array([[0.0], [1.0], [10.0], [11.0]])
Y1D = np.array([0, 0, 1, 1])


def test_lda_1d_hand_values():
    m = lda_fit(X1D, Y1D)
    # pooled variance 0.5 (+ ridge 1e-6 * 0.5) -> w = 10 / 0.5
    assert m.w[0] == pytest.approx(20.0, rel=1e-5)
    assert -m.b / m.w[0] == pytest.approx(5.5, abs=1e-12)
    labels, _ = lda_predict(m, [[2.0]])
    assert labels.tolist() == [0]


def test_nb_1d_threshold():
    m = nb_fit(X1D, Y1D)
    _, s = nb_predict(m, [[5.5]])
    assert s[0] == pytest.approx(0.0, abs=1e-9)
    labels, _ = nb_predict(m, [[5.4], [5.6]])
    assert labels.tolist() == [0, 1]


def test_lda_equal_means_falls_back_to_prior():
    X = np.array([[0.0], [2.0], [1.0], [1.0], [0.5], [1.5]])
    y = np.array([0, 0, 1, 1, 1, 1])  # both means 1.0, class 1 majority
    m = lda_fit(X, y)
    assert m.w[0] == pytest.approx(0.0, abs=1e-12)
    labels, _ = lda_predict(m, np.linspace(-5, 5, 11)[:, None])
    assert set(labels.tolist()) == {1}


def test_lda_equal_means_equal_priors_ties_to_class0():
    X = np.array([[0.0], [2.0], [1.0], [1.0]])
    m = lda_fit(X, [0, 0, 1, 1])
    labels, scores = lda_predict(m, [[0.3], [7.0]])
    np.testing.assert_allclose(scores, 0.0, atol=1e-12)
    assert labels.tolist() == [0, 0]


def test_lda_ignores_noise_feature():
    rng = np.random.default_rng(0)
    n = 100
    y = np.r_[np.zeros(n), np.ones(n)].astype(int)
    X = np.c_[np.where(y == 1, 5.0, -5.0) + rng.uniform(-1, 1, 2 * n), rng.normal(size=2 * n)]
    m = lda_fit(X, y)
    assert abs(m.w[0]) > 20 * abs(m.w[1])
    labels, _ = lda_predict(m, X)
    assert np.mean(labels == y) == 1.0


def test_nb_equal_means_and_priors():
    X = np.array([[0.0], [2.0], [1.0], [1.0]])
    m = nb_fit(X, [0, 0, 1, 1])
    labels, scores = nb_predict(m, np.linspace(-3, 3, 7)[:, None])
    np.testing.assert_array_equal(scores, 0.0)
    assert set(labels.tolist()) == {0}


@pytest.mark.parametrize("majority", [0, 1])
def test_nb_prior_dominance(majority):
    X = np.array([[0.0], [2.0]] * 9 + [[0.0], [2.0]])
    y = np.array([majority] * 18 + [1 - majority] * 2)
    m = nb_fit(X, y)
    np.testing.assert_allclose(np.exp(m.log_priors).sum(), 1.0)
    labels, _ = nb_predict(m, np.linspace(-10, 10, 21)[:, None])
    assert set(labels.tolist()) == {majority}


def test_single_class_errors():
    for fit in (lda_fit, nb_fit):
        with pytest.raises(ValueError):
            fit(np.ones((4, 2)), [1, 1, 1, 1])
        with pytest.raises(ValueError):
            fit(np.ones((3, 2)), [0, 1, 1])


def test_dimension_mismatch():
    m = lda_fit(np.random.default_rng(0).normal(size=(6, 2)), [0, 0, 0, 1, 1, 1])
    with pytest.raises(ValueError, match="dimension mismatch"):
        lda_predict(m, np.ones((2, 3)))
    nbm = nb_fit(np.random.default_rng(0).normal(size=(6, 2)), [0, 0, 0, 1, 1, 1])
    with pytest.raises(ValueError, match="dimension mismatch"):
        nb_predict(nbm, np.ones((2, 3)))


def test_singular_covariance_is_ridged():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(10, 1))
    X = np.c_[a, a, 2 * a]  # rank 1
    y = np.r_[np.zeros(5), np.ones(5)].astype(int)
    m = lda_fit(X, y)
    assert np.all(np.isfinite(m.w))


def test_1d_lda_and_nb_agree_on_grid():
    rng = np.random.default_rng(4)
    X = np.r_[rng.normal(0, 1, 30), rng.normal(2, 1, 30)][:, None]
    y = np.r_[np.zeros(30), np.ones(30)].astype(int)
    grid = np.linspace(-4, 6, 401)[:, None]
    la, _ = lda_predict(lda_fit(X, y), grid)
    lb, _ = nb_predict(nb_fit(X, y), grid)
    np.testing.assert_array_equal(la, lb)


def _fixture(seed, n=40, d=4):
    rng = np.random.default_rng(seed)
    y = rng.permutation(np.r_[np.zeros(n // 2), np.ones(n - n // 2)].astype(int))
    X = rng.normal(size=(n, d)) + y[:, None] * rng.normal(size=d)
    return X, y


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_feature_permutation_invariance(seed):
    X, y = _fixture(seed)
    perm = np.random.default_rng(seed + 1).permutation(X.shape[1])
    for fit, predict in ((lda_fit, lda_predict), (nb_fit, nb_predict)):
        a, sa = predict(fit(X, y), X)
        b, sb = predict(fit(X[:, perm], y), X[:, perm])
        np.testing.assert_allclose(sa, sb, atol=1e-9)
        np.testing.assert_array_equal(a[np.abs(sa) > 1e-9], b[np.abs(sa) > 1e-9])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(-100, 100))
def test_translation_invariance(seed, shift):
    X, y = _fixture(seed)
    for fit, predict in ((lda_fit, lda_predict), (nb_fit, nb_predict)):
        _, sa = predict(fit(X, y), X)
        _, sb = predict(fit(X + shift, y), X + shift)
        np.testing.assert_allclose(sa, sb, atol=1e-9 * (1 + abs(shift)) * 100)
