"""Fisher LDA and pooled-variance Gaussian Naive Bayes.

Both are linear two-class rules used to score candidate feature subsets.
The score convention is shared: ``score > 0`` predicts class 1 (control),
``score <= 0`` predicts class 0 (case).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RIDGE_SCALE = 1e-6
NB_VAR_SMOOTHING = 1e-9


@dataclass(frozen=True)
class LdaModel:
    w: np.ndarray
    b: float
    classes: tuple = (0, 1)


@dataclass(frozen=True)
class NaiveBayesModel:
    means: np.ndarray      # (2, d)
    var: np.ndarray        # (d,) pooled across classes
    log_priors: np.ndarray  # (2,)
    classes: tuple = (0, 1)


def _split_classes(X, y):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y have different lengths")
    if X.shape[1] < 1:
        raise ValueError("at least one feature is required")
    X0, X1 = X[y == 0], X[y == 1]
    if X0.shape[0] < 2 or X1.shape[0] < 2:
        raise ValueError(
            f"each class needs at least 2 samples (got {X0.shape[0]} and {X1.shape[0]})"
        )
    return X, X0, X1


def _priors(n0, n1):
    n = n0 + n1
    return np.array([n0 / n, n1 / n])


def lda_fit(X, y) -> LdaModel:
    """Fisher discriminant with a pooled, lightly ridged covariance.

    ``w = S^-1 (mu1 - mu0)`` where ``S`` is the pooled within-class covariance
    plus ``eps * I``, ``eps = 1e-6 * trace(S) / d``. The bias puts the boundary
    at the midpoint of the class means shifted by the log prior ratio.
    """
    X, X0, X1 = _split_classes(X, y)
    n0, n1 = X0.shape[0], X1.shape[0]
    mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
    C0, C1 = X0 - mu0, X1 - mu1
    S = (C0.T @ C0 + C1.T @ C1) / (n0 + n1 - 2)
    d = S.shape[0]
    eps = RIDGE_SCALE * np.trace(S) / d
    if eps <= 0:
        eps = RIDGE_SCALE
    S[np.diag_indices(d)] += eps
    w = np.linalg.solve(S, mu1 - mu0)
    log_prior_ratio = np.log(n1 / n0)
    b = float(-w @ (0.5 * (mu0 + mu1)) + log_prior_ratio)
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise FloatingPointError("LDA produced non-finite weights; the data are pathological")
    return LdaModel(w, b)


def lda_predict(model: LdaModel, X):
    """Return ``(labels, scores)`` with ``scores = X @ w + b``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None] if model.w.shape[0] == 1 else X[None, :]
    if X.shape[1] != model.w.shape[0]:
        raise ValueError(f"dimension mismatch: model has {model.w.shape[0]} features, input has {X.shape[1]}")
    scores = X @ model.w + model.b
    return (scores > 0).astype(np.int8), scores


def nb_fit(X, y) -> NaiveBayesModel:
    X, X0, X1 = _split_classes(X, y)
    n0, n1 = X0.shape[0], X1.shape[0]
    mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
    var = (((X0 - mu0) ** 2).sum(axis=0) + ((X1 - mu1) ** 2).sum(axis=0)) / (n0 + n1 - 2)
    floor = NB_VAR_SMOOTHING * max(float(var.max()), 1.0)
    var = var + floor
    return NaiveBayesModel(np.vstack([mu0, mu1]), var, np.log(_priors(n0, n1)))


def nb_predict(model: NaiveBayesModel, X):
    """Return ``(labels, log_odds)`` where log-odds are log P(1|x) - log P(0|x)."""
    X = np.asarray(X, dtype=np.float64)
    d = model.var.shape[0]
    if X.ndim == 1:
        X = X[:, None] if d == 1 else X[None, :]
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: model has {d} features, input has {X.shape[1]}")
    mu0, mu1 = model.means
    # log N(x|mu1,v) - log N(x|mu0,v), summed over features; expanded to stay linear in x
    w = (mu1 - mu0) / model.var
    b = -0.5 * np.sum((mu1 ** 2 - mu0 ** 2) / model.var) + (model.log_priors[1] - model.log_priors[0])
    scores = X @ w + b
    return (scores > 0).astype(np.int8), scores
