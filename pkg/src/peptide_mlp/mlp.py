"""Tansig multilayer perceptron trained by scaled conjugate gradient.

The network maps standardized features through tanh-sigmoid hidden layers to
a 2-unit softmax. The objective blends cross-entropy with the mean squared
weight::

    L = (1 - gamma) * CE + gamma * MSW

where ``CE`` averages ``-sum(y * log p)`` over samples and ``MSW`` averages
the squared entries of every weight matrix (biases excluded).

Parameters live in one flat float64 vector, layer by layer: the weight
matrix of shape ``(fan_out, fan_in)`` in row-major order followed by its bias
vector. Training works directly on that vector.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._seed import rng_for

log = logging.getLogger(__name__)

LOG_FLOOR = 1e-12
_LOG_FLOOR_LN = math.log(LOG_FLOOR)
GRADIENT_TOL = 1e-7


def tansig(z):
    """Hyperbolic tangent sigmoid, ``2 / (1 + exp(-2z)) - 1`` (identical to tanh)."""
    return np.tanh(z)


def _layer_slices(layer_sizes):
    slices, pos = [], 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        w = slice(pos, pos + fan_in * fan_out)
        pos += fan_in * fan_out
        b = slice(pos, pos + fan_out)
        pos += fan_out
        slices.append((w, b, fan_out, fan_in))
    return slices, pos


@dataclass(frozen=True)
class MlpModel:
    """Fully connected tansig network with a softmax output layer."""

    layer_sizes: tuple
    params: np.ndarray = field(repr=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError(f"invalid layer sizes {sizes}")
        _, n = _layer_slices(sizes)
        params = np.array(self.params, dtype=np.float64, copy=True).ravel()
        if params.size != n:
            raise ValueError(f"expected {n} parameters for layers {sizes}, got {params.size}")
        if not np.all(np.isfinite(params)):
            raise ValueError("parameters must be finite")
        params.setflags(write=False)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "params", params)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def weights(self) -> list:
        return [self.params[w].reshape(o, i) for w, _, o, i in _layer_slices(self.layer_sizes)[0]]

    @property
    def biases(self) -> list:
        return [self.params[b] for _, b, _, _ in _layer_slices(self.layer_sizes)[0]]

    def with_params(self, params) -> "MlpModel":
        return MlpModel(self.layer_sizes, params)


def n_params(layer_sizes) -> int:
    return _layer_slices(tuple(layer_sizes))[1]


def weight_mask(layer_sizes) -> np.ndarray:
    """Boolean mask over the flat parameter vector selecting weight entries."""
    slices, n = _layer_slices(tuple(layer_sizes))
    mask = np.zeros(n, dtype=bool)
    for w, _, _, _ in slices:
        mask[w] = True
    return mask


def init_model(layer_sizes: Sequence[int], seed: int) -> MlpModel:
    """Glorot-uniform weights in ``+-sqrt(6 / (fan_in + fan_out))``, zero biases."""
    layer_sizes = tuple(int(s) for s in layer_sizes)
    if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
        raise ValueError(f"invalid layer sizes {layer_sizes}")
    slices, n = _layer_slices(layer_sizes)
    rng = rng_for(seed, "mlp_init")
    params = np.zeros(n)
    for w, _, fan_out, fan_in in slices:
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        params[w] = rng.uniform(-bound, bound, size=fan_in * fan_out)
    return MlpModel(layer_sizes, params)


def _as_batch(model_or_sizes, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    d = model_or_sizes[0]
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: network expects {d} inputs, got {X.shape[1]}")
    return X


def _forward(layer_sizes, params, X):
    """Return hidden activations per layer and output log-probabilities."""
    slices, _ = _layer_slices(layer_sizes)
    acts = [X]
    a = X
    for li, (w, b, o, i) in enumerate(slices):
        z = a @ params[w].reshape(o, i).T + params[b]
        if li < len(slices) - 1:
            a = np.tanh(z)
            acts.append(a)
        else:
            z = z - z.max(axis=1, keepdims=True)
            logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return acts, logp


def predict_proba(model: MlpModel, X) -> np.ndarray:
    X = _as_batch(model.layer_sizes, X)
    _, logp = _forward(model.layer_sizes, model.params, X)
    return np.exp(logp)


forward = predict_proba


def predict(model: MlpModel, X) -> np.ndarray:
    """Argmax class; on an exact tie the lower class index (case) wins."""
    return np.argmax(predict_proba(model, X), axis=1).astype(np.int8)


def one_hot(labels, n_classes: int = 2) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.intp)
    Y = np.zeros((labels.size, n_classes))
    Y[np.arange(labels.size), labels] = 1.0
    return Y


def _objective(layer_sizes, params, X, Y, gamma, mask, want_grad):
    acts, logp = _forward(layer_sizes, params, X)
    n = X.shape[0]
    w = params[mask]
    n_w = w.size
    ce = -np.sum(Y * np.maximum(logp, _LOG_FLOOR_LN)) / n
    msw = float(w @ w) / n_w
    loss = (1.0 - gamma) * ce + gamma * msw
    if not want_grad:
        return loss, None

    slices, total = _layer_slices(layer_sizes)
    grad = np.empty(total)
    # d CE / d logits; clamped log terms contribute nothing
    live = Y * (logp > _LOG_FLOOR_LN)
    delta = (1.0 - gamma) * (np.exp(logp) * live.sum(axis=1, keepdims=True) - live) / n
    for li in range(len(slices) - 1, -1, -1):
        ws, bs, o, i = slices[li]
        W = params[ws].reshape(o, i)
        a_in = acts[li]
        grad[ws] = (delta.T @ a_in).ravel() + (2.0 * gamma / n_w) * params[ws]
        grad[bs] = delta.sum(axis=0)
        if li > 0:
            delta = (delta @ W) * (1.0 - a_in * a_in)
    return loss, grad


def loss(model: MlpModel, X, Y_onehot, gamma: float) -> float:
    X = _as_batch(model.layer_sizes, X)
    return _objective(model.layer_sizes, model.params, X, np.asarray(Y_onehot, float), gamma,
                      weight_mask(model.layer_sizes), False)[0]


def gradient(model: MlpModel, X, Y_onehot, gamma: float) -> np.ndarray:
    """Analytic gradient of :func:`loss` as a flat parameter-shaped vector."""
    X = _as_batch(model.layer_sizes, X)
    return _objective(model.layer_sizes, model.params, X, np.asarray(Y_onehot, float), gamma,
                      weight_mask(model.layer_sizes), True)[1]


def unflatten(model: MlpModel, flat) -> tuple[list, list]:
    """Split a flat parameter-shaped vector into per-layer (weights, biases)."""
    flat = np.asarray(flat)
    slices, _ = _layer_slices(model.layer_sizes)
    return ([flat[w].reshape(o, i) for w, _, o, i in slices], [flat[b] for _, b, _, _ in slices])


# ---------------------------------------------------------------------------
# Scaled conjugate gradient

@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    max_fail: int = 6
    regularization: float = 0.1
    sigma: float = 5e-5
    lambda_init: float = 5e-7
    validation_fraction: float = 0.2
    seed: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.max_epochs < 1:
            out.append("max_epochs: must be >= 1")
        if not self.max_fail >= 1:
            out.append("max_fail: must be >= 1")
        if not 0.0 <= self.regularization < 1.0:
            out.append("regularization: must lie in [0, 1)")
        if not self.sigma > 0:
            out.append("sigma: must be > 0")
        if not self.lambda_init > 0:
            out.append("lambda_init: must be > 0")
        if not 0.0 < self.validation_fraction < 1.0:
            out.append("validation_fraction: must lie in (0, 1)")
        return out

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("invalid TrainConfig: " + "; ".join(problems))


@dataclass
class ScgState:
    """Per-iteration diagnostics reported to the SCG callback."""

    iteration: int
    x: np.ndarray
    f: float
    grad_norm: float
    success: bool
    lam: float


def scg_minimize(
    fun: Callable,
    x0,
    max_iter: int,
    sigma: float = 5e-5,
    lambda_init: float = 5e-7,
    grad_tol: float = GRADIENT_TOL,
    restart_every: Optional[int] = None,
    callback: Optional[Callable[[ScgState], bool]] = None,
):
    """Minimize ``fun`` with Moller's scaled conjugate gradient.

    ``fun(x, want_grad)`` returns ``(f, grad_or_None)``. Each iteration
    estimates curvature along the search direction from a finite gradient
    difference at ``x + (sigma/|p|) p``, regularizes it with the trust-region
    scale ``lam``, and accepts the step only when the comparison ratio is
    non-negative. The direction restarts to steepest descent every
    ``restart_every`` iterations (default: the number of parameters).

    ``callback(state)`` runs after every iteration and may return True to
    stop. Returns ``(x, f, n_iter, reason)`` with reason one of
    ``"gradient_converged"``, ``"max_iter"`` or ``"callback"``.
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    n = x.size
    restart_every = restart_every or n
    f, g = fun(x, True)
    r = -g
    p = r.copy()
    lam, lam_bar = lambda_init, 0.0
    success = True
    delta = 0.0

    if np.linalg.norm(g) < grad_tol:
        return x, f, 0, "gradient_converged"

    for k in range(1, max_iter + 1):
        p_sq = float(p @ p)
        if success:
            sigma_k = sigma / math.sqrt(p_sq)
            _, g_s = fun(x + sigma_k * p, True)
            s = (g_s + r) / sigma_k  # r = -grad(x)
            delta = float(p @ s)

        # delta carries the lam-scaled curvature across failed steps
        delta = delta + (lam - lam_bar) * p_sq
        if delta <= 0:
            lam_bar = 2.0 * (lam - delta / p_sq)
            delta = -delta + lam * p_sq
            lam = lam_bar

        mu = float(p @ r)
        alpha = mu / delta
        x_new = x + alpha * p
        f_new, _ = fun(x_new, False)
        if not np.isfinite(f_new):
            comparison = -1.0
        else:
            comparison = 2.0 * delta * (f - f_new) / (mu * mu)

        if comparison >= 0:
            x = x_new
            f, g = fun(x, True)
            r_new = -g
            lam_bar = 0.0
            success = True
            if k % restart_every == 0:
                p = r_new.copy()
            else:
                beta = (float(r_new @ r_new) - float(r_new @ r)) / mu
                p = r_new + beta * p
            r = r_new
            if comparison >= 0.75:
                lam = 0.25 * lam
        else:
            lam_bar = lam
            success = False

        if comparison < 0.25:
            lam = lam + delta * (1.0 - comparison) / p_sq
        # keep lam in a usable floating range
        lam = min(max(lam, 1e-300), 1e300)

        grad_norm = float(np.linalg.norm(r))
        if callback is not None and callback(ScgState(k, x, f, grad_norm, success, lam)):
            return x, f, k, "callback"
        if grad_norm < grad_tol:
            return x, f, k, "gradient_converged"
    return x, f, max_iter, "max_iter"


# ---------------------------------------------------------------------------
# Early stopping and training

class EarlyStopping:
    """Track validation loss and the snapshot with the lowest value.

    ``update`` returns True once ``max_fail`` consecutive epochs have passed
    without a strict improvement.
    """

    def __init__(self, max_fail: float):
        self.max_fail = max_fail
        self.best_loss = math.inf
        self.best_epoch = -1
        self.best_snapshot = None
        self.fails = 0

    def update(self, epoch: int, val_loss: float, snapshot=None) -> bool:
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.best_snapshot = snapshot
            self.fails = 0
        else:
            self.fails += 1
        return self.fails >= self.max_fail


@dataclass
class TrainingHistory:
    """Per-epoch curves. Entry 0 describes the initial weights."""

    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    train_acc: list = field(default_factory=list)
    val_acc: list = field(default_factory=list)
    best_epoch: int = 0
    stop_reason: str = ""

    @property
    def n_epochs(self) -> int:
        """Number of SCG iterations executed (epoch 0 is the initial state)."""
        return len(self.train_loss) - 1

    def rows(self):
        for e in range(len(self.train_loss)):
            yield e, self.train_loss[e], self.val_loss[e], self.train_acc[e], self.val_acc[e]


def _accuracy(layer_sizes, params, X, y):
    _, logp = _forward(layer_sizes, params, X)
    return float(np.mean(np.argmax(logp, axis=1) == y))


def scg_train(model: MlpModel, train, val, cfg: TrainConfig):
    """Train with full-batch SCG and validation early stopping.

    ``train`` and ``val`` are ``(X, y)`` pairs with integer labels. One SCG
    iteration is one epoch. Training stops after ``cfg.max_fail`` epochs
    without a new best validation loss, at ``cfg.max_epochs``, or when the
    gradient norm drops below 1e-7. The returned model carries the
    parameters of the best validation epoch.

    Returns
    -------
    (MlpModel, TrainingHistory)
    """
    X_tr, y_tr = _as_batch(model.layer_sizes, train[0]), np.asarray(train[1])
    X_va, y_va = _as_batch(model.layer_sizes, val[0]), np.asarray(val[1])
    if X_tr.shape[0] == 0 or X_va.shape[0] == 0:
        raise ValueError("training and validation sets must be non-empty")
    Y_tr, Y_va = one_hot(y_tr), one_hot(y_va)
    sizes = model.layer_sizes
    mask = weight_mask(sizes)
    gamma = cfg.regularization

    def fun(x, want_grad):
        return _objective(sizes, x, X_tr, Y_tr, gamma, mask, want_grad)

    def val_loss(x):
        return _objective(sizes, x, X_va, Y_va, gamma, mask, False)[0]

    hist = TrainingHistory()
    stopper = EarlyStopping(cfg.max_fail)

    def record(epoch, x, f_train):
        v = val_loss(x)
        if not (np.isfinite(f_train) and np.isfinite(v)):
            raise FloatingPointError(
                f"non-finite loss at epoch {epoch} (train {f_train}, val {v}); training diverged"
            )
        hist.train_loss.append(float(f_train))
        hist.val_loss.append(float(v))
        hist.train_acc.append(_accuracy(sizes, x, X_tr, y_tr))
        hist.val_acc.append(_accuracy(sizes, x, X_va, y_va))
        return stopper.update(epoch, v, x.copy())

    f0, _ = fun(model.params, False)
    record(0, model.params, f0)

    def callback(state):
        return record(state.iteration, state.x, state.f)

    _, _, _, reason = scg_minimize(
        fun, model.params, cfg.max_epochs, sigma=cfg.sigma, lambda_init=cfg.lambda_init,
        callback=callback,
    )
    hist.stop_reason = {"callback": "early_stop", "max_iter": "max_epochs"}.get(reason, reason)
    hist.best_epoch = stopper.best_epoch
    return model.with_params(stopper.best_snapshot), hist
