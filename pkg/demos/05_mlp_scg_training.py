"""
Training the tansig MLP with scaled conjugate gradient
======================================================

The network has tanh hidden layers and a 2-way softmax output. The loss
blends cross-entropy with the mean squared weight,
L = (1 - gamma) * CE + gamma * MSW. Training is full batch: one SCG
update is one epoch, and early stopping keeps the weights of the best
validation epoch.
"""
import math

import numpy as np

from peptide_mlp.mlp import TrainConfig, init_model, predict, scg_train

# XOR is the classic test of a hidden layer.
X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
y = np.array([0, 1, 1, 0])
cfg = TrainConfig(max_epochs=200, max_fail=math.inf, regularization=0.0)
model, hist = scg_train(init_model([2, 4, 2], seed=0), (X, y), (X, y), cfg)
print("XOR predictions", predict(model, X), "after", hist.n_epochs, "epochs")

# %%
# A noisy problem with a held-out validation set shows early stopping.
rng = np.random.default_rng(1)
y = rng.integers(0, 2, 300)
X = rng.normal(size=(300, 8)) + 0.8 * y[:, None]
train, val = (X[:200], y[:200]), (X[200:], y[200:])
cfg = TrainConfig(max_epochs=200, max_fail=6, regularization=0.1)
model, hist = scg_train(init_model([8, 20, 20, 2], seed=2), train, val, cfg)
print(f"stopped: {hist.stop_reason} after {hist.n_epochs} epochs, best epoch {hist.best_epoch}")
print("epoch  train_loss  val_loss  val_acc")
for epoch, tl, vl, _, va in hist.rows():
    if epoch % 5 == 0 or epoch == hist.best_epoch:
        print(f"{epoch:5d}  {tl:10.4f}  {vl:8.4f}  {va:7.3f}")
