"""
Linear evaluators: Fisher LDA and pooled-variance Naive Bayes
=============================================================

These two classifiers score candidate feature subsets inside the genetic
algorithm. Both have linear decision boundaries.
"""
import numpy as np

from peptide_mlp.linear import lda_fit, lda_predict, nb_fit, nb_predict

# A hand-checkable 1-D case: class 0 at {0, 1}, class 1 at {10, 11}.
# The pooled variance is 0.5, so w = (10.5 - 0.5) / 0.5 = 20 and the
# boundary sits at the midpoint 5.5.
X = np.array([[0.0], [1.0], [10.0], [11.0]])
y = np.array([0, 0, 1, 1])
lda = lda_fit(X, y)
print(f"w = {lda.w[0]:.5f}, boundary at {-lda.b / lda.w[0]:.3f}")
print("predict(2) ->", lda_predict(lda, [[2.0]])[0])

# %%
# On a 2-D problem where only the first feature carries signal, the LDA
# weight concentrates on it.
rng = np.random.default_rng(0)
y = np.r_[np.zeros(100), np.ones(100)].astype(int)
X = np.c_[np.where(y == 1, 2.0, -2.0) + rng.normal(0, 0.5, 200), rng.normal(size=200)]
lda = lda_fit(X, y)
nb = nb_fit(X, y)
print("LDA weights", lda.w.round(3))
for name, (labels, _) in (("LDA", lda_predict(lda, X)), ("NB", nb_predict(nb, X))):
    print(f"{name} training accuracy {np.mean(labels == y):.3f}")
