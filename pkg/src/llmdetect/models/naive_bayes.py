"""Multinomial naive Bayes over TF-IDF weights.

Real-valued weights are treated as fractional counts, the standard
multinomial-on-TF-IDF practice.  Likelihoods are Laplace-smoothed with
alpha, and the posterior for class 1 is the softmax of the two per-class
log scores (the evidence term enters as the normalizer).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ModelError
from ..sparse import SparseMatrix
from .common import check_binary_labels, check_feature_count

DEFAULT_ALPHA = 1.0


@dataclass
class NaiveBayesModel:
    log_prior: np.ndarray       # shape (2,)
    log_likelihood: np.ndarray  # shape (2, n_features)
    alpha: float

    @property
    def n_features(self) -> int:
        return self.log_likelihood.shape[1]

    def predict_proba(self, X: SparseMatrix) -> np.ndarray:
        """P(class 1 | x) per row, via softmax of per-class log scores."""
        check_feature_count(self.n_features, X)
        score0 = self.log_prior[0] + X.dot(self.log_likelihood[0])
        score1 = self.log_prior[1] + X.dot(self.log_likelihood[1])
        high = np.maximum(score0, score1)
        e0 = np.exp(score0 - high)
        e1 = np.exp(score1 - high)
        return e1 / (e0 + e1)


def train_nb(X: SparseMatrix, y, alpha: float = DEFAULT_ALPHA) -> NaiveBayesModel:
    """Fit priors and smoothed per-class feature likelihoods."""
    if alpha <= 0.0:
        raise ModelError(f"alpha must be positive, got {alpha}")
    if X.n_rows == 0:
        raise ModelError("cannot train on an empty matrix")
    y = check_binary_labels(y, X.n_rows)

    n_features = X.n_cols
    log_prior = np.empty(2)
    log_likelihood = np.empty((2, n_features))
    for cls in (0, 1):
        rows = np.flatnonzero(y == cls)
        log_prior[cls] = np.log(len(rows) / X.n_rows)
        feature_sums = X.column_sums(rows)
        log_likelihood[cls] = np.log(
            (alpha + feature_sums) / (alpha * n_features + feature_sums.sum()))
    return NaiveBayesModel(log_prior=log_prior, log_likelihood=log_likelihood,
                           alpha=alpha)
