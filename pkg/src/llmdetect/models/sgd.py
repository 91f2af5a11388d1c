"""Logistic-loss linear classifier trained by per-sample gradient descent.

Per-sample objective for (x, y), with y~ = 2y - 1 in {-1, +1}:

    loss(theta) = ln(1 + exp(-y~ * (w.x + b))) + (l2 / 2) * ||w||^2

The bias is excluded from regularization.  Visit order is reshuffled every
epoch from the seed's "sgd_shuffle" sub-stream, and the learning rate
decays as eta0 / (1 + eta0 * l2 * t) over global step count t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ModelError
from ..seeds import stream_rng
from ..sparse import SparseMatrix
from .common import check_binary_labels, check_feature_count, sigmoid


@dataclass(frozen=True)
class SgdConfig:
    eta0: float = 0.5
    l2: float = 1e-4
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.eta0 <= 0.0:
            raise ModelError(f"eta0 must be positive, got {self.eta0}")
        if self.l2 < 0.0:
            raise ModelError(f"l2 must be non-negative, got {self.l2}")
        if self.epochs < 1:
            raise ModelError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class SgdLinearModel:
    theta: np.ndarray  # weights followed by the bias, length n_features + 1
    config: SgdConfig

    @property
    def n_features(self) -> int:
        return len(self.theta) - 1

    def predict_proba(self, X: SparseMatrix) -> np.ndarray:
        check_feature_count(self.n_features, X)
        margin = X.dot(self.theta[:-1]) + self.theta[-1]
        return sigmoid(margin)


def sgd_step(theta: np.ndarray, gradient: np.ndarray, alpha: float) -> np.ndarray:
    """One descent update: theta - alpha * gradient, elementwise."""
    if theta.shape != gradient.shape:
        raise ModelError(f"theta shape {theta.shape} does not match gradient "
                         f"shape {gradient.shape}")
    if alpha <= 0.0:
        raise ModelError(f"alpha must be positive, got {alpha}")
    return theta - alpha * gradient


def sample_loss(theta: np.ndarray, cols: np.ndarray, vals: np.ndarray,
                label: int, l2: float) -> float:
    """The per-sample objective at theta."""
    margin = float(np.dot(vals, theta[cols]) + theta[-1])
    y_signed = 2 * label - 1
    weights = theta[:-1]
    return (float(np.logaddexp(0.0, -y_signed * margin)) +
            0.5 * l2 * float(np.dot(weights, weights)))


def sample_gradient(theta: np.ndarray, cols: np.ndarray, vals: np.ndarray,
                    label: int, l2: float) -> np.ndarray:
    """Dense gradient of the per-sample objective at theta."""
    margin = float(np.dot(vals, theta[cols]) + theta[-1])
    y_signed = 2 * label - 1
    residual = -y_signed * sigmoid(-y_signed * margin)
    gradient = np.zeros_like(theta)
    if l2 != 0.0:
        gradient[:-1] = l2 * theta[:-1]
    np.add.at(gradient, cols, residual * vals)
    gradient[-1] += residual
    return gradient


def objective(theta: np.ndarray, X: SparseMatrix, y, l2: float) -> float:
    """Mean logistic loss over the corpus plus the L2 penalty."""
    y_signed = 2 * np.asarray(y, dtype=np.float64) - 1
    margin = X.dot(theta[:-1]) + theta[-1]
    losses = np.logaddexp(0.0, -y_signed * margin)
    weights = theta[:-1]
    return float(losses.mean()) + 0.5 * l2 * float(np.dot(weights, weights))


def train_sgd(X: SparseMatrix, y, config: SgdConfig = SgdConfig()) -> SgdLinearModel:
    y = check_binary_labels(y, X.n_rows)
    theta = np.zeros(X.n_cols + 1)
    rng = stream_rng(config.seed, "sgd_shuffle")
    order = list(range(X.n_rows))
    step = 0
    for _ in range(config.epochs):
        rng.shuffle(order)
        for i in order:
            alpha = config.eta0 / (1.0 + config.eta0 * config.l2 * step)
            row = X.row(i)
            gradient = sample_gradient(theta, row.cols, row.vals, y[i], config.l2)
            theta = sgd_step(theta, gradient, alpha)
            step += 1
    return SgdLinearModel(theta=theta, config=config)
