"""Regression metrics: MSE and the coefficient of determination.

R^2 = 1 - SS_res / SS_tot, reported in percent and averaged uniformly over
labels; MSE is the plain mean of squared residuals over every (sample,
label) entry.  Both are computed in float64 regardless of input dtype.
Metrics are reported in standardized-label space unless stated otherwise.
"""

from dataclasses import dataclass, field

import numpy as np


def mean_squared_error(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ValueError("cannot score an empty split")
    return float(np.mean((y_true - y_pred) ** 2))


def r2_percent(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Percent of per-label variance explained, averaged over labels."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ValueError("cannot score an empty split")
    if y_true.ndim == 1:
        y_true = y_true[:, None]
        y_pred = y_pred[:, None]
    ss_res = ((y_true - y_pred) ** 2).sum(axis=0)
    ss_tot = ((y_true - y_true.mean(axis=0)) ** 2).sum(axis=0)
    return float(np.mean(1.0 - ss_res / ss_tot) * 100.0)


@dataclass
class EvalReport:
    """Scores for one split, plus the per-label breakdown."""

    mse: float
    r2_percent: float
    n_samples: int
    per_label_mse: list = field(default_factory=list)
    per_label_r2: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mse": self.mse,
            "r2_percent": self.r2_percent,
            "n_samples": self.n_samples,
            "per_label_mse": list(self.per_label_mse),
            "per_label_r2": list(self.per_label_r2),
        }


def evaluate_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> EvalReport:
    """Score predictions against targets (both in standardized space)."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    mse = mean_squared_error(y_true, y_pred)
    r2 = r2_percent(y_true, y_pred)
    per_mse = np.mean((y_true - y_pred) ** 2, axis=0)
    ss_res = ((y_true - y_pred) ** 2).sum(axis=0)
    ss_tot = ((y_true - y_true.mean(axis=0)) ** 2).sum(axis=0)
    per_r2 = (1.0 - ss_res / ss_tot) * 100.0
    return EvalReport(mse=mse, r2_percent=r2, n_samples=y_true.shape[0],
                      per_label_mse=per_mse.tolist(),
                      per_label_r2=per_r2.tolist())
