"""Feature scaling and label standardization, fit on training data only.

Features are min-max rescaled into [0, 1] per feature channel; labels are
standardized to zero mean and unit standard deviation per label.  Both
sets of statistics come exclusively from the training split, so validation
and test values may land outside [0, 1] — that is intentional.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScalingError


@dataclass(frozen=True)
class PreprocessState:
    feature_min: np.ndarray
    feature_max: np.ndarray
    label_mean: np.ndarray
    label_std: np.ndarray

    @classmethod
    def fit(cls, train_features: np.ndarray,
            train_labels: np.ndarray) -> "PreprocessState":
        """Compute scaling statistics from the training split alone."""
        if train_features.shape[0] == 0:
            raise ValueError("cannot fit preprocessing on an empty split")
        feature_min = train_features.min(axis=(0, 1)).astype(np.float64)
        feature_max = train_features.max(axis=(0, 1)).astype(np.float64)
        label_mean = train_labels.mean(axis=0, dtype=np.float64)
        label_std = train_labels.std(axis=0, dtype=np.float64)
        if (label_std == 0.0).any():
            bad = np.nonzero(label_std == 0.0)[0].tolist()
            raise DegenerateScalingError(
                f"labels {bad} have zero variance on the training split")
        return cls(feature_min=feature_min, feature_max=feature_max,
                   label_mean=label_mean, label_std=label_std)

    def transform_features(self, features: np.ndarray) -> np.ndarray:
        """Min-max scale per channel; constant channels map to 0."""
        span = self.feature_max - self.feature_min
        safe_span = np.where(span == 0.0, 1.0, span)
        scaled = (features - self.feature_min.astype(features.dtype)) \
            / safe_span.astype(features.dtype)
        if (span == 0.0).any():
            scaled[..., span == 0.0] = 0.0
        return scaled

    def transform_labels(self, labels: np.ndarray) -> np.ndarray:
        return (labels - self.label_mean) / self.label_std

    def inverse_transform_labels(self, standardized: np.ndarray) -> np.ndarray:
        return standardized * self.label_std + self.label_mean
