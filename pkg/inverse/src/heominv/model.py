"""CNN architecture for trajectory-to-parameters regression.

The stack is two 2D convolutions followed by a time-axis max pool, that
block repeated once, then flatten and three dense layers with a linear
output of size 2(N-1).  Inputs are 4D tensors
(samples, time steps, feature channels, 1).  Filter counts, kernel size
and dense widths are configurable; the output layer is always linear.
"""

import os
from dataclasses import dataclass

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")

import tensorflow as tf

from .errors import ConfigurationError


@dataclass(frozen=True)
class ModelSpec:
    n_steps: int
    n_features: int
    n_outputs: int
    conv_filters: tuple = (16, 32)
    kernel_size: tuple = (3, 3)
    pool_size: tuple = (2, 1)
    dense_units: tuple = (128, 64)

    def __post_init__(self):
        if self.n_features < self.kernel_size[1]:
            raise ConfigurationError(
                f"feature dimension {self.n_features} is smaller than the "
                f"kernel extent {self.kernel_size[1]}")
        if self.n_steps < self.pool_size[0] ** 2:
            raise ConfigurationError(
                f"n_steps {self.n_steps} too short for two "
                f"{self.pool_size} poolings")
        if self.n_outputs < 1:
            raise ConfigurationError("need at least one output")

    @property
    def input_shape(self) -> tuple:
        return (self.n_steps, self.n_features, 1)


def spec_for_dataset(n_sites: int, n_steps: int, **overrides) -> ModelSpec:
    """ModelSpec for an N-site dataset: 2N-1 inputs, 2(N-1) outputs."""
    return ModelSpec(n_steps=n_steps, n_features=2 * n_sites - 1,
                     n_outputs=2 * (n_sites - 1), **overrides)


def build_model(spec: ModelSpec) -> tf.keras.Model:
    """Uncompiled Keras model matching the layer stack."""
    layers = [tf.keras.layers.Input(shape=spec.input_shape)]
    for filters in spec.conv_filters:
        layers.append(tf.keras.layers.Conv2D(
            filters, spec.kernel_size, padding="same", activation="relu"))
        layers.append(tf.keras.layers.Conv2D(
            filters, spec.kernel_size, padding="same", activation="relu"))
        layers.append(tf.keras.layers.MaxPool2D(pool_size=spec.pool_size))
    layers.append(tf.keras.layers.Flatten())
    for units in spec.dense_units:
        layers.append(tf.keras.layers.Dense(units, activation="relu"))
    layers.append(tf.keras.layers.Dense(spec.n_outputs, activation="linear"))
    return tf.keras.Sequential(layers)
