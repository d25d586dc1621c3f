"""Training protocol: splits, the early-stop rule, and split scoring.

The sample pool is split 85/15 into a training pool and a held-out test
set, and the pool further 80/20 into train and validation (68/17/15 of
the whole, disjoint and exhaustive).  Models train with MSE loss and Adam
at learning rate 0.001, 100 samples per batch, and stop once the
validation MSE has increased over three consecutive epochs; the weights
from the best validation epoch are restored afterwards.
"""

from dataclasses import dataclass

import numpy as np
import tensorflow as tf

from .errors import ConfigurationError
from .metrics import EvalReport, evaluate_predictions


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 100
    learning_rate: float = 0.001
    patience: int = 3
    max_epochs: int = 500
    test_fraction: float = 0.15
    validation_fraction: float = 0.20
    split_seed: int = 0
    model_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigurationError("test_fraction must be in (0, 1)")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigurationError("validation_fraction must be in (0, 1)")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ConfigurationError("batch_size, max_epochs and patience "
                                     "must be positive")


@dataclass(frozen=True)
class Splits:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray


def make_splits(n_samples: int, config: TrainConfig) -> Splits:
    """Disjoint, exhaustive shuffle split driven by config.split_seed."""
    rng = np.random.default_rng(config.split_seed)
    order = rng.permutation(n_samples)
    n_test = round(config.test_fraction * n_samples)
    pool = order[n_test:]
    n_val = round(config.validation_fraction * pool.size)
    return Splits(train=pool[n_val:], validation=pool[:n_val],
                  test=order[:n_test])


class StopOnConsecutiveIncreases(tf.keras.callbacks.Callback):
    """Stop once val_loss has risen ``patience`` epochs in a row.

    Tracks the best validation epoch and restores its weights when
    training ends, whether stopped by the rule or by the epoch cap.
    """

    def __init__(self, patience: int = 3):
        super().__init__()
        self.patience = patience

    def on_train_begin(self, logs=None):
        self.best_loss = np.inf
        self.best_epoch = -1
        self.best_weights = None
        self.previous = np.inf
        self.increases = 0
        self.stopped_epoch = -1

    def on_epoch_end(self, epoch, logs=None):
        current = logs["val_loss"]
        if not np.isfinite(current):
            raise FloatingPointError(
                f"validation loss became non-finite at epoch {epoch}")
        if current < self.best_loss:
            self.best_loss = current
            self.best_epoch = epoch
            self.best_weights = self.model.get_weights()
        self.increases = self.increases + 1 if current > self.previous else 0
        self.previous = current
        if self.increases >= self.patience:
            self.stopped_epoch = epoch
            self.model.stop_training = True

    def on_train_end(self, logs=None):
        if self.best_weights is not None:
            self.model.set_weights(self.best_weights)


def train(model: tf.keras.Model, x_train, y_train, x_val, y_val,
          config: TrainConfig, verbose: int = 0) -> dict:
    """Fit with the standard protocol; returns the training history.

    The returned dict has per-epoch ``train_mse`` and ``val_mse`` lists,
    plus ``best_epoch`` and ``stopped_epoch`` (-1 if the epoch cap hit
    first).  The model ends up holding the best-validation weights.
    """
    stopper = StopOnConsecutiveIncreases(patience=config.patience)
    model.compile(
        optimizer=tf.keras.optimizers.Adam(learning_rate=config.learning_rate),
        loss="mse")
    try:
        history = model.fit(
            x_train, y_train,
            validation_data=(x_val, y_val),
            batch_size=config.batch_size,
            epochs=config.max_epochs,
            shuffle=True,
            verbose=verbose,
            callbacks=[stopper])
    except FloatingPointError:
        raise
    losses = history.history
    if not np.isfinite(losses["loss"]).all():
        raise FloatingPointError(
            f"training loss became non-finite at epoch "
            f"{int(np.argmax(~np.isfinite(losses['loss'])))}")
    return {
        "train_mse": [float(v) for v in losses["loss"]],
        "val_mse": [float(v) for v in losses["val_loss"]],
        "best_epoch": stopper.best_epoch,
        "stopped_epoch": stopper.stopped_epoch,
    }


def predict(model: tf.keras.Model, x, batch_size: int = 100) -> np.ndarray:
    return np.asarray(model.predict(x, batch_size=batch_size, verbose=0),
                      dtype=np.float64)


def evaluate(model: tf.keras.Model, x, y_standardized,
             batch_size: int = 100) -> EvalReport:
    """Score one split; inputs must already be preprocessed."""
    if len(x) == 0:
        raise ValueError("cannot evaluate an empty split")
    return evaluate_predictions(y_standardized, predict(model, x, batch_size))
