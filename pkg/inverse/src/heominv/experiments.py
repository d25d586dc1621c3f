"""End-to-end experiment orchestration.

``run_pipeline`` is the canonical preprocess/train/evaluate pass used by
everything else; ``kfold_cv`` re-samples it across folds,
``window_truncation_study`` repeats it on time-truncated features, and
``overdamped_analysis`` breaks test error down by coupling strength,
where weakly coupled chains produce near-featureless dissipative traces
and the inverse problem degrades.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import tensorflow as tf

from .data import LoadedDataset, load_dataset, steps_for_window_fs
from .errors import ConfigurationError
from .model import ModelSpec, build_model, spec_for_dataset
from .preprocess import PreprocessState
from .training import Splits, TrainConfig, evaluate, make_splits, predict, train


@dataclass
class PipelineResult:
    model: object
    spec: ModelSpec
    preprocess: PreprocessState
    splits: Splits
    history: dict
    reports: dict  # split name -> EvalReport

    def summary(self) -> dict:
        return {name: report.to_dict() for name, report in self.reports.items()}


def _transformed_arrays(dataset: LoadedDataset, preproc: PreprocessState):
    x = preproc.transform_features(dataset.features)[..., None]
    y = preproc.transform_labels(dataset.labels)
    return x, y


def run_pipeline(dataset: LoadedDataset, config: TrainConfig,
                 model_overrides: dict | None = None,
                 verbose: int = 0) -> PipelineResult:
    """Split, fit preprocessing on train, train the CNN, score all splits."""
    tf.keras.utils.set_random_seed(config.model_seed)
    splits = make_splits(dataset.n_samples, config)
    preproc = PreprocessState.fit(dataset.features[splits.train],
                                  dataset.labels[splits.train])
    x, y = _transformed_arrays(dataset, preproc)
    spec = spec_for_dataset(dataset.n_sites, dataset.features.shape[1],
                            **(model_overrides or {}))
    model = build_model(spec)
    history = train(model, x[splits.train], y[splits.train],
                    x[splits.validation], y[splits.validation],
                    config, verbose=verbose)
    reports = {
        "train": evaluate(model, x[splits.train], y[splits.train]),
        "validation": evaluate(model, x[splits.validation],
                               y[splits.validation]),
        "test": evaluate(model, x[splits.test], y[splits.test]),
    }
    return PipelineResult(model=model, spec=spec, preprocess=preproc,
                          splits=splits, history=history, reports=reports)


def kfold_cv(dataset: LoadedDataset, config: TrainConfig, k: int = 5,
             model_overrides: dict | None = None, verbose: int = 0) -> dict:
    """Shuffle, split into k folds, train k models, aggregate test scores.

    Within each fold's training portion, 20% is held out as the validation
    set driving the early-stop rule; the held-out fold itself is scored.
    """
    if k < 2:
        raise ConfigurationError("k must be >= 2")
    rng = np.random.default_rng(config.split_seed)
    order = rng.permutation(dataset.n_samples)
    folds = np.array_split(order, k)
    if min(fold.size for fold in folds) < config.batch_size:
        raise ConfigurationError(
            f"fold size {min(f.size for f in folds)} is smaller than the "
            f"batch size {config.batch_size}")

    reports = []
    for fold_index, fold in enumerate(folds):
        pool = np.concatenate([f for i, f in enumerate(folds) if i != fold_index])
        n_val = round(config.validation_fraction * pool.size)
        val_idx, train_idx = pool[:n_val], pool[n_val:]
        tf.keras.utils.set_random_seed(config.model_seed + fold_index)
        preproc = PreprocessState.fit(dataset.features[train_idx],
                                      dataset.labels[train_idx])
        x, y = _transformed_arrays(dataset, preproc)
        model = build_model(spec_for_dataset(dataset.n_sites,
                                             dataset.features.shape[1],
                                             **(model_overrides or {})))
        train(model, x[train_idx], y[train_idx], x[val_idx], y[val_idx],
              config, verbose=verbose)
        reports.append(evaluate(model, x[fold], y[fold]))

    mses = np.array([r.mse for r in reports])
    r2s = np.array([r.r2_percent for r in reports])
    return {
        "k": k,
        "mse_mean": float(mses.mean()),
        "mse_std": float(mses.std()),
        "r2_mean": float(r2s.mean()),
        "r2_std": float(r2s.std()),
        "folds": [r.to_dict() for r in reports],
    }


def window_truncation_study(dataset: LoadedDataset, config: TrainConfig,
                            windows_fs, model_overrides: dict | None = None,
                            verbose: int = 0) -> dict:
    """Retrain on the first floor(window/dt) steps for each window."""
    horizon_fs = dataset.features.shape[1] * dataset.dt_fs
    results = {}
    for window_fs in windows_fs:
        if window_fs > horizon_fs + 1e-9:
            raise ValueError(f"window {window_fs} fs exceeds the stored "
                             f"horizon {horizon_fs:g} fs")
        window_steps = steps_for_window_fs(window_fs, dataset.dt_fs)
        result = run_pipeline(dataset.windowed(window_steps), config,
                              model_overrides=model_overrides, verbose=verbose)
        results[float(window_fs)] = result.summary()
    return results


def overdamped_analysis(model, preproc: PreprocessState,
                        dataset: LoadedDataset, test_indices: np.ndarray,
                        coupling_threshold: float = 30.0) -> dict:
    """Split two-level test error by |J| at ``coupling_threshold`` cm^-1.

    Returns mean absolute errors of the energy and coupling predictions
    (physical units) per partition — the weak-coupling partition is absent
    (None) when no test sample falls in it — plus scatter arrays for
    parity plots.
    """
    if dataset.labels.shape[1] != 2:
        raise ConfigurationError("overdamped analysis expects a 2-level "
                                 "dataset (labels eps_2, J_12)")
    x = preproc.transform_features(dataset.features[test_indices])[..., None]
    predicted = preproc.inverse_transform_labels(predict(model, x))
    true = dataset.labels[test_indices]
    abs_err = np.abs(predicted - true)
    weak = np.abs(true[:, 1]) <= coupling_threshold

    def partition(mask):
        if not mask.any():
            return None
        return {
            "n_samples": int(mask.sum()),
            "mae_energy": float(abs_err[mask, 0].mean()),
            "mae_coupling": float(abs_err[mask, 1].mean()),
        }

    return {
        "coupling_threshold": float(coupling_threshold),
        "overdamped": partition(weak),
        "underdamped": partition(~weak),
        "scatter": {
            "true_energy": true[:, 0],
            "pred_energy": predicted[:, 0],
            "true_coupling": true[:, 1],
            "pred_coupling": predicted[:, 1],
        },
    }


def _write_history_csv(path, history: dict) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "train_mse", "val_mse"])
        for epoch, (tr, va) in enumerate(zip(history["train_mse"],
                                             history["val_mse"])):
            writer.writerow([epoch, repr(tr), repr(va)])


def _write_metrics_csv(path, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["scope", "split", "mse", "r2_percent", "n_samples"])
        writer.writerows(rows)


def _write_scatter_csv(path, scatter: dict) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        keys = list(scatter)
        writer.writerow(keys)
        for row in zip(*(scatter[key] for key in keys)):
            writer.writerow([repr(float(v)) for v in row])


def run_experiment(experiment: dict, verbose: int = 0) -> dict:
    """Run the experiment described by a config dict; write all reports.

    Recognized keys: dataset_dir (required), output_dir (required),
    window_steps, train {TrainConfig fields}, model {ModelSpec overrides},
    windows_fs [..], kfold (int, 0 = skip), overdamped_threshold
    (number or null), verify_checksum (bool).
    """
    dataset = load_dataset(experiment["dataset_dir"],
                           window_steps=experiment.get("window_steps"),
                           verify=experiment.get("verify_checksum", False))
    config = TrainConfig(**experiment.get("train", {}))
    model_overrides = {key: tuple(value) if isinstance(value, list) else value
                       for key, value in experiment.get("model", {}).items()}
    out_dir = Path(experiment["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    result = run_pipeline(dataset, config, model_overrides=model_overrides,
                          verbose=verbose)
    report = {
        "dataset_dir": str(experiment["dataset_dir"]),
        "n_samples": dataset.n_samples,
        "n_parameters": int(result.model.count_params()),
        "splits": {"train": int(result.splits.train.size),
                   "validation": int(result.splits.validation.size),
                   "test": int(result.splits.test.size)},
        "metrics": result.summary(),
        "history": result.history,
    }
    metrics_rows = [["full", name, r.mse, r.r2_percent, r.n_samples]
                    for name, r in result.reports.items()]

    windows = experiment.get("windows_fs") or []
    if windows:
        report["windows"] = window_truncation_study(
            dataset, config, windows, model_overrides=model_overrides,
            verbose=verbose)
        for window_fs, summaries in report["windows"].items():
            metrics_rows += [[f"window_{window_fs:g}fs", name,
                              s["mse"], s["r2_percent"], s["n_samples"]]
                             for name, s in summaries.items()]

    k = experiment.get("kfold") or 0
    if k:
        report["kfold"] = kfold_cv(dataset, config, k=k,
                                   model_overrides=model_overrides,
                                   verbose=verbose)

    threshold = experiment.get("overdamped_threshold")
    if threshold is not None and dataset.labels.shape[1] == 2:
        analysis = overdamped_analysis(result.model, result.preprocess,
                                       dataset, result.splits.test,
                                       coupling_threshold=threshold)
        _write_scatter_csv(out_dir / "overdamped_scatter.csv",
                           analysis.pop("scatter"))
        report["overdamped"] = analysis

    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    _write_history_csv(out_dir / "history.csv", result.history)
    _write_metrics_csv(out_dir / "metrics.csv", metrics_rows)
    return report
