"""Run an experiment file: ``python -m heominv experiment.json``."""

import argparse
import json
import sys

from .experiments import run_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heominv",
        description="Train and evaluate the inverse-regression CNN from an "
                    "experiment config file.")
    parser.add_argument("experiment", help="path to the experiment JSON file")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="show per-epoch Keras output")
    args = parser.parse_args(argv)

    with open(args.experiment) as handle:
        experiment = json.load(handle)
    report = run_experiment(experiment, verbose=min(args.verbose, 2))

    for split, scores in report["metrics"].items():
        print(f"{split:>10}: MSE {scores['mse']:.4f}  "
              f"R^2 {scores['r2_percent']:.2f}%  (n={scores['n_samples']})")
    if "windows" in report:
        for window_fs, summaries in report["windows"].items():
            test = summaries["test"]
            print(f"window {window_fs:g} fs test: MSE {test['mse']:.4f}  "
                  f"R^2 {test['r2_percent']:.2f}%")
    if "kfold" in report:
        cv = report["kfold"]
        print(f"{cv['k']}-fold CV: MSE {cv['mse_mean']:.4f} +/- "
              f"{cv['mse_std']:.4f}, R^2 {cv['r2_mean']:.2f} +/- "
              f"{cv['r2_std']:.2f}")
    if report.get("overdamped"):
        for name in ("overdamped", "underdamped"):
            part = report["overdamped"][name]
            if part is None:
                print(f"{name}: no test samples in partition")
            else:
                print(f"{name}: n={part['n_samples']}  "
                      f"MAE(eps) {part['mae_energy']:.2f} cm^-1  "
                      f"MAE(J) {part['mae_coupling']:.2f} cm^-1")
    return 0


if __name__ == "__main__":
    sys.exit(main())
