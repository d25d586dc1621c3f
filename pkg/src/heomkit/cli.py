"""Command-line surface: simulate, gen-dataset, inspect, export.

Exit codes follow the scripting contract: 0 success, 1 runtime failure,
2 usage error.  CSV output is RFC-4180 with shortest round-trip float
formatting; bulk data stays in the binary dataset format.
"""

import csv
import os

import click
import numpy as np

from .dataset import (
    SamplingSpec,
    extract_features,
    generate_dataset,
    read_dataset,
)
from .engine import HEOMConfig, propagate
from .errors import DatasetCorruptionError, DivergenceError, UnsupportedFormatError
from .model import BathSpec, SystemHamiltonian


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"could not parse {flag} as comma-separated floats")


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _feature_header(n_sites: int) -> list[str]:
    return ([f"p_{j + 1}" for j in range(n_sites)]
            + [f"c_{j + 1}" for j in range(n_sites - 1)])


def _label_header(n_sites: int) -> list[str]:
    return ([f"eps_{j + 2}" for j in range(n_sites - 1)]
            + [f"J_{j + 1}{j + 2}" for j in range(n_sites - 1)])


bath_options = [
    click.option("--lambda", "lambda_cm1", type=float, default=35.0,
                 show_default=True, help="Reorganization energy (cm^-1)."),
    click.option("--gamma", "gamma_cm1", type=float, default=106.1767,
                 show_default=True, help="Phonon relaxation rate (cm^-1)."),
    click.option("--temp", "temperature_k", type=float, default=300.0,
                 show_default=True, help="Bath temperature (K)."),
]

engine_options = [
    click.option("--depth", type=int, default=3, show_default=True,
                 help="Hierarchy truncation depth."),
    click.option("--time-ps", type=float, default=1.0, show_default=True,
                 help="Simulated horizon (ps)."),
    click.option("--steps", type=int, default=5000, show_default=True,
                 help="Number of fixed time steps."),
    click.option("--initial-site", type=int, default=1, show_default=True,
                 help="Initially excited site (1-based)."),
]


def _add_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func
    return wrap


@click.group()
def main():
    """Excitonic-chain HEOM simulator and dataset factory."""


@main.command()
@click.option("--levels", type=int, required=True, help="Number of sites N.")
@click.option("--energies", required=True,
              help="N site energies (cm^-1), comma-separated; first must be 0.")
@click.option("--couplings", required=True,
              help="N-1 nearest-neighbour couplings (cm^-1), comma-separated.")
@_add_options(bath_options)
@_add_options(engine_options)
@click.option("--integrator", type=click.Choice(["rk4", "expm"]),
              default="rk4", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="trajectory.csv",
              show_default=True, help="Output CSV path.")
def simulate(levels, energies, couplings, lambda_cm1, gamma_cm1, temperature_k,
             depth, time_ps, steps, initial_site, integrator, out):
    """Propagate one system and write time_ps, p_1..p_N, c_1..c_{N-1}."""
    energy_values = _float_list(energies, "--energies")
    coupling_values = _float_list(couplings, "--couplings")
    if len(energy_values) != levels:
        raise click.BadParameter(f"--energies must list {levels} values")
    if len(coupling_values) != levels - 1:
        raise click.BadParameter(f"--couplings must list {levels - 1} values")
    if energy_values[0] != 0.0:
        raise click.BadParameter(
            "--energies are relative to site 1; the first value must be 0")
    if not 1 <= initial_site <= levels:
        raise click.BadParameter("--initial-site out of range")

    try:
        hamiltonian = SystemHamiltonian(energies=np.array(energy_values),
                                        couplings=np.array(coupling_values))
        bath = BathSpec.uniform(levels, lambda_cm1, gamma_cm1, temperature_k)
        config = HEOMConfig.for_horizon(
            time_ps, steps, truncation_depth=depth, integrator=integrator,
            initial_site=initial_site - 1)
        result = propagate(None, hamiltonian, bath, config)
    except DivergenceError as exc:
        raise click.ClickException(str(exc))
    except ValueError as exc:
        raise click.ClickException(str(exc))

    trajectory = extract_features(result.times, result.rhos)
    rows = ([_fmt(t)] + [_fmt(v) for v in row]
            for t, row in zip(trajectory.times, trajectory.features))
    _write_csv(out, ["time_ps"] + _feature_header(levels), rows)
    click.echo(f"wrote {len(trajectory.times)} rows to {out}")


@main.command("gen-dataset")
@click.option("--levels", type=int, required=True, help="Number of sites N.")
@click.option("--samples", type=int, default=25000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_add_options(bath_options)
@_add_options(engine_options)
@click.option("--integrator", type=click.Choice(["rk4", "expm"]),
              default="expm", show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--workers", type=int, default=1, envvar="HEOM_WORKERS",
              show_default=True, show_envvar=True)
def gen_dataset(levels, samples, seed, lambda_cm1, gamma_cm1, temperature_k,
                depth, time_ps, steps, initial_site, integrator, out, workers):
    """Sample, simulate and store a dataset directory."""
    if not 1 <= initial_site <= levels:
        raise click.BadParameter("--initial-site out of range")
    try:
        spec = SamplingSpec(n_sites=levels, n_samples=samples, seed=seed)
        bath = BathSpec.uniform(levels, lambda_cm1, gamma_cm1, temperature_k)
        config = HEOMConfig.for_horizon(
            time_ps, steps, truncation_depth=depth, integrator=integrator,
            initial_site=initial_site - 1)
    except ValueError as exc:
        raise click.ClickException(str(exc))

    milestones = {max(1, samples * k // 20) for k in range(1, 21)}

    def report(done, total):
        if done in milestones:
            click.echo(f"  {done}/{total} samples")

    try:
        manifest = generate_dataset(spec, bath, config, out,
                                    workers=max(1, workers), progress=report)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"dataset written to {out}")
    click.echo(f"checksum_sha256: {manifest.checksum_sha256}")


@main.command()
@click.argument("path", type=click.Path(exists=True, file_okay=False))
def inspect(path):
    """Print manifest, label statistics and invariant-check counts."""
    try:
        reader = read_dataset(path)
    except (DatasetCorruptionError, UnsupportedFormatError) as exc:
        raise click.ClickException(str(exc))

    click.echo("manifest:")
    for line in reader.manifest.to_json().strip().splitlines():
        click.echo(f"  {line}")

    labels = reader.all_labels()
    click.echo("labels (per column):")
    for name, column in zip(_label_header(reader.manifest.n_sites), labels.T):
        click.echo(f"  {name}: min {column.min():.4f}  max {column.max():.4f}"
                   f"  mean {column.mean():.4f}")

    spec = reader.manifest.sampling_spec()
    passed = failed = 0
    for record in reader:
        try:
            record.trajectory.validate()
            elo, ehi = spec.energy_range
            jlo, jhi = spec.coupling_range
            eps = record.labels[: reader.manifest.n_sites - 1]
            cpl = record.labels[reader.manifest.n_sites - 1:]
            if not ((eps >= elo).all() and (eps <= ehi).all()
                    and (cpl >= jlo).all() and (cpl <= jhi).all()):
                raise ValueError("labels outside sampling ranges")
            passed += 1
        except ValueError:
            failed += 1
    click.echo(f"invariant checks: {passed} passed, {failed} failed"
               f" ({len(reader.rejected_ids)} rejected at generation)")
    if failed:
        raise click.ClickException("invariant violations found")


@main.command()
@click.argument("path", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(file_okay=False), required=True,
              help="Directory for features.csv and labels.csv.")
@click.option("--window-fs", type=float, default=None,
              help="Keep only the first window-fs femtoseconds.")
def export(path, out, window_fs):
    """Write plot-ready CSV slices of a stored dataset."""
    try:
        reader = read_dataset(path)
    except (DatasetCorruptionError, UnsupportedFormatError) as exc:
        raise click.ClickException(str(exc))
    manifest = reader.manifest

    if window_fs is None:
        window_steps = manifest.n_steps
    else:
        horizon_fs = manifest.n_steps * manifest.dt_fs
        if window_fs <= 0 or window_fs > horizon_fs:
            raise click.BadParameter(
                f"--window-fs must be in (0, {horizon_fs:g}] fs")
        window_steps = int(np.floor(window_fs / manifest.dt_fs + 1e-9))

    reader = read_dataset(path, window_steps=window_steps, verify=False)

    os.makedirs(out, exist_ok=True)
    feature_path = os.path.join(out, "features.csv")
    label_path = os.path.join(out, "labels.csv")

    def feature_rows():
        for record in reader:
            for t, row in zip(record.trajectory.times, record.trajectory.features):
                yield [record.sample_id, _fmt(t)] + [_fmt(v) for v in row]

    _write_csv(feature_path,
               ["sample_id", "time_ps"] + _feature_header(manifest.n_sites),
               feature_rows())
    _write_csv(label_path,
               ["sample_id"] + _label_header(manifest.n_sites),
               ([record.sample_id] + [_fmt(v) for v in record.labels]
                for record in reader))
    click.echo(f"wrote {feature_path} and {label_path} "
               f"({window_steps} steps per sample)")


if __name__ == "__main__":
    main()
