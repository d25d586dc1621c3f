"""Acceptance gate: one test per release criterion, full problem scale.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines.  This module is slower than the unit suite (a few minutes:
it propagates hundreds of full 5000-step trajectories).
"""

import os
import shutil
import time
from math import comb

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.signal import find_peaks

from heomkit import (
    BathSpec,
    CM1_TO_RAD_PS,
    DatasetCorruptionError,
    HEOMConfig,
    SamplingSpec,
    SystemHamiltonian,
    UnsupportedFormatError,
    build_hamiltonian_matrix,
    enumerate_hierarchy,
    extract_features,
    propagate_expm,
    propagate_rk4,
    read_dataset,
    sample_hamiltonian,
    site_basis_state,
)
from heomkit.cli import main as cli_main

FIG1 = SystemHamiltonian(energies=[0.0, 100.0], couplings=[100.0])
FIG1_BATH = BathSpec.uniform(2, 35.0, 106.1767, 300.0)
FULL = HEOMConfig.for_horizon(1.0, 5000)

TRACE_TOL = 1e-8
HERM_TOL = 1e-10
POP_TOL = 1e-8
CROSS_TOL = 1e-6
UNITARY_TOL = 1e-8
RUNTIME_LIMIT_S = 10.0


def _report(tag: str, passed: bool, detail: str = "") -> None:
    print(f"\n[{tag}] {'PASS' if passed else 'FAIL'} {detail}")


def random_system(n_sites: int, seed: int, index: int):
    spec = SamplingSpec(n_sites=n_sites, n_samples=1, seed=seed)
    h = sample_hamiltonian(spec, index)
    bath = BathSpec.uniform(n_sites, 35.0, 106.1767, 300.0)
    return h, bath


def check_physical_invariants(rhos: np.ndarray) -> None:
    traces = np.einsum("tii->t", rhos)
    assert np.abs(traces - 1.0).max() <= TRACE_TOL
    assert np.abs(rhos - rhos.conj().transpose(0, 2, 1)).max() <= HERM_TOL
    populations = np.einsum("tii->ti", rhos).real
    assert populations.min() >= -POP_TOL
    assert populations.max() <= 1.0 + POP_TOL


def test_p1_reference_trajectory_and_integrator_agreement():
    try:
        t0 = time.perf_counter()
        rk4 = propagate_rk4(None, FIG1, FIG1_BATH, FULL)
        t_rk4 = time.perf_counter() - t0
        t0 = time.perf_counter()
        exp = propagate_expm(None, FIG1, FIG1_BATH, FULL)
        t_exp = time.perf_counter() - t0

        p1 = rk4.populations()[:, 0]
        assert p1[0] == 1.0
        early = rk4.times < 0.5
        n_max, _ = find_peaks(p1[early], prominence=0.01)
        n_min, _ = find_peaks(-p1[early], prominence=0.01)
        assert len(n_max) + len(n_min) >= 2
        # oscillation decays toward a constant: late-time swing is small
        late = p1[rk4.times >= 0.8]
        assert late.max() - late.min() < 0.02
        deviation = np.abs(rk4.rhos - exp.rhos).max()
        assert deviation <= CROSS_TOL
        assert t_rk4 <= RUNTIME_LIMIT_S
        assert t_exp <= RUNTIME_LIMIT_S
    except BaseException:
        _report("P1", False)
        raise
    _report("P1", True,
            f"(rk4 {t_rk4:.2f}s, expm {t_exp:.2f}s, max dev {deviation:.2e}, "
            f"{len(n_max) + len(n_min)} extrema < 500 fs)")


def test_p2_physical_invariants_on_randomized_suite():
    worst_cross = 0.0
    try:
        for n_sites, base_seed in ((2, 100), (3, 200), (4, 300)):
            for index in range(20):
                h, bath = random_system(n_sites, base_seed, index)
                rk4 = propagate_rk4(None, h, bath, FULL)
                exp = propagate_expm(None, h, bath, FULL)
                check_physical_invariants(rk4.rhos)
                check_physical_invariants(exp.rhos)
                worst_cross = max(worst_cross,
                                  np.abs(rk4.rhos - exp.rhos).max())
        assert worst_cross <= CROSS_TOL
    except BaseException:
        _report("P2", False)
        raise
    _report("P2", True,
            f"(60 systems x 5000 steps, both integrators; "
            f"worst rk4-expm deviation {worst_cross:.2e})")


def closed_system_rhos(h: SystemHamiltonian, times: np.ndarray) -> np.ndarray:
    h_rad = build_hamiltonian_matrix(h) * CM1_TO_RAD_PS
    w, q = np.linalg.eigh(h_rad)
    rho0 = site_basis_state(h.n_sites, 0)
    a = q.conj().T @ rho0 @ q
    phases = np.exp(-1j * np.outer(times, w))
    return np.einsum("ij,tj,jk,tk,lk->til", q, phases, a, phases.conj(), q.conj())


def test_p3_unitary_limit_matches_dense_diagonalization():
    worst = 0.0
    try:
        for n_sites, base_seed in ((2, 400), (3, 500), (4, 600)):
            bath = BathSpec.uniform(n_sites, 1e-12, 106.1767, 300.0)
            for index in range(10):
                h, _ = random_system(n_sites, base_seed, index)
                result = propagate_rk4(None, h, bath, FULL)
                exact = closed_system_rhos(h, result.times)
                worst = max(worst, np.abs(result.rhos - exact).max())
        assert worst <= UNITARY_TOL
    except BaseException:
        _report("P3", False)
        raise
    _report("P3", True, f"(30 systems; worst deviation {worst:.2e})")


def test_p4_hierarchy_counts():
    try:
        for n_sites in range(1, 7):
            for depth in range(6):
                count = enumerate_hierarchy(n_sites, depth).shape[0]
                assert count == comb(n_sites + depth, depth)
    except BaseException:
        _report("P4", False)
        raise
    _report("P4", True, "(counts equal C(N+K, K) for N in 1..6, K in 0..5)")


@pytest.fixture(scope="module")
def determinism_dirs(tmp_path_factory):
    """Four gen-dataset runs: twice with 1 worker, then 4 and max workers."""
    base = tmp_path_factory.mktemp("determinism")
    runner = CliRunner()
    max_workers = os.cpu_count() or 1
    runs = [("w1a", 1), ("w1b", 1), ("w4", 4), ("wmax", max_workers)]
    for name, workers in runs:
        result = runner.invoke(cli_main, [
            "gen-dataset", "--levels", "2", "--samples", "12", "--seed", "123",
            "--out", str(base / name), "--workers", str(workers)])
        assert result.exit_code == 0, result.output
    return base, [name for name, _ in runs]


def test_p5_generation_determinism(determinism_dirs):
    base, names = determinism_dirs
    files = ("manifest.json", "labels.f64", "features.f64", "rejects.json")
    try:
        reference = {f: (base / names[0] / f).read_bytes() for f in files}
        for name in names[1:]:
            for f in files:
                assert (base / name / f).read_bytes() == reference[f], \
                    f"{f} differs between {names[0]} and {name}"
    except BaseException:
        _report("P5", False)
        raise
    _report("P5", True,
            "(byte-identical across repeat run and worker counts 1/4/max)")


def test_p6_format_round_trip_and_corruption(determinism_dirs, tmp_path):
    base, names = determinism_dirs
    source = base / names[0]
    try:
        reader = read_dataset(source)
        spec = reader.manifest.sampling_spec()
        bath = reader.manifest.bath_spec()
        config = reader.manifest.heom_config()
        # bit-exact labels for every record, bit-exact features for two
        for record in reader:
            expected = sample_hamiltonian(spec, record.sample_id).labels()
            assert record.labels.tobytes() == expected.tobytes()
        for sample_id in (0, 7):
            record = reader.get(sample_id)
            h = sample_hamiltonian(spec, sample_id)
            result = propagate_expm(None, h, bath, config)
            traj = extract_features(result.times[:config.n_steps],
                                    result.rhos[:config.n_steps])
            assert record.trajectory.features.tobytes() == traj.features.tobytes()

        corrupt = tmp_path / "corrupt"
        shutil.copytree(source, corrupt)
        payload = bytearray((corrupt / "features.f64").read_bytes())
        payload[4321] ^= 0x10
        (corrupt / "features.f64").write_bytes(payload)
        with pytest.raises(DatasetCorruptionError):
            read_dataset(corrupt)

        truncated = tmp_path / "truncated"
        shutil.copytree(source, truncated)
        blob = (truncated / "features.f64").read_bytes()
        (truncated / "features.f64").write_bytes(blob[: len(blob) // 2])
        with pytest.raises(DatasetCorruptionError, match="byte"):
            read_dataset(truncated)

        unversioned = tmp_path / "unversioned"
        shutil.copytree(source, unversioned)
        manifest_text = (unversioned / "manifest.json").read_text()
        (unversioned / "manifest.json").write_text(
            manifest_text.replace('"format_version": "1"',
                                  '"format_version": "0"'))
        with pytest.raises(UnsupportedFormatError):
            read_dataset(unversioned)
    except BaseException:
        _report("P6", False)
        raise
    _report("P6", True,
            "(round-trip bit-exact; corruption, truncation and version "
            "errors raised)")
