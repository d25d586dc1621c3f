import hashlib
import json

import numpy as np
import pytest


def write_synthetic_dataset(path, n_samples=48, n_steps=64, n_sites=2,
                            seed=0, dt_fs=0.2, rejects=(), labels=None):
    """Write a dataset directory with analytically generated trajectories.

    The fake dynamics are damped oscillations whose frequency and
    equilibrium depend smoothly on the labels, so small models can learn
    the inverse map quickly in tests.  The files follow the real format:
    manifest.json, labels.f64, features.f64 (little-endian float64) and
    rejects.json.
    """
    path.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    n_labels = 2 * (n_sites - 1)
    n_features = 2 * n_sites - 1
    if labels is None:
        labels = rng.uniform(-100.0, 100.0, size=(n_samples, n_labels))
    labels = np.asarray(labels, dtype="<f8")

    times = np.arange(n_steps) * dt_fs * 1e-3
    features = np.empty((n_samples, n_steps, n_features), dtype="<f8")
    for i in range(n_samples):
        eps = labels[i, : n_sites - 1].sum()
        coupling = labels[i, n_sites - 1:].sum()
        omega = 0.19 * np.hypot(eps, 2.0 * coupling)
        equilibrium = 0.5 + eps / 300.0
        decay = np.exp(-times / 0.3)
        p1 = equilibrium + (1.0 - equilibrium) * np.cos(omega * times) * decay
        p1 = np.clip(p1, 0.0, 1.0)
        rest = (1.0 - p1)[:, None] / (n_sites - 1)
        features[i, :, 0] = p1
        features[i, :, 1:n_sites] = rest
        for c in range(n_features - n_sites):
            features[i, :, n_sites + c] = (np.sign(coupling) * 0.4
                                           * np.sin(omega * times) * decay
                                           + eps / 500.0)

    (path / "labels.f64").write_bytes(labels.tobytes())
    (path / "features.f64").write_bytes(features.tobytes())
    digest = hashlib.sha256()
    digest.update((path / "labels.f64").read_bytes())
    digest.update((path / "features.f64").read_bytes())
    manifest = {
        "format_version": "1",
        "n_sites": n_sites,
        "n_samples": n_samples,
        "n_steps": n_steps,
        "dt_fs": dt_fs,
        "seed": seed,
        "energy_range": [-100.0, 100.0],
        "coupling_range": [-100.0, 100.0],
        "lambda_cm1": 35.0,
        "gamma_cm1": 106.1767,
        "temperature_K": 300.0,
        "depth": 3,
        "integrator": "expm",
        "initial_site": 0,
        "coherence_channel": "real",
        "checksum_sha256": digest.hexdigest(),
    }
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2))
    (path / "rejects.json").write_text(json.dumps(
        [{"sample_id": i, "sub_seed": 0, "error": "synthetic"}
         for i in rejects]))
    return path


@pytest.fixture
def synthetic_dataset(tmp_path):
    return write_synthetic_dataset(tmp_path / "ds")


@pytest.fixture(scope="session")
def learnable_dataset(tmp_path_factory):
    """Larger synthetic set shared by the slow-ish training tests."""
    return write_synthetic_dataset(tmp_path_factory.mktemp("data") / "ds",
                                   n_samples=400, n_steps=64, seed=3)
