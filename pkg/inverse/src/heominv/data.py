"""Loader for the simulation dataset directory format.

A dataset directory contains manifest.json, labels.f64 (little-endian
float64, row-major (n_samples, n_labels)), features.f64 (little-endian
float64, row-major (n_samples, n_steps, n_features)) and rejects.json.
This module reads those files directly; it deliberately has no dependency
on the package that produced them.
"""

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

REQUIRED_MANIFEST_KEYS = (
    "format_version", "n_sites", "n_samples", "n_steps", "dt_fs", "seed",
    "energy_range", "coupling_range", "lambda_cm1", "gamma_cm1",
    "temperature_K", "depth", "integrator", "checksum_sha256",
)
SUPPORTED_FORMAT_VERSION = "1"


@dataclass
class LoadedDataset:
    """In-memory feature/label arrays plus the manifest they came from.

    features : float32, shape (n_kept, window_steps, n_features)
    labels   : float64, shape (n_kept, n_labels), physical units (cm^-1)
    """

    features: np.ndarray
    labels: np.ndarray
    manifest: dict
    sample_ids: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_sites(self) -> int:
        return int(self.manifest["n_sites"])

    @property
    def dt_fs(self) -> float:
        return float(self.manifest["dt_fs"])

    def label_names(self) -> list[str]:
        n = self.n_sites
        return ([f"eps_{j + 2}" for j in range(n - 1)]
                + [f"J_{j + 1}{j + 2}" for j in range(n - 1)])

    def windowed(self, window_steps: int) -> "LoadedDataset":
        """Same samples, features truncated to the first window_steps rows."""
        if not 1 <= window_steps <= self.features.shape[1]:
            raise ValueError(f"window_steps must be in [1, "
                             f"{self.features.shape[1]}], got {window_steps}")
        return LoadedDataset(
            features=self.features[:, :window_steps],
            labels=self.labels,
            manifest=self.manifest,
            sample_ids=self.sample_ids,
        )


def steps_for_window_fs(window_fs: float, dt_fs: float) -> int:
    """Number of stored rows covering the first window_fs femtoseconds."""
    return int(np.floor(window_fs / dt_fs + 1e-9))


def _sha256_of(paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as handle:
            while chunk := handle.read(1 << 20):
                digest.update(chunk)
    return digest.hexdigest()


def load_dataset(path, window_steps=None, verify: bool = False,
                 dtype=np.float32) -> LoadedDataset:
    """Read a dataset directory into memory.

    Rejected samples (rejects.json) are dropped.  Features are cast to
    ``dtype`` (float32 by default: half the memory, plenty for training).
    ``verify=True`` re-hashes the payload files against the manifest.
    """
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"{path} has no manifest.json")
    manifest = json.loads(manifest_path.read_text())
    missing = [key for key in REQUIRED_MANIFEST_KEYS if key not in manifest]
    if missing:
        raise ValueError(f"manifest missing fields: {missing}")
    if manifest["format_version"] != SUPPORTED_FORMAT_VERSION:
        raise ValueError(
            f"unsupported format_version {manifest['format_version']!r}")

    n_samples = int(manifest["n_samples"])
    n_steps = int(manifest["n_steps"])
    n_sites = int(manifest["n_sites"])
    n_labels = 2 * (n_sites - 1)
    n_features = 2 * n_sites - 1

    labels_path = path / "labels.f64"
    features_path = path / "features.f64"
    for file_path, expected in ((labels_path, n_samples * n_labels * 8),
                                (features_path,
                                 n_samples * n_steps * n_features * 8)):
        actual = os.path.getsize(file_path)
        if actual != expected:
            raise ValueError(f"{file_path.name}: expected {expected} bytes, "
                             f"found {actual}")
    if verify:
        checksum = _sha256_of([labels_path, features_path])
        if checksum != manifest["checksum_sha256"]:
            raise ValueError("payload checksum does not match manifest")

    rejected = set()
    rejects_path = path / "rejects.json"
    if rejects_path.is_file():
        rejected = {entry["sample_id"]
                    for entry in json.loads(rejects_path.read_text())}
    keep = np.array([i for i in range(n_samples) if i not in rejected])

    labels = np.fromfile(labels_path, dtype="<f8").reshape(n_samples, n_labels)
    features_mm = np.memmap(features_path, dtype="<f8", mode="r",
                            shape=(n_samples, n_steps, n_features))
    if window_steps is None:
        window_steps = n_steps
    if not 1 <= window_steps <= n_steps:
        raise ValueError(f"window_steps must be in [1, {n_steps}]")
    features = np.empty((keep.size, window_steps, n_features), dtype=dtype)
    for row, sample_id in enumerate(keep):
        features[row] = features_mm[sample_id, :window_steps]
    return LoadedDataset(features=features, labels=labels[keep].copy(),
                         manifest=manifest, sample_ids=keep)
