"""Reproducible dataset factory: sample chains, simulate, serialize.

A dataset is a directory:

    manifest.json   sampling/bath/engine parameters, format version,
                    SHA-256 over the two payload files
    labels.f64      little-endian float64, row-major (n_samples, 2(N-1))
    features.f64    little-endian float64, row-major
                    (n_samples, n_steps, 2N-1)
    rejects.json    samples whose simulation diverged (normally empty)

Per sample the labels are eps_2..eps_N then J_12..J_{N-1,N}; the feature
columns are the site populations p_1..p_N followed by the nearest-neighbour
coherence channels c_1..c_{N-1}, on the time grid t_k = k*dt for
k = 0..n_steps-1.

Sampling is counter-based: sample i draws from a generator seeded with
splitmix64(seed XOR i), so the dataset bytes depend only on the manifest
parameters, never on worker count or completion order.
"""

import json
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .engine import HEOMConfig, propagate
from .errors import DatasetCorruptionError, DivergenceError, UnsupportedFormatError
from .model import BathSpec, SystemHamiltonian

FORMAT_VERSION = "1"
POPULATION_TOL = 1e-8

_MASK64 = (1 << 64) - 1

COHERENCE_MODES = ("real", "imag", "abs")


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def sample_seed(seed: int, sample_index: int) -> int:
    """Per-sample sub-seed; a pure function of (seed, sample_index)."""
    return _splitmix64((seed ^ sample_index) & _MASK64)


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform sampling ranges for the free Hamiltonian parameters."""

    n_sites: int
    energy_range: tuple = (-100.0, 100.0)
    coupling_range: tuple = (-100.0, 100.0)
    n_samples: int = 25000
    seed: int = 0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("n_sites must be >= 2")
        for name, (lo, hi) in (("energy_range", self.energy_range),
                               ("coupling_range", self.coupling_range)):
            if not lo < hi:
                raise ValueError(f"{name}: need lo < hi, got [{lo}, {hi}]")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def n_labels(self) -> int:
        return 2 * (self.n_sites - 1)


def sample_hamiltonian(spec: SamplingSpec, sample_index: int) -> SystemHamiltonian:
    """Draw one linear chain; deterministic in (spec.seed, sample_index).

    eps_2..eps_N are drawn first, then the N-1 couplings, i.i.d. uniform
    over the configured ranges; eps_1 is the zero reference.
    """
    rng = np.random.default_rng(sample_seed(spec.seed, sample_index))
    energies = np.zeros(spec.n_sites)
    energies[1:] = rng.uniform(*spec.energy_range, size=spec.n_sites - 1)
    couplings = rng.uniform(*spec.coupling_range, size=spec.n_sites - 1)
    return SystemHamiltonian(energies=energies, couplings=couplings)


@dataclass
class Trajectory:
    """Time grid plus the 2N-1 feature channels extracted from rho(t)."""

    times: np.ndarray
    features: np.ndarray

    @property
    def n_sites(self) -> int:
        return (self.features.shape[1] + 1) // 2

    def validate(self, tol: float = POPULATION_TOL) -> None:
        """Raise ValueError unless populations/coherences are physical."""
        n = self.n_sites
        pops = self.features[:, :n]
        coh = self.features[:, n:]
        if self.times.shape[0] != self.features.shape[0]:
            raise ValueError("times and features disagree in length")
        row_sums = pops.sum(axis=1)
        worst = np.abs(row_sums - 1.0).max() if row_sums.size else 0.0
        if worst > tol:
            raise ValueError(f"population rows sum to 1 +/- {worst:.3e}")
        if pops.min() < -tol or pops.max() > 1.0 + tol:
            raise ValueError("populations outside [0, 1]")
        if coh.size and np.abs(coh).max() > 1.0 + tol:
            raise ValueError("coherence channel outside [-1, 1]")


def extract_features(times, rho_series, coherence: str = "real") -> Trajectory:
    """Reduce a density-matrix series to its 2N-1 feature channels.

    Columns are Re rho_jj for j = 1..N, then one scalar per
    nearest-neighbour coherence rho_{j,j+1} (real part by default;
    ``coherence`` selects "real", "imag" or "abs").
    """
    rhos = np.asarray(rho_series)
    if rhos.size == 0:
        raise ValueError("empty density-matrix series")
    if rhos.ndim != 3 or rhos.shape[1] != rhos.shape[2]:
        raise ValueError(f"expected (T, N, N) series, got {rhos.shape}")
    if coherence not in COHERENCE_MODES:
        raise ValueError(f"coherence must be one of {COHERENCE_MODES}")
    times = np.asarray(times, dtype=float)
    if times.shape[0] != rhos.shape[0]:
        raise ValueError("times and series disagree in length")
    n = rhos.shape[1]
    features = np.empty((rhos.shape[0], 2 * n - 1), dtype=float)
    features[:, :n] = np.einsum("tii->ti", rhos).real
    off = np.arange(n - 1)
    raw = rhos[:, off, off + 1]
    if coherence == "real":
        features[:, n:] = raw.real
    elif coherence == "imag":
        features[:, n:] = raw.imag
    else:
        features[:, n:] = np.abs(raw)
    return Trajectory(times=times, features=features)


@dataclass
class DatasetRecord:
    """One stored sample: free parameters plus the simulated trajectory."""

    sample_id: int
    labels: np.ndarray
    trajectory: Trajectory


@dataclass
class Manifest:
    """Everything needed to regenerate or validate a dataset directory."""

    format_version: str
    n_sites: int
    n_samples: int
    n_steps: int
    dt_fs: float
    seed: int
    energy_range: tuple
    coupling_range: tuple
    lambda_cm1: float
    gamma_cm1: float
    temperature_K: float
    depth: int
    integrator: str
    initial_site: int
    coherence_channel: str
    checksum_sha256: str

    REQUIRED = ("format_version", "n_sites", "n_samples", "n_steps", "dt_fs",
                "seed", "energy_range", "coupling_range", "lambda_cm1",
                "gamma_cm1", "temperature_K", "depth", "integrator",
                "checksum_sha256")

    def to_json(self) -> str:
        data = asdict(self)
        data["energy_range"] = list(self.energy_range)
        data["coupling_range"] = list(self.coupling_range)
        return json.dumps(data, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        data = json.loads(text)
        missing = [key for key in cls.REQUIRED if key not in data]
        if missing:
            raise UnsupportedFormatError(f"manifest missing fields: {missing}")
        data.setdefault("initial_site", 0)
        data.setdefault("coherence_channel", "real")
        data["energy_range"] = tuple(data["energy_range"])
        data["coupling_range"] = tuple(data["coupling_range"])
        return cls(**{key: data[key] for key in cls.__dataclass_fields__})

    @property
    def n_labels(self) -> int:
        return 2 * (self.n_sites - 1)

    @property
    def n_features(self) -> int:
        return 2 * self.n_sites - 1

    def sampling_spec(self) -> SamplingSpec:
        return SamplingSpec(n_sites=self.n_sites,
                            energy_range=self.energy_range,
                            coupling_range=self.coupling_range,
                            n_samples=self.n_samples, seed=self.seed)

    def bath_spec(self) -> BathSpec:
        return BathSpec.uniform(self.n_sites, self.lambda_cm1,
                                self.gamma_cm1, self.temperature_K)

    def heom_config(self) -> HEOMConfig:
        return HEOMConfig(truncation_depth=self.depth,
                          dt=self.dt_fs * 1e-3, n_steps=self.n_steps,
                          integrator=self.integrator,
                          initial_site=self.initial_site)


def _uniform_bath_scalars(bath: BathSpec):
    lam, gam = bath.lambdas, bath.gammas
    if not (np.all(lam == lam[0]) and np.all(gam == gam[0])):
        raise ValueError("dataset format stores a single lambda/gamma: "
                         "per-site baths must be identical")
    return float(lam[0]), float(gam[0])


def _simulate_sample(spec: SamplingSpec, bath: BathSpec, config: HEOMConfig,
                     sample_index: int, coherence: str):
    hamiltonian = sample_hamiltonian(spec, sample_index)
    result = propagate(None, hamiltonian, bath, config)
    trajectory = extract_features(result.times[: config.n_steps],
                                  result.rhos[: config.n_steps],
                                  coherence=coherence)
    return hamiltonian.labels(), trajectory.features


def _worker(args):
    spec, bath, config, index, coherence = args
    try:
        labels, features = _simulate_sample(spec, bath, config, index, coherence)
        return index, labels, features, None
    except DivergenceError as exc:
        return index, None, None, str(exc)


def _file_checksum(paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as handle:
            while chunk := handle.read(1 << 20):
                digest.update(chunk)
    return digest.hexdigest()


def generate_dataset(spec: SamplingSpec, bath: BathSpec, config: HEOMConfig,
                     out_dir, workers: int = 1, coherence: str = "real",
                     progress=None) -> Manifest:
    """Simulate every sample and write the dataset directory.

    Samples are farmed out to ``workers`` processes and written into
    preallocated offsets keyed by sample_id, so the output bytes are
    identical for any worker count.  Diverging samples are zero-filled,
    listed in rejects.json and skipped by readers.

    ``progress``, if given, is called as ``progress(done, total)``.
    """
    if bath.n_sites != spec.n_sites:
        raise ValueError("bath and sampling spec disagree on n_sites")
    if coherence not in COHERENCE_MODES:
        raise ValueError(f"coherence must be one of {COHERENCE_MODES}")
    lambda_cm1, gamma_cm1 = _uniform_bath_scalars(bath)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    n_feat = 2 * spec.n_sites - 1
    labels_mm = np.memmap(out_dir / "labels.f64", dtype="<f8", mode="w+",
                          shape=(spec.n_samples, spec.n_labels))
    features_mm = np.memmap(out_dir / "features.f64", dtype="<f8", mode="w+",
                            shape=(spec.n_samples, config.n_steps, n_feat))

    rejects = []
    tasks = ((spec, bath, config, i, coherence) for i in range(spec.n_samples))
    done = 0

    def store(result):
        nonlocal done
        index, label_row, feature_rows, error = result
        if error is None:
            labels_mm[index] = label_row
            features_mm[index] = feature_rows
        else:
            rejects.append({"sample_id": index,
                            "sub_seed": sample_seed(spec.seed, index),
                            "error": error})
        done += 1
        if progress is not None:
            progress(done, spec.n_samples)

    if workers <= 1:
        for task in tasks:
            store(_worker(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_worker, tasks, chunksize=8):
                store(result)

    labels_mm.flush()
    features_mm.flush()
    del labels_mm, features_mm

    rejects.sort(key=lambda entry: entry["sample_id"])
    checksum = _file_checksum([out_dir / "labels.f64", out_dir / "features.f64"])
    manifest = Manifest(
        format_version=FORMAT_VERSION,
        n_sites=spec.n_sites,
        n_samples=spec.n_samples,
        n_steps=config.n_steps,
        dt_fs=config.dt * 1e3,
        seed=spec.seed,
        energy_range=spec.energy_range,
        coupling_range=spec.coupling_range,
        lambda_cm1=lambda_cm1,
        gamma_cm1=gamma_cm1,
        temperature_K=bath.temperature,
        depth=config.truncation_depth,
        integrator=config.integrator,
        initial_site=config.initial_site,
        coherence_channel=coherence,
        checksum_sha256=checksum,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json())
    (out_dir / "rejects.json").write_text(json.dumps(rejects, indent=2) + "\n")
    return manifest


class DatasetReader:
    """Lazy, sample_id-ordered view of a dataset directory.

    Iterating yields :class:`DatasetRecord` for every non-rejected sample;
    payload files are memory-mapped, so nothing is loaded wholesale.
    """

    def __init__(self, path, window_steps=None, verify: bool = True):
        self.path = Path(path)
        manifest_path = self.path / "manifest.json"
        if not manifest_path.is_file():
            raise UnsupportedFormatError(
                f"{self.path} has no manifest.json; not a dataset directory")
        manifest = Manifest.from_json(manifest_path.read_text())
        if manifest.format_version != FORMAT_VERSION:
            raise UnsupportedFormatError(
                f"format_version {manifest.format_version!r} not supported "
                f"(expected {FORMAT_VERSION!r})")
        self.manifest = manifest

        self._labels_path = self.path / "labels.f64"
        self._features_path = self.path / "features.f64"
        self._check_size(self._labels_path,
                         manifest.n_samples * manifest.n_labels * 8)
        self._check_size(self._features_path,
                         manifest.n_samples * manifest.n_steps
                         * manifest.n_features * 8)
        if verify:
            checksum = _file_checksum([self._labels_path, self._features_path])
            if checksum != manifest.checksum_sha256:
                raise DatasetCorruptionError(
                    f"checksum mismatch: manifest records "
                    f"{manifest.checksum_sha256}, files hash to {checksum}")

        if window_steps is None:
            window_steps = manifest.n_steps
        if not 1 <= window_steps <= manifest.n_steps:
            raise ValueError(
                f"window_steps must be in [1, {manifest.n_steps}], "
                f"got {window_steps}")
        self.window_steps = int(window_steps)

        rejects_path = self.path / "rejects.json"
        rejected = []
        if rejects_path.is_file():
            rejected = [entry["sample_id"]
                        for entry in json.loads(rejects_path.read_text())]
        self.rejected_ids = frozenset(rejected)

        self._labels = np.memmap(self._labels_path, dtype="<f8", mode="r",
                                 shape=(manifest.n_samples, manifest.n_labels))
        self._features = np.memmap(
            self._features_path, dtype="<f8", mode="r",
            shape=(manifest.n_samples, manifest.n_steps, manifest.n_features))
        self._times = np.arange(manifest.n_steps) * manifest.dt_fs * 1e-3

    @staticmethod
    def _check_size(path, expected: int) -> None:
        if not path.is_file():
            raise DatasetCorruptionError(f"missing payload file {path.name}")
        actual = os.path.getsize(path)
        if actual != expected:
            raise DatasetCorruptionError(
                f"{path.name} truncated or padded at byte {actual} "
                f"(expected {expected} bytes)")

    def __len__(self) -> int:
        return self.manifest.n_samples - len(self.rejected_ids)

    def get(self, sample_id: int) -> DatasetRecord:
        if not 0 <= sample_id < self.manifest.n_samples:
            raise ValueError(f"sample_id {sample_id} out of range")
        if sample_id in self.rejected_ids:
            raise ValueError(f"sample {sample_id} was rejected at generation")
        w = self.window_steps
        trajectory = Trajectory(times=self._times[:w].copy(),
                                features=np.array(self._features[sample_id, :w]))
        return DatasetRecord(sample_id=sample_id,
                             labels=np.array(self._labels[sample_id]),
                             trajectory=trajectory)

    def __iter__(self):
        for sample_id in range(self.manifest.n_samples):
            if sample_id not in self.rejected_ids:
                yield self.get(sample_id)

    def all_labels(self) -> np.ndarray:
        """Labels for every non-rejected sample, in sample_id order."""
        keep = [i for i in range(self.manifest.n_samples)
                if i not in self.rejected_ids]
        return np.array(self._labels[keep])


def read_dataset(path, window_steps=None, verify: bool = True) -> DatasetReader:
    """Open a dataset directory; see :class:`DatasetReader`."""
    return DatasetReader(path, window_steps=window_steps, verify=verify)
