"""Excitonic system and bath definitions.

The system is an N-site linear chain in the single-excitation basis: site
energies on the diagonal, real nearest-neighbour couplings on the first
off-diagonals, everything else zero.  Site energies are stored relative to
site 1 (so ``energies[0] == 0``); the absolute scale is pure metadata
because a uniform diagonal shift drops out of every commutator.

Each site couples to its own overdamped phonon bath, described by an Ohmic
spectral density with a Drude-Lorentz cutoff,

    J(w) = 2 * lam * gamma * w / (w**2 + gamma**2),

parameterized by the reorganization energy ``lam`` and the inverse phonon
relaxation time ``gamma`` (both cm^-1).
"""

from dataclasses import dataclass

import numpy as np

from .units import KB_CM1_PER_K

DEFAULT_ENERGY_OFFSET_CM1 = 12400.0

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8


@dataclass(frozen=True)
class SystemHamiltonian:
    """Linear-chain excitonic Hamiltonian in cm^-1.

    Parameters
    ----------
    energies : array_like, shape (N,)
        Site energies relative to site 1; ``energies[0]`` must be 0.
    couplings : array_like, shape (N-1,)
        Real nearest-neighbour couplings J_{j,j+1}.
    energy_offset_cm1 : float
        Absolute energy of the site-1 reference.  Metadata only; never
        enters the dynamics.
    """

    energies: np.ndarray
    couplings: np.ndarray
    energy_offset_cm1: float = DEFAULT_ENERGY_OFFSET_CM1

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        couplings = np.asarray(self.couplings, dtype=float)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "couplings", couplings)
        if energies.ndim != 1 or energies.size < 2:
            raise ValueError("need at least 2 site energies")
        if couplings.shape != (energies.size - 1,):
            raise ValueError(
                f"expected {energies.size - 1} couplings for "
                f"{energies.size} sites, got {couplings.size}"
            )
        if not (np.isfinite(energies).all() and np.isfinite(couplings).all()):
            raise ValueError("energies and couplings must be finite")
        if energies[0] != 0.0:
            raise ValueError("energies are relative to site 1: energies[0] must be 0")

    @property
    def n_sites(self) -> int:
        return self.energies.size

    def labels(self) -> np.ndarray:
        """The 2(N-1) free parameters: eps_2..eps_N then J_12..J_{N-1,N}."""
        return np.concatenate([self.energies[1:], self.couplings])


def build_hamiltonian_matrix(hamiltonian: SystemHamiltonian) -> np.ndarray:
    """Realize the N x N real-symmetric tridiagonal matrix (cm^-1)."""
    n = hamiltonian.n_sites
    matrix = np.zeros((n, n), dtype=float)
    matrix[np.diag_indices(n)] = hamiltonian.energies
    off = np.arange(n - 1)
    matrix[off, off + 1] = hamiltonian.couplings
    matrix[off + 1, off] = hamiltonian.couplings
    return matrix


@dataclass(frozen=True)
class BathSpec:
    """Per-site Drude-Lorentz bath parameters (cm^-1) and temperature (K)."""

    lambdas: np.ndarray
    gammas: np.ndarray
    temperature: float

    def __post_init__(self):
        lambdas = np.atleast_1d(np.asarray(self.lambdas, dtype=float))
        gammas = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "gammas", gammas)
        if lambdas.shape != gammas.shape:
            raise ValueError("lambdas and gammas must have the same length")
        if not (lambdas > 0).all():
            raise ValueError("reorganization energies must be > 0")
        if not (gammas > 0).all():
            raise ValueError("phonon relaxation rates must be > 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0 K")

    @classmethod
    def uniform(cls, n_sites: int, lambda_cm1: float, gamma_cm1: float,
                temperature_k: float) -> "BathSpec":
        """Identical bath on every site."""
        return cls(
            lambdas=np.full(n_sites, float(lambda_cm1)),
            gammas=np.full(n_sites, float(gamma_cm1)),
            temperature=float(temperature_k),
        )

    @property
    def n_sites(self) -> int:
        return self.lambdas.size

    def high_temperature_ratio(self) -> np.ndarray:
        """hbar*gamma_j / (k_B T) per site; the theory assumes this << 1."""
        return self.gammas / (KB_CM1_PER_K * self.temperature)


def spectral_density(omega, lambda_cm1, gamma_cm1):
    """Drude-Lorentz spectral density 2*lam*gamma*w / (w**2 + gamma**2).

    Odd in ``omega``; peaks at ``omega == gamma`` with value ``lambda_cm1``.
    All arguments in cm^-1, vectorized over ``omega``.
    """
    if gamma_cm1 <= 0:
        raise ValueError("gamma must be > 0")
    omega = np.asarray(omega, dtype=float)
    return 2.0 * lambda_cm1 * gamma_cm1 * omega / (omega**2 + gamma_cm1**2)


def site_basis_state(n_sites: int, site: int) -> np.ndarray:
    """Density matrix |site><site| (0-based) as a complex array."""
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} out of range for {n_sites} sites")
    rho = np.zeros((n_sites, n_sites), dtype=complex)
    rho[site, site] = 1.0
    return rho


def hermiticity_defect(rho: np.ndarray) -> float:
    """Largest elementwise deviation of rho from its conjugate transpose."""
    return float(np.abs(rho - rho.conj().T).max())


def validate_density_matrix(rho: np.ndarray,
                            hermiticity_tol: float = HERMITICITY_TOL,
                            trace_tol: float = TRACE_TOL) -> None:
    """Check Hermiticity and unit trace; raise ValueError on violation."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    defect = hermiticity_defect(rho)
    if defect > hermiticity_tol:
        raise ValueError(f"density matrix not Hermitian (defect {defect:.3e})")
    trace_err = abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag)
    if trace_err > trace_tol:
        raise ValueError(f"density matrix trace differs from 1 by {trace_err:.3e}")
