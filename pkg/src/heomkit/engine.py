"""High-temperature hierarchical equations of motion for excitonic chains.

The reduced density matrix rho(t) is the root of a hierarchy of auxiliary
density operators sigma(n, t), one per multi-index n (see
:mod:`heomkit.hierarchy`).  In internal units (hbar = 1, energies in
rad/ps, time in ps) the interior tiers evolve as

    d sigma(n)/dt = -(i L + sum_j n_j gamma_j) sigma(n)
                    + sum_j [ Phi_j sigma(n_{j+}) + n_j Theta_j sigma(n_{j-}) ]

with L x = [H, x], Phi_j x = i [V_j, x] and

    Theta_j x = i * 2 lam_j kT [V_j, x] + lam_j gamma_j {V_j, x},

where V_j = |j><j| is the site projector.  The deepest tier is terminated
with pure Liouvillian evolution, d sigma/dt = -i [H, sigma].

Two independent propagators are provided: classic fixed-step RK4 applied
to the hierarchy right-hand side, and exact stepping with the matrix
exponential of a sparse generator assembled directly from Kronecker
products.  Their agreement is the engine's primary self-check.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import DivergenceError
from .hierarchy import Hierarchy
from .model import (
    BathSpec,
    SystemHamiltonian,
    build_hamiltonian_matrix,
    site_basis_state,
    validate_density_matrix,
)
from .units import CM1_TO_RAD_PS, thermal_energy

INTEGRATORS = ("rk4", "expm")


@dataclass(frozen=True)
class HEOMConfig:
    """Propagation settings.

    ``dt * n_steps`` is the simulated horizon; the defaults are 1 ps in
    5000 steps (dt = 0.2 fs) with the hierarchy truncated at depth 3.
    ``initial_site`` (0-based) selects the default initial excitation.
    """

    truncation_depth: int = 3
    dt: float = 1.0 / 5000.0
    n_steps: int = 5000
    integrator: str = "rk4"
    initial_site: int = 0

    def __post_init__(self):
        if self.truncation_depth < 1:
            raise ValueError("truncation_depth must be >= 1")
        if self.dt < 0:
            raise ValueError("dt must be >= 0")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.initial_site < 0:
            raise ValueError("initial_site must be >= 0")

    @classmethod
    def for_horizon(cls, time_ps: float, n_steps: int, **kwargs) -> "HEOMConfig":
        """Config covering ``time_ps`` picoseconds in ``n_steps`` steps."""
        if n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        return cls(dt=time_ps / n_steps, n_steps=n_steps, **kwargs)

    @property
    def horizon_ps(self) -> float:
        return self.dt * self.n_steps


@dataclass
class HierarchyState:
    """All auxiliary density operators at one instant.

    ``ados[0]`` is the physical reduced density matrix.
    """

    hierarchy: Hierarchy
    ados: np.ndarray
    time: float = 0.0

    @classmethod
    def initial(cls, hierarchy: Hierarchy, rho0: np.ndarray) -> "HierarchyState":
        ados = np.zeros((hierarchy.size, hierarchy.n_sites, hierarchy.n_sites),
                        dtype=complex)
        ados[0] = rho0
        return cls(hierarchy=hierarchy, ados=ados, time=0.0)

    @property
    def rho(self) -> np.ndarray:
        return self.ados[0]


@dataclass
class RhoTrajectory:
    """Sampled reduced density matrices: rhos[k] at times[k] = k * dt."""

    times: np.ndarray
    rhos: np.ndarray

    def populations(self) -> np.ndarray:
        """Real site populations, shape (n_times, n_sites)."""
        return np.einsum("tii->ti", self.rhos).real.copy()


def liouvillian_apply(hamiltonian_rad_ps: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Commutator [H, sigma] with H in rad/ps (hbar = 1)."""
    h = np.asarray(hamiltonian_rad_ps)
    sigma = np.asarray(sigma)
    if h.shape != sigma.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"shape mismatch: H {h.shape} vs sigma {sigma.shape}")
    return h @ sigma - sigma @ h


def phi_apply(site: int, sigma: np.ndarray) -> np.ndarray:
    """Relaxation operator Phi_j sigma = i [V_j, sigma], V_j = |j><j|."""
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0]
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for dimension {n}")
    out = np.zeros_like(sigma)
    out[site, :] = sigma[site, :]
    out[:, site] -= sigma[:, site]
    return 1j * out


def theta_apply(site: int, sigma: np.ndarray, bath: BathSpec) -> np.ndarray:
    """Relaxation operator Theta_j sigma in internal rad/ps units.

    Theta_j sigma = i * 2 lam_j kT [V_j, sigma] + lam_j gamma_j {V_j, sigma},
    with lam_j, gamma_j and kT converted from cm^-1.
    """
    sigma = np.asarray(sigma, dtype=complex)
    n = sigma.shape[0]
    if not 0 <= site < bath.n_sites or site >= n:
        raise ValueError(f"site {site} out of range")
    lam = bath.lambdas[site] * CM1_TO_RAD_PS
    gam = bath.gammas[site] * CM1_TO_RAD_PS
    kt = thermal_energy(bath.temperature) * CM1_TO_RAD_PS
    comm = np.zeros_like(sigma)
    comm[site, :] = sigma[site, :]
    comm[:, site] -= sigma[:, site]
    anti = np.zeros_like(sigma)
    anti[site, :] = sigma[site, :]
    anti[:, site] += sigma[:, site]
    return 1j * (2.0 * lam * kt) * comm + (lam * gam) * anti


class HeomOperator:
    """Precomputed right-hand side of the hierarchy equations.

    Gather tables and coupling coefficients are laid out once so a single
    :meth:`rhs` call is a handful of vectorized operations over the stacked
    (n_ados, N, N) array.
    """

    def __init__(self, hamiltonian: SystemHamiltonian, bath: BathSpec,
                 config: HEOMConfig):
        n = hamiltonian.n_sites
        if bath.n_sites != n:
            raise ValueError(
                f"bath defines {bath.n_sites} sites, Hamiltonian {n}")
        self.hierarchy = Hierarchy(n, config.truncation_depth)
        self.n_sites = n
        self.h_rad = build_hamiltonian_matrix(hamiltonian).astype(complex)
        self.h_rad *= CM1_TO_RAD_PS

        lam = bath.lambdas * CM1_TO_RAD_PS
        gam = bath.gammas * CM1_TO_RAD_PS
        kt = thermal_energy(bath.temperature) * CM1_TO_RAD_PS
        self.theta_comm_coef = 2.0 * lam * kt
        self.theta_anti_coef = lam * gam

        hier = self.hierarchy
        interior = hier.depths < config.truncation_depth
        self.interior_rows = np.nonzero(interior)[0]
        self.damping = (hier.indices @ gam)[self.interior_rows]

        # coupling tables: only interior tiers carry Phi/Theta terms
        self.phi_rows, self.phi_src = [], []
        self.theta_rows, self.theta_src = [], []
        self.theta_up_coef, self.theta_down_coef = [], []
        for j in range(n):
            self.phi_rows.append(self.interior_rows)
            self.phi_src.append(hier.plus_index[self.interior_rows, j])
            has_minus = interior & (hier.indices[:, j] > 0)
            rows = np.nonzero(has_minus)[0]
            self.theta_rows.append(rows)
            self.theta_src.append(hier.minus_index[rows, j])
            factor = hier.indices[rows, j].astype(complex)
            self.theta_up_coef.append(
                factor * (1j * self.theta_comm_coef[j] + self.theta_anti_coef[j]))
            self.theta_down_coef.append(
                factor * (self.theta_anti_coef[j] - 1j * self.theta_comm_coef[j]))

    def rhs(self, ados: np.ndarray) -> np.ndarray:
        """Time derivative of the stacked hierarchy."""
        out = self.h_rad @ ados
        out -= ados @ self.h_rad
        out *= -1j
        rows = self.interior_rows
        out[rows] -= self.damping[:, None, None] * ados[rows]
        for j in range(self.n_sites):
            g = ados[self.phi_src[j]]
            buf = np.zeros_like(g)
            buf[:, j, :] = 1j * g[:, j, :]
            buf[:, :, j] -= 1j * g[:, :, j]
            out[self.phi_rows[j]] += buf
            rows_t = self.theta_rows[j]
            if rows_t.size:
                g = ados[self.theta_src[j]]
                buf = np.zeros_like(g)
                buf[:, j, :] = self.theta_up_coef[j][:, None] * g[:, j, :]
                buf[:, :, j] += self.theta_down_coef[j][:, None] * g[:, :, j]
                out[rows_t] += buf
        return out


def heom_rhs(state: HierarchyState, hamiltonian: SystemHamiltonian,
             bath: BathSpec, config: HEOMConfig) -> np.ndarray:
    """Derivative of every auxiliary operator, shape (n_ados, N, N)."""
    op = HeomOperator(hamiltonian, bath, config)
    if state.ados.shape != (op.hierarchy.size, op.n_sites, op.n_sites):
        raise RuntimeError(
            f"hierarchy layout mismatch: state {state.ados.shape}, "
            f"expected {(op.hierarchy.size, op.n_sites, op.n_sites)}")
    return op.rhs(state.ados)


def _prepare_initial(initial, hamiltonian, bath, config):
    if initial is None:
        initial = site_basis_state(hamiltonian.n_sites, config.initial_site)
    initial = np.asarray(initial, dtype=complex)
    validate_density_matrix(initial)
    if initial.shape[0] != hamiltonian.n_sites:
        raise ValueError("initial state dimension does not match Hamiltonian")
    ratio = bath.high_temperature_ratio()
    if (ratio >= 1.0).any():
        warnings.warn(
            "hbar*gamma/kT >= 1 on at least one site "
            f"(max {ratio.max():.3g}); the high-temperature hierarchy "
            "is unreliable in this regime", stacklevel=3)
    return initial


def propagate_rk4(initial, hamiltonian: SystemHamiltonian, bath: BathSpec,
                  config: HEOMConfig) -> RhoTrajectory:
    """Fixed-step 4th-order Runge-Kutta propagation.

    Parameters
    ----------
    initial : ndarray or None
        Reduced density matrix at t = 0 (all other tiers start at zero);
        None selects ``|initial_site><initial_site|`` from the config.

    Returns
    -------
    RhoTrajectory
        ``n_steps + 1`` samples of the physical element, t = 0 included.

    Raises
    ------
    DivergenceError
        If any hierarchy element becomes non-finite.
    """
    initial = _prepare_initial(initial, hamiltonian, bath, config)
    op = HeomOperator(hamiltonian, bath, config)
    ados = HierarchyState.initial(op.hierarchy, initial).ados
    n = hamiltonian.n_sites
    dt = config.dt
    rhos = np.empty((config.n_steps + 1, n, n), dtype=complex)
    rhos[0] = ados[0]
    for step in range(1, config.n_steps + 1):
        k1 = op.rhs(ados)
        k2 = op.rhs(ados + (0.5 * dt) * k1)
        k3 = op.rhs(ados + (0.5 * dt) * k2)
        k4 = op.rhs(ados + dt * k3)
        ados += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(ados).all():
            raise DivergenceError(step)
        rhos[step] = ados[0]
    times = np.arange(config.n_steps + 1) * dt
    return RhoTrajectory(times=times, rhos=rhos)


def build_generator(hamiltonian: SystemHamiltonian, bath: BathSpec,
                    config: HEOMConfig) -> scipy.sparse.csr_matrix:
    """Sparse time-independent generator of the flattened hierarchy.

    Assembled directly from Kronecker products (row-major vectorization:
    vec(A X B) = (A kron B^T) vec(X)), independently of
    :class:`HeomOperator`, so the two propagation routes cross-check each
    other.
    """
    n = hamiltonian.n_sites
    if bath.n_sites != n:
        raise ValueError(f"bath defines {bath.n_sites} sites, Hamiltonian {n}")
    hier = Hierarchy(n, config.truncation_depth)
    h_rad = build_hamiltonian_matrix(hamiltonian) * CM1_TO_RAD_PS
    lam = bath.lambdas * CM1_TO_RAD_PS
    gam = bath.gammas * CM1_TO_RAD_PS
    kt = thermal_energy(bath.temperature) * CM1_TO_RAD_PS

    eye = scipy.sparse.identity(n, format="csr")
    eye2 = scipy.sparse.identity(n * n, format="csr")
    h_sp = scipy.sparse.csr_matrix(h_rad)
    liouville = -1j * (scipy.sparse.kron(h_sp, eye) - scipy.sparse.kron(eye, h_sp.T))

    phi_ops, comm_ops, anti_ops = [], [], []
    for j in range(n):
        v = scipy.sparse.csr_matrix(([1.0], ([j], [j])), shape=(n, n))
        comm = scipy.sparse.kron(v, eye) - scipy.sparse.kron(eye, v)
        anti = scipy.sparse.kron(v, eye) + scipy.sparse.kron(eye, v)
        phi_ops.append(1j * comm)
        comm_ops.append(comm)
        anti_ops.append(anti)

    blocks = [[None] * hier.size for _ in range(hier.size)]
    for m in range(hier.size):
        if hier.depths[m] == config.truncation_depth:
            blocks[m][m] = liouville
            continue
        damping = float(hier.indices[m] @ gam)
        blocks[m][m] = liouville - damping * eye2
        for j in range(n):
            p = hier.plus_index[m, j]
            if p >= 0:
                blocks[m][p] = phi_ops[j].copy()
            q = hier.minus_index[m, j]
            if q >= 0:
                n_j = hier.indices[m, j]
                blocks[m][q] = n_j * (
                    1j * 2.0 * lam[j] * kt * comm_ops[j]
                    + lam[j] * gam[j] * anti_ops[j])
    generator = scipy.sparse.bmat(blocks, format="csr")
    expected = hier.size * n * n
    if generator.shape != (expected, expected):
        raise RuntimeError(
            f"generator shape {generator.shape}, expected {expected}")
    return generator


def propagate_expm(initial, hamiltonian: SystemHamiltonian, bath: BathSpec,
                   config: HEOMConfig) -> RhoTrajectory:
    """Exact stepping with the per-step matrix exponential exp(G dt).

    The propagator is computed once (the hierarchy is small enough for a
    dense scaling-and-squaring exponential) and applied as a matrix-vector
    product per step.  Output format matches :func:`propagate_rk4`.
    """
    initial = _prepare_initial(initial, hamiltonian, bath, config)
    generator = build_generator(hamiltonian, bath, config)
    n = hamiltonian.n_sites
    stepper = scipy.linalg.expm(generator.toarray() * config.dt)
    state = np.zeros(generator.shape[0], dtype=complex)
    state[: n * n] = initial.reshape(-1)
    rhos = np.empty((config.n_steps + 1, n, n), dtype=complex)
    rhos[0] = initial
    for step in range(1, config.n_steps + 1):
        state = stepper @ state
        if not np.isfinite(state).all():
            raise DivergenceError(step)
        rhos[step] = state[: n * n].reshape(n, n)
    times = np.arange(config.n_steps + 1) * config.dt
    return RhoTrajectory(times=times, rhos=rhos)


def propagate(initial, hamiltonian: SystemHamiltonian, bath: BathSpec,
              config: HEOMConfig) -> RhoTrajectory:
    """Dispatch to the integrator named in the config."""
    if config.integrator == "rk4":
        return propagate_rk4(initial, hamiltonian, bath, config)
    return propagate_expm(initial, hamiltonian, bath, config)
