"""heomkit: high-temperature HEOM dynamics for excitonic chains.

Simulates excitation-energy transfer in N-site linear chains coupled to
Drude-Lorentz baths, and mass-produces reproducible (trajectory, labels)
datasets for learning the inverse map from dynamics back to Hamiltonian
parameters.
"""

from .dataset import (
    DatasetReader,
    DatasetRecord,
    Manifest,
    SamplingSpec,
    Trajectory,
    extract_features,
    generate_dataset,
    read_dataset,
    sample_hamiltonian,
    sample_seed,
)
from .engine import (
    HEOMConfig,
    HeomOperator,
    HierarchyState,
    RhoTrajectory,
    build_generator,
    heom_rhs,
    liouvillian_apply,
    phi_apply,
    propagate,
    propagate_expm,
    propagate_rk4,
    theta_apply,
)
from .errors import DatasetCorruptionError, DivergenceError, UnsupportedFormatError
from .hierarchy import Hierarchy, enumerate_hierarchy
from .model import (
    BathSpec,
    SystemHamiltonian,
    build_hamiltonian_matrix,
    hermiticity_defect,
    site_basis_state,
    spectral_density,
    validate_density_matrix,
)
from .units import CM1_TO_RAD_PS, KB_CM1_PER_K, cm1_to_rad_ps, rad_ps_to_cm1, thermal_energy

__version__ = "0.1.0"

__all__ = [
    "BathSpec",
    "CM1_TO_RAD_PS",
    "DatasetCorruptionError",
    "DatasetReader",
    "DatasetRecord",
    "DivergenceError",
    "HEOMConfig",
    "HeomOperator",
    "Hierarchy",
    "HierarchyState",
    "KB_CM1_PER_K",
    "Manifest",
    "RhoTrajectory",
    "SamplingSpec",
    "SystemHamiltonian",
    "Trajectory",
    "UnsupportedFormatError",
    "build_generator",
    "build_hamiltonian_matrix",
    "cm1_to_rad_ps",
    "enumerate_hierarchy",
    "extract_features",
    "generate_dataset",
    "heom_rhs",
    "hermiticity_defect",
    "liouvillian_apply",
    "phi_apply",
    "propagate",
    "propagate_expm",
    "propagate_rk4",
    "rad_ps_to_cm1",
    "read_dataset",
    "sample_hamiltonian",
    "sample_seed",
    "site_basis_state",
    "spectral_density",
    "theta_apply",
    "thermal_energy",
    "validate_density_matrix",
]
