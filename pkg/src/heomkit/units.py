"""Unit bookkeeping for wavenumber-based exciton models.

All user-facing quantities are wavenumbers (cm^-1), times in ps and
temperatures in kelvin.  The equations of motion run in angular-frequency
units (rad/ps) with hbar = 1, so every energy crosses the boundary exactly
once, through :data:`CM1_TO_RAD_PS`.
"""

import numpy as np

# 2*pi*c with c expressed in cm/ps (c = 2.99792458e10 cm/s)
CM1_TO_RAD_PS = 2.0 * np.pi * 2.99792458e-2

# k_B / (h c), i.e. one kelvin expressed as a wavenumber
KB_CM1_PER_K = 1.380649e-23 / (6.62607015e-34 * 2.99792458e10)


def cm1_to_rad_ps(value_cm1):
    """Convert a wavenumber (cm^-1) to an angular frequency (rad/ps)."""
    return np.asarray(value_cm1, dtype=float) * CM1_TO_RAD_PS


def rad_ps_to_cm1(value_rad_ps):
    """Inverse of :func:`cm1_to_rad_ps`."""
    return np.asarray(value_rad_ps, dtype=float) / CM1_TO_RAD_PS


def thermal_energy(temperature_k: float) -> float:
    """k_B * T expressed as a wavenumber (cm^-1).

    Raises
    ------
    ValueError
        If the temperature is not strictly positive.
    """
    if temperature_k <= 0.0:
        raise ValueError(f"temperature must be > 0 K, got {temperature_k}")
    return KB_CM1_PER_K * temperature_k
