"""Unit conventions and wavelength/frequency conversions.

Fixed conventions used across the package: wavelengths in nm, times in ps,
ordinary frequencies in THz (1/ps). Angular frequencies never appear in
public interfaces; every oscillatory term is written as cos(2*pi*nu*t).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "C_NM_PER_PS",
    "FWHM_PER_SIGMA",
    "wavelength_to_frequency",
    "frequency_to_wavelength",
]

# Speed of light in nm/ps, exact by SI definition.
C_NM_PER_PS = 299792.458

# Gaussian FWHM = 2*sqrt(2*ln 2) * sigma.
FWHM_PER_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))


def wavelength_to_frequency(wavelength_nm):
    """Convert wavelength (nm) to ordinary frequency (THz).

    Accepts scalars or arrays. Raises ValueError for non-positive or
    non-finite input.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise ValueError("wavelength must be positive and finite")
    out = C_NM_PER_PS / lam
    return float(out) if np.isscalar(wavelength_nm) else out


def frequency_to_wavelength(frequency_thz):
    """Convert ordinary frequency (THz) to wavelength (nm)."""
    nu = np.asarray(frequency_thz, dtype=float)
    if not np.all(np.isfinite(nu)) or np.any(nu <= 0):
        raise ValueError("frequency must be positive and finite")
    out = C_NM_PER_PS / nu
    return float(out) if np.isscalar(frequency_thz) else out
