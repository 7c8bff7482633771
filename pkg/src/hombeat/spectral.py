"""Parametric biphoton joint spectral intensity model and sampling grids.

The source model is a product of two Gaussians in ordinary frequency: a
narrow pump factor in the sum frequency nu1+nu2 (energy conservation) and a
broad phase-matching factor in the difference nu1-nu2. Everything downstream
(coincidence spectra, fringe scans, bin prediction) integrates against this
density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import C_NM_PER_PS, FWHM_PER_SIGMA, wavelength_to_frequency

__all__ = [
    "BiphotonSpectrumModel",
    "FrequencyGrid",
    "JointSpectrumMap",
    "default_grid",
    "jsi_eval",
    "detuning_density",
    "marginal_bandwidth",
]


@dataclass(frozen=True)
class BiphotonSpectrumModel:
    """Parametric joint spectral intensity of a degenerate pair source.

    Parameters
    ----------
    center_wavelength_nm:
        Degenerate wavelength of signal and idler, nm.
    marginal_fwhm_nm:
        FWHM of the single-photon wavelength marginal, nm.
    pump_fwhm_thz:
        FWHM of the pump (sum-frequency) factor in THz. The default is a
        near-zero CW approximation; detuning-level integrals are exact in
        the CW limit, while 2D maps need a finite value for a visible
        anti-diagonal width.
    """

    center_wavelength_nm: float = 810.0
    marginal_fwhm_nm: float = 20.0
    pump_fwhm_thz: float = 0.001

    def __post_init__(self):
        for name in ("center_wavelength_nm", "marginal_fwhm_nm", "pump_fwhm_thz"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
        if self.center_wavelength_nm <= 0:
            raise ValueError("center_wavelength_nm must be positive")
        if self.marginal_fwhm_nm <= 0:
            raise ValueError("marginal_fwhm_nm must be positive")
        if self.pump_fwhm_thz < 0:
            raise ValueError("pump_fwhm_thz must be non-negative")

    @property
    def center_frequency_thz(self) -> float:
        return wavelength_to_frequency(self.center_wavelength_nm)

    @property
    def sum_frequency_thz(self) -> float:
        """Pump (sum) frequency: twice the degenerate frequency."""
        return 2.0 * self.center_frequency_thz

    @property
    def marginal_fwhm_thz(self) -> float:
        """Single-photon marginal FWHM converted to frequency."""
        lam0 = self.center_wavelength_nm
        return C_NM_PER_PS * self.marginal_fwhm_nm / lam0**2

    @property
    def sigma_single_thz(self) -> float:
        """Standard deviation of the single-photon frequency marginal."""
        return self.marginal_fwhm_thz / FWHM_PER_SIGMA

    @property
    def sigma_detuning_thz(self) -> float:
        """Standard deviation of the detuning nu1-nu2.

        For perfectly anti-correlated photons the detuning spread is twice
        the single-photon spread.
        """
        return 2.0 * self.sigma_single_thz

    @property
    def pump_sigma_thz(self) -> float:
        return self.pump_fwhm_thz / FWHM_PER_SIGMA


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform per-axis frequency grid for 2D map sampling."""

    min_thz: float
    max_thz: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.min_thz) and np.isfinite(self.max_thz)):
            raise ValueError("grid bounds must be finite")
        if self.max_thz <= self.min_thz:
            raise ValueError("grid max must exceed min")
        if self.n_points < 16:
            raise ValueError("grid needs at least 16 points per axis")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.min_thz, self.max_thz, self.n_points)

    @property
    def step_thz(self) -> float:
        return (self.max_thz - self.min_thz) / (self.n_points - 1)


def default_grid(model: BiphotonSpectrumModel, n_points: int = 512,
                 span_sigmas: float = 5.5) -> FrequencyGrid:
    """Grid centered on the degenerate frequency.

    The default span of 5.5 single-photon standard deviations keeps the
    truncated Gaussian mass below 1e-7, comfortably inside the 1e-6
    normalization budget.
    """
    if span_sigmas < 4.0:
        raise ValueError("grid must span at least 4 envelope standard deviations")
    nu0 = model.center_frequency_thz
    half = span_sigmas * model.sigma_single_thz
    return FrequencyGrid(nu0 - half, nu0 + half, n_points)


@dataclass(frozen=True)
class JointSpectrumMap:
    """Sampled 2D intensity over (signal, idler) wavelength axes.

    ``intensity[i, j]`` is the density (1/nm^2) at ``signal_nm[i]``,
    ``idler_nm[j]``. Axes are strictly increasing.
    """

    signal_nm: np.ndarray
    idler_nm: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.signal_nm, dtype=float)
        i = np.asarray(self.idler_nm, dtype=float)
        z = np.asarray(self.intensity, dtype=float)
        object.__setattr__(self, "signal_nm", s)
        object.__setattr__(self, "idler_nm", i)
        object.__setattr__(self, "intensity", z)
        if z.shape != (s.size, i.size):
            raise ValueError("intensity shape must match axis lengths")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(i) <= 0):
            raise ValueError("wavelength axes must be strictly increasing")
        if not np.all(np.isfinite(z)) or np.any(z < 0):
            raise ValueError("intensity entries must be finite and non-negative")

    def cell_widths(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-sample cell widths (nm) for mass integration, midpoint rule."""
        return _axis_widths(self.signal_nm), _axis_widths(self.idler_nm)

    def cell_masses(self) -> np.ndarray:
        ws, wi = self.cell_widths()
        return self.intensity * ws[:, None] * wi[None, :]

    def total_mass(self) -> float:
        return float(self.cell_masses().sum())


def _axis_widths(axis: np.ndarray) -> np.ndarray:
    edges = np.empty(axis.size + 1)
    edges[1:-1] = 0.5 * (axis[:-1] + axis[1:])
    edges[0] = axis[0] - 0.5 * (axis[1] - axis[0])
    edges[-1] = axis[-1] + 0.5 * (axis[-1] - axis[-2])
    return np.diff(edges)


def jsi_eval(model: BiphotonSpectrumModel, nu1_thz, nu2_thz):
    """Normalized joint spectral intensity f(nu1, nu2) in 1/THz^2.

    Symmetric under exchange of its two frequency arguments. The pump
    factor approaches a delta function as pump_fwhm_thz goes to zero, so
    evaluation requires a strictly positive pump width; detuning-level
    quantities that are exact in the CW limit use ``detuning_density``
    instead.
    """
    nu1 = np.asarray(nu1_thz, dtype=float)
    nu2 = np.asarray(nu2_thz, dtype=float)
    if not (np.all(np.isfinite(nu1)) and np.all(np.isfinite(nu2))):
        raise ValueError("frequencies must be finite")
    if np.any(nu1 <= 0) or np.any(nu2 <= 0):
        raise ValueError("frequencies must be positive")
    sig_p = model.pump_sigma_thz
    if sig_p <= 0:
        raise ValueError("jsi_eval needs pump_fwhm_thz > 0; the CW limit is "
                         "only defined under an integral")
    sig1 = model.sigma_single_thz
    s = nu1 + nu2 - model.sum_frequency_thz
    d = nu1 - nu2
    norm = 1.0 / (2.0 * np.pi * sig_p * sig1)
    out = norm * np.exp(-s * s / (2.0 * sig_p**2)) * np.exp(-d * d / (8.0 * sig1**2))
    if np.isscalar(nu1_thz) and np.isscalar(nu2_thz):
        return float(out)
    return out


def detuning_density(model: BiphotonSpectrumModel, detuning_thz):
    """Marginal density of the detuning d = nu1 - nu2, in 1/THz.

    Obtained by integrating the joint intensity over the sum frequency;
    exact for any pump width, including the CW limit. Integrates to 1.
    """
    d = np.asarray(detuning_thz, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValueError("detuning must be finite")
    sig_d = model.sigma_detuning_thz
    out = np.exp(-d * d / (2.0 * sig_d**2)) / (np.sqrt(2.0 * np.pi) * sig_d)
    return float(out) if np.isscalar(detuning_thz) else out


def _frequency_marginal(model: BiphotonSpectrumModel, nu1: np.ndarray) -> np.ndarray:
    """Single-photon marginal density over nu1 (1/THz), numeric in the pump."""
    sig_p = max(model.pump_sigma_thz, 1e-9)
    sig1 = model.sigma_single_thz
    # Integrate over u = nu1 + nu2 - nu_pump; the pump factor is narrow so
    # a fixed stencil across +-8 pump sigmas resolves it fully.
    u = np.linspace(-8.0 * sig_p, 8.0 * sig_p, 257)
    pump = np.exp(-u * u / (2.0 * sig_p**2))
    norm = 1.0 / (2.0 * np.pi * sig_p * sig1)
    d = 2.0 * nu1[:, None] - model.sum_frequency_thz - u[None, :]
    pm = np.exp(-d * d / (8.0 * sig1**2))
    return norm * np.trapezoid(pump[None, :] * pm, u, axis=1)


def marginal_bandwidth(model: BiphotonSpectrumModel, n_points: int = 4001) -> float:
    """FWHM (nm) of the single-photon wavelength marginal.

    Computed by numeric marginalization over the partner photon, transformed
    to the wavelength domain with its Jacobian, and measured between
    interpolated half-maximum crossings.
    """
    sig_m = np.hypot(model.sigma_single_thz, 0.5 * max(model.pump_sigma_thz, 1e-9))
    nu0 = model.center_frequency_thz
    nu = np.linspace(nu0 - 6.0 * sig_m, nu0 + 6.0 * sig_m, n_points)
    dens_nu = _frequency_marginal(model, nu)
    lam = C_NM_PER_PS / nu
    dens_lam = dens_nu * C_NM_PER_PS / lam**2
    order = np.argsort(lam)
    lam, dens_lam = lam[order], dens_lam[order]
    half = 0.5 * dens_lam.max()
    above = dens_lam >= half
    idx = np.nonzero(above)[0]
    lo, hi = idx[0], idx[-1]

    def cross(i0, i1):
        x0, x1 = lam[i0], lam[i1]
        y0, y1 = dens_lam[i0], dens_lam[i1]
        return x0 + (half - y0) * (x1 - x0) / (y1 - y0)

    left = cross(lo - 1, lo) if lo > 0 else lam[0]
    right = cross(hi, hi + 1) if hi < lam.size - 1 else lam[-1]
    return float(right - left)
