"""Shared fixtures: the default source model and cached per-delay results.

The 2D map extractions and the noiseless fits are the slowest pieces of the
suite, and several test modules compare against the same four delays, so
they are computed once per session.
"""

from __future__ import annotations

import numpy as np
import pytest

from hombeat import (
    BiphotonSpectrumModel,
    coincidence_spectrum,
    extract_bins_from_map,
    fit_fringe_scan,
    fringe_scan,
    predict_bins,
)

BENCH_DELAYS_PS = (0.12, 0.20, 0.27, 0.37)
SCAN_DELAYS_PS = (0.12, 0.27, 0.37)
BIN_THRESHOLD = 0.6


@pytest.fixture(scope="session")
def model() -> BiphotonSpectrumModel:
    return BiphotonSpectrumModel()


@pytest.fixture(scope="session")
def predicted_states(model):
    return {t: predict_bins(model, t, threshold=BIN_THRESHOLD)
            for t in BENCH_DELAYS_PS}


@pytest.fixture(scope="session")
def spectrum_maps(model):
    return {t: coincidence_spectrum(model, t) for t in BENCH_DELAYS_PS}


@pytest.fixture(scope="session")
def extractions(spectrum_maps):
    return {t: extract_bins_from_map(m, threshold=BIN_THRESHOLD)
            for t, m in spectrum_maps.items()}


@pytest.fixture(scope="session")
def noiseless_scans(model):
    return {t: fringe_scan(model, t, -0.75, 0.75, 601) for t in SCAN_DELAYS_PS}


@pytest.fixture(scope="session")
def noiseless_fits(noiseless_scans, predicted_states):
    fits = {}
    for t, scan in noiseless_scans.items():
        state = predicted_states[t]
        fits[t] = fit_fringe_scan(scan, m=state.dimension_m,
                                  known_weights=state.weights())
    return fits


def detunings(state_like) -> np.ndarray:
    pairs = getattr(state_like, "pairs", state_like)
    return np.array([p.detuning_thz for p in pairs])
