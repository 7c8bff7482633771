import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hombeat.units import (
    C_NM_PER_PS,
    FWHM_PER_SIGMA,
    frequency_to_wavelength,
    wavelength_to_frequency,
)


def test_conversion_anchor_810nm():
    assert wavelength_to_frequency(810.0) == pytest.approx(370.1141, abs=5e-4)


def test_half_wavelength_doubles_frequency():
    assert wavelength_to_frequency(405.0) == pytest.approx(
        2.0 * wavelength_to_frequency(810.0), rel=1e-15)


def test_fwhm_sigma_factor():
    assert FWHM_PER_SIGMA == pytest.approx(2.0 * np.sqrt(2.0 * np.log(2.0)),
                                           rel=1e-15)


def test_speed_of_light_value():
    assert C_NM_PER_PS == 299792.458


@settings(deadline=None, max_examples=50)
@given(st.floats(min_value=1e-3, max_value=1e9))
def test_round_trip_identity(lam):
    back = frequency_to_wavelength(wavelength_to_frequency(lam))
    assert back == pytest.approx(lam, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_wavelength_rejected(bad):
    with pytest.raises(ValueError):
        wavelength_to_frequency(bad)
    with pytest.raises(ValueError):
        frequency_to_wavelength(bad)
