import numpy as np
import pytest

from qft_locality.core.decay_fit import fit_exponential_decay, fit_lattice_profile, fit_window
from qft_locality.core.lattice import LatticeConfig
from qft_locality.utils.exceptions import FitError


def test_recovers_pure_exponential():
    r = np.linspace(0.5, 10.0, 40)
    fit = fit_exponential_decay(r, 3.0 * np.exp(-1.7 * r), r_min=1.0, r_max=9.0)
    assert fit.rate == pytest.approx(1.7, rel=1e-10)
    assert fit.length == pytest.approx(1 / 1.7)
    assert fit.r_min >= 1.0 and fit.r_max <= 9.0


def test_power_law_prefactor_is_removed():
    r = np.linspace(1.0, 20.0, 100)
    values = r ** -1.5 * np.exp(-0.8 * r)
    fit = fit_exponential_decay(r, values, r_min=2.0, r_max=18.0, alpha=1.5)
    assert fit.rate == pytest.approx(0.8, rel=1e-10)
    assert fit.alpha == 1.5


def test_sign_is_ignored():
    r = np.linspace(1.0, 5.0, 20)
    fit = fit_exponential_decay(r, -np.exp(-2.0 * r), r_min=1.0, r_max=5.0)
    assert fit.rate == pytest.approx(2.0)


def test_noise_floor_drops_tiny_values():
    r = np.arange(1.0, 30.0)
    values = np.exp(-2.0 * r)
    values[r > 10] = 1e-300
    fit = fit_exponential_decay(r, values, r_min=1.0, r_max=29.0)
    assert fit.r_max <= 10.0
    assert fit.rate == pytest.approx(2.0)


def test_too_few_points():
    r = np.linspace(0.0, 10.0, 11)
    with pytest.raises(FitError):
        fit_exponential_decay(r, np.exp(-r), r_min=8.5, r_max=10.0)


def test_zero_profile():
    with pytest.raises(FitError):
        fit_exponential_decay(np.arange(10.0), np.zeros(10), r_min=0.0, r_max=10.0)


def test_growing_profile_is_rejected():
    r = np.linspace(1.0, 5.0, 20)
    with pytest.raises(FitError):
        fit_exponential_decay(r, np.exp(r), r_min=1.0, r_max=5.0)


def test_fit_window_and_lattice_profile():
    config = LatticeConfig(256, 0.1, 1.0)
    r_min, r_max = fit_window(config)
    assert r_min == pytest.approx(3.0)
    assert r_max == pytest.approx(0.4 * 25.6)
    values = np.exp(-1.25 * config.site_distances(0))
    fit = fit_lattice_profile(config, values)
    assert fit.rate == pytest.approx(1.25)
