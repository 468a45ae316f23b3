"""Exponential-decay fits shared by the spectral, vacuum and localization modules.

A profile ``v(r) ~ r**(-alpha) * exp(-rate * r)`` is fitted by unweighted least
squares of ``log|v| + alpha*log r`` against ``r``. Only distances inside the
exponential regime ``3/m <= r <= 0.4*N*a`` and above the noise floor are used.
"""
from dataclasses import dataclass

import numpy as np

from ..utils.exceptions import FitError
from ..utils.logger import get_logger
from .lattice import LatticeConfig

logger = get_logger(__name__)

NEAR_FIELD_COMPTON_LENGTHS = 3.0
WRAP_FRACTION = 0.4
NOISE_FLOOR = 1e-12
MIN_POINTS = 4


@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    n_points: int
    r_min: float
    r_max: float
    alpha: float = 0.0

    @property
    def length(self) -> float:
        return 1.0 / self.rate


def fit_window(config: LatticeConfig):
    """(r_min, r_max) of the exponential regime for this lattice."""
    return NEAR_FIELD_COMPTON_LENGTHS / config.mass, WRAP_FRACTION * config.length


def fit_exponential_decay(distances, values, *, r_min: float, r_max: float,
                          alpha: float = 0.0, quantity: str = "profile",
                          noise_floor: float = NOISE_FLOOR) -> DecayFit:
    r = np.asarray(distances, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if r.shape != v.shape:
        raise FitError(quantity, f"distances {r.shape} and values {v.shape} differ in shape")
    if v.size == 0 or not np.any(v > 0):
        raise FitError(quantity, "profile is identically zero")

    keep = (r >= r_min) & (r <= r_max) & (v > noise_floor * np.max(v)) & (r > 0)
    if np.count_nonzero(keep) < MIN_POINTS:
        logger.warning(
            f"Decay fit for {quantity}: only {np.count_nonzero(keep)} points in window [{r_min:g}, {r_max:g}]"
        )
        raise FitError(
            quantity,
            f"{np.count_nonzero(keep)} points in window [{r_min:g}, {r_max:g}], need {MIN_POINTS}",
        )

    rk = r[keep]
    y = np.log(v[keep]) + alpha * np.log(rk)
    slope, intercept = np.polyfit(rk, y, 1)
    fit = DecayFit(
        rate=float(-slope), intercept=float(intercept), n_points=int(rk.size),
        r_min=float(rk.min()), r_max=float(rk.max()), alpha=float(alpha),
    )
    if fit.rate <= 0:
        raise FitError(quantity, f"fitted slope {slope:g} does not decay")
    logger.debug(f"Decay fit for {quantity}: rate={fit.rate:.6g} over {fit.n_points} points")
    return fit


def fit_lattice_profile(config: LatticeConfig, values, *, alpha: float = 0.0,
                        quantity: str = "profile") -> DecayFit:
    """Fit a profile indexed by site distance from the origin (sites 0..N//2)."""
    half = config.n_sites // 2 + 1
    values = np.asarray(values)[:half]
    distances = config.spacing * np.arange(half)
    r_min, r_max = fit_window(config)
    return fit_exponential_decay(distances, values, r_min=r_min, r_max=r_max,
                                 alpha=alpha, quantity=quantity)
