"""Closed-form Gaussian vacuum of the free field.

Weyl convention (the one the truncated Fock matrices satisfy):

    W(f) W(g) = exp(-i sigma(f, g) / 2) W(f + g)
    <W(f)>    = exp(-(f, f)_J / 4)

so that ``<W(f) W(g)> = <W(f)> <W(g)> exp(-i sigma(f,g)/2 - Re(f,g)_J / 2)``.
Both schemes evaluate the same state; the Newton-Wigner path goes through
the one-particle vectors sqrt(2) K f, the Standard path through (.,.)_J.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..utils.exceptions import ConfigurationError, FitError, ValidationError
from ..utils.logger import get_logger
from .decay_fit import DecayFit, fit_exponential_decay, fit_lattice_profile, fit_window
from .lattice import (
    LatticeConfig,
    PhaseVector,
    check_same_config,
    delta_phase_vector,
    l2_inner,
    symplectic_form,
)
from .spectral import inner_product_j, kernel_decay_exponent, kernel_row, one_particle_vector

logger = get_logger(__name__)

# 支撑判定的相对容差（NW 方案中 Kf 的数值支撑）
NW_SUPPORT_RTOL = 1e-9
MIN_CORRELATION_WINDOW = 20.0


class SchemeKind(str, Enum):
    STANDARD = "standard"
    NEWTON_WIGNER = "newton-wigner"

    @classmethod
    def parse(cls, value) -> "SchemeKind":
        if isinstance(value, cls):
            return value
        normalized = str(value).lower().strip().replace("_", "-")
        if normalized in ("nw", "newton-wigner", "newtonwigner"):
            return cls.NEWTON_WIGNER
        if normalized in ("standard", "classical"):
            return cls.STANDARD
        raise ValidationError("scheme", value, "must be 'standard' or 'newton-wigner'")


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    entries: np.ndarray
    probes: Tuple[PhaseVector, ...]
    scheme: SchemeKind

    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(self.entries)[0])

    def is_positive_semidefinite(self, tol: float = 1e-10) -> bool:
        return self.min_eigenvalue() >= -tol


def _pair_terms(f: PhaseVector, g: PhaseVector, scheme: SchemeKind):
    """(f,f)_J, (g,g)_J, Re(f,g)_J, sigma(f,g) evaluated along the scheme's path."""
    check_same_config(f.config, g.config)
    if scheme is SchemeKind.NEWTON_WIGNER:
        u, v = one_particle_vector(f), one_particle_vector(g)
        uv = l2_inner(u, v)
        return l2_inner(u, u).real, l2_inner(v, v).real, uv.real, uv.imag
    fg = inner_product_j(f, g)
    return inner_product_j(f, f).real, inner_product_j(g, g).real, fg.real, symplectic_form(f, g)


def weyl_vacuum_expectation(f: PhaseVector, scheme=SchemeKind.STANDARD) -> float:
    scheme = SchemeKind.parse(scheme)
    if f.is_zero():
        return 1.0
    if scheme is SchemeKind.NEWTON_WIGNER:
        u = one_particle_vector(f)
        norm2 = l2_inner(u, u).real
    else:
        norm2 = inner_product_j(f, f).real
    return float(np.exp(-norm2 / 4.0))


def two_point_weyl(f: PhaseVector, g: PhaseVector, scheme=SchemeKind.STANDARD) -> complex:
    """<Omega, W(f) W(g) Omega>."""
    scheme = SchemeKind.parse(scheme)
    ff, gg, re_fg, sigma = _pair_terms(f, g, scheme)
    product = np.exp(-(ff + gg) / 4.0)
    return complex(product * np.exp(-0.5j * sigma - re_fg / 2.0))


def _numerical_support(values: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(values)) if values.size else 0.0
    return np.abs(values) > NW_SUPPORT_RTOL * scale


def supports_overlap(f: PhaseVector, g: PhaseVector, scheme: SchemeKind) -> bool:
    if scheme is SchemeKind.NEWTON_WIGNER:
        su = _numerical_support(one_particle_vector(f).values)
        sv = _numerical_support(one_particle_vector(g).values)
        return bool(np.any(su & sv))
    return not f.support().is_disjoint(g.support())


def factorization_defect(f: PhaseVector, g: PhaseVector, scheme=SchemeKind.STANDARD) -> float:
    """|<W(f)W(g)> - <W(f)><W(g)>| for f, g localized in disjoint regions."""
    scheme = SchemeKind.parse(scheme)
    if supports_overlap(f, g, scheme):
        logger.warning(f"factorization_defect: overlapping supports under {scheme.value}")
        raise ValidationError("f, g", scheme.value, "supports must be disjoint")
    ff, gg, re_fg, sigma = _pair_terms(f, g, scheme)
    product = np.exp(-(ff + gg) / 4.0)
    # expm1 避免小交叉项时的相消误差
    return float(product * abs(np.expm1(complex(-re_fg / 2.0, -sigma / 2.0))))


def vacuum_covariance(probes: Sequence[PhaseVector], scheme=SchemeKind.STANDARD) -> CovarianceMatrix:
    scheme = SchemeKind.parse(scheme)
    probes = tuple(probes)
    if not probes:
        raise ValidationError("probes", probes, "at least one probe is required")
    n = len(probes)
    entries = np.zeros((n, n))
    if scheme is SchemeKind.NEWTON_WIGNER:
        modes = [one_particle_vector(f) * (1.0 / np.sqrt(2.0)) for f in probes]
        for i in range(n):
            for j in range(i, n):
                entries[i, j] = l2_inner(modes[i], modes[j]).real
    else:
        for i in range(n):
            for j in range(i, n):
                entries[i, j] = inner_product_j(probes[i], probes[j]).real
    entries = np.triu(entries) + np.triu(entries, 1).T
    return CovarianceMatrix(entries, probes, scheme)


def symplectic_eigenvalues(probes: Sequence[PhaseVector]) -> np.ndarray:
    """Williamson eigenvalues of Re(.,.)_J relative to sigma on the probe span."""
    probes = tuple(probes)
    n = len(probes)
    if n == 0 or n % 2:
        raise ValidationError("probes", n, "an even, nonzero number of probes is required")
    gamma = vacuum_covariance(probes, SchemeKind.STANDARD).entries
    omega = np.array([[symplectic_form(f, g) for g in probes] for f in probes])
    if np.linalg.cond(omega) > 1e12:
        raise ValidationError("probes", n, "probe span is not a symplectic subspace")
    eigs = np.sort(np.abs(linalg.eigvals(linalg.solve(omega, gamma))))
    # 本征值成对出现 (+i nu, -i nu)
    return eigs[::2]


def reduced_purity(probes: Sequence[PhaseVector]) -> float:
    """Purity of the vacuum restricted to the Weyl algebra of the probes' real span."""
    nu = symplectic_eigenvalues(probes)
    return float(np.prod(1.0 / nu))


def correlation_fit(config: LatticeConfig) -> DecayFit:
    if config.n_sites * config.spacing * config.mass < MIN_CORRELATION_WINDOW:
        logger.warning(f"Correlation window too small for {config}")
        raise ConfigurationError(
            "lattice", f"n_sites*spacing*mass must be >= {MIN_CORRELATION_WINDOW:g} for a correlation fit"
        )
    # <phi(x) phi(0)> = H^{-1}(x, 0) / 2
    row = 0.5 * kernel_row(config, -1)
    return fit_lattice_profile(config, row, alpha=kernel_decay_exponent(-1),
                               quantity="vacuum correlation")


def correlation_length(config: LatticeConfig) -> float:
    return correlation_fit(config).length


@dataclass(frozen=True)
class DefectProfile:
    separations: Tuple[int, ...]
    distances: Tuple[float, ...]
    defects: Tuple[float, ...]
    fit: Optional[DecayFit]


def factorization_defect_profile(config: LatticeConfig,
                                 separations: Optional[Sequence[int]] = None) -> DefectProfile:
    """Standard-scheme defect of phi-type site bumps at site 0 and site d versus d."""
    if separations is None:
        separations = range(1, config.n_sites // 2 + 1)
    separations = tuple(int(d) for d in separations)
    if any(not 0 < d < config.n_sites for d in separations):
        raise ValidationError("separations", separations, f"must lie in (0, {config.n_sites})")
    f = delta_phase_vector(config, 0, "phi")
    defects = tuple(
        factorization_defect(f, delta_phase_vector(config, d, "phi"), SchemeKind.STANDARD) for d in separations
    )
    distances = tuple(config.spacing * min(d, config.n_sites - d) for d in separations)
    r_min, r_max = fit_window(config)
    try:
        fit = fit_exponential_decay(distances, defects, r_min=r_min, r_max=r_max,
                                    alpha=kernel_decay_exponent(1), quantity="factorization defect")
    except FitError as e:
        logger.debug(f"No decay fit for the factorization defect profile: {e}")
        fit = None
    return DefectProfile(separations, distances, defects, fit)
