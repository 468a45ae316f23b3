"""Spectral operators of the lattice Klein-Gordon field.

Every operator here is a function of the lattice Laplacian and therefore
diagonal in the discrete Fourier basis: H^p multiplies mode k by omega_k**p
with omega_k = sqrt(m^2 + (2/a^2)(1 - cos(2 pi k / N))).

Conventions
-----------
* ``(f, g)_J = sigma(f, J g) + i sigma(f, g)`` is conjugate-linear in ``f``;
  multiplication by i acts on phase space as J.
* ``K f = (H^{1/2} phi + i H^{-1/2} pi) / sqrt(2)`` satisfies
  ``2 Im<Kf, Kg> = sigma(f, g)`` and ``<Kf, Kg> = (f, g)_J / 2``.
* ``one_particle_vector(f) = sqrt(2) K f`` is the vector whose L2 products
  reproduce ``(f, g)_J`` exactly. It is the only place the factor sqrt(2)
  enters, and all Fock-space embeddings go through it.
* The classical flow D_t intertwines with ``exp(-iHt)``: ``K D_t = U_t K``.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import linalg

from ..infrastructure.cache import propagator_cache
from ..utils.exceptions import SizeLimitError, ValidationError
from ..utils.logger import get_logger
from .decay_fit import DecayFit, fit_lattice_profile
from .lattice import (
    ComplexMode,
    LatticeConfig,
    PhaseVector,
    Region,
    check_same_config,
    is_supported_in,
    symplectic_form,
)

logger = get_logger(__name__)

DENSE_ORACLE_LIMIT = 512
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DispersionTable:
    omega: np.ndarray
    config: LatticeConfig

    def multiplier(self, p: float) -> np.ndarray:
        """omega_k**p, memoized per (config, p)."""
        return spectral_multiplier(self.config, p)


def _cache_key(config: LatticeConfig, tag) -> tuple:
    return (config.n_sites, config.spacing, config.mass, tag)


def _omega(config: LatticeConfig) -> np.ndarray:
    k = np.arange(config.n_sites)
    lap = (2.0 / config.spacing ** 2) * (1.0 - np.cos(2.0 * np.pi * k / config.n_sites))
    omega = np.sqrt(config.mass ** 2 + lap)
    omega[0] = config.mass
    return omega


def dispersion(config: LatticeConfig) -> DispersionTable:
    omega = propagator_cache.get_or_compute(_cache_key(config, "omega"), lambda: _omega(config))
    return DispersionTable(omega, config)


def spectral_multiplier(config: LatticeConfig, p: float) -> np.ndarray:
    p = float(p)
    return propagator_cache.get_or_compute(
        _cache_key(config, ("power", p)),
        lambda: np.power(dispersion(config).omega, p),
    )


def _apply_multiplier(values: np.ndarray, multiplier: np.ndarray, real: bool) -> np.ndarray:
    out = np.fft.ifft(multiplier * np.fft.fft(values))
    # 实输入: 乘子关于 k -> N-k 对称，虚部只剩舍入噪声
    return out.real if real else out


ArrayOrMode = Union[np.ndarray, ComplexMode]


def apply_h_power(v: ArrayOrMode, p: float, config: LatticeConfig = None) -> ArrayOrMode:
    """Apply H^p. Accepts a ComplexMode or a bare array (then ``config`` is required)."""
    if isinstance(v, ComplexMode):
        if config is not None:
            check_same_config(config, v.config)
        return ComplexMode(apply_h_power(v.values, p, v.config), v.config)
    if config is None:
        raise ValidationError("config", None, "a LatticeConfig is required for bare arrays")
    values = np.asarray(v)
    if values.shape != (config.n_sites,):
        raise ValidationError("v", values.shape, f"must have shape ({config.n_sites},)")
    real = not np.iscomplexobj(values)
    if p == 0:
        return values.astype(float if real else complex, copy=True)
    return _apply_multiplier(values, spectral_multiplier(config, p), real)


def complex_structure_j(f: PhaseVector) -> PhaseVector:
    """J(phi, pi) = (-H^{-1} pi, H phi)."""
    c = f.config
    return PhaseVector(-apply_h_power(f.pi, -1, c), apply_h_power(f.phi, 1, c), c)


def inner_product_j(f: PhaseVector, g: PhaseVector) -> complex:
    check_same_config(f.config, g.config)
    return complex(symplectic_form(f, complex_structure_j(g)), symplectic_form(f, g))


def nw_map_k(f: PhaseVector) -> ComplexMode:
    c = f.config
    values = (apply_h_power(f.phi, 0.5, c) + 1j * apply_h_power(f.pi, -0.5, c)) / SQRT2
    return ComplexMode(values, c)


def nw_map_k_inverse(u: ComplexMode) -> PhaseVector:
    """K^{-1}(u) = (sqrt(2) H^{-1/2} Re u, sqrt(2) H^{1/2} Im u)."""
    c = u.config
    phi = SQRT2 * apply_h_power(np.ascontiguousarray(u.values.real), -0.5, c)
    pi = SQRT2 * apply_h_power(np.ascontiguousarray(u.values.imag), 0.5, c)
    return PhaseVector(phi, pi, c)


def one_particle_vector(f: PhaseVector) -> ComplexMode:
    """sqrt(2) K f, normalized so that <u_f, u_g> = (f, g)_J."""
    return SQRT2 * nw_map_k(f)


def phase_vector_from_one_particle(u: ComplexMode) -> PhaseVector:
    """Inverse of :func:`one_particle_vector`."""
    return nw_map_k_inverse(u * (1.0 / SQRT2))


def time_evolve(f: PhaseVector, t: float) -> PhaseVector:
    """Classical Klein-Gordon flow D_t on Cauchy data."""
    if t == 0:
        return PhaseVector(f.phi, f.pi, f.config)
    omega = dispersion(f.config).omega
    cos_t = np.cos(omega * t)
    sin_t = np.sin(omega * t)
    phi_k = np.fft.fft(f.phi)
    pi_k = np.fft.fft(f.pi)
    phi = np.fft.ifft(cos_t * phi_k + (sin_t / omega) * pi_k).real
    pi = np.fft.ifft(-omega * sin_t * phi_k + cos_t * pi_k).real
    return PhaseVector(phi, pi, f.config)


def evolve_mode(u: ComplexMode, t: float) -> ComplexMode:
    """U_t u = exp(-iHt) u."""
    if t == 0:
        return ComplexMode(u.values, u.config)
    omega = dispersion(u.config).omega
    return ComplexMode(_apply_multiplier(u.values, np.exp(-1j * omega * t), real=False), u.config)


def antilocality_tail(g: np.ndarray, region: Region, config: LatticeConfig) -> float:
    """L2 norm of H g outside ``region`` for g supported in ``region``."""
    g = np.asarray(g, dtype=float)
    f = PhaseVector(g, np.zeros_like(g), config)
    if not is_supported_in(f, region, 0.0):
        logger.warning("antilocality_tail called with g not supported in the region")
        raise ValidationError("g", region.sites, "g must vanish outside the region")
    hg = apply_h_power(g, 1, config)
    outside = ~region.mask()
    return float(np.sqrt(config.spacing * np.sum(hg[outside] ** 2)))


def laplacian_matrix(config: LatticeConfig) -> np.ndarray:
    """Dense circulant -Delta + m^2 (nearest-neighbour stencil)."""
    n, a = config.n_sites, config.spacing
    matrix = np.zeros((n, n))
    idx = np.arange(n)
    np.add.at(matrix, (idx, idx), 2.0 / a ** 2 + config.mass ** 2)
    np.add.at(matrix, (idx, (idx + 1) % n), -1.0 / a ** 2)
    np.add.at(matrix, (idx, (idx - 1) % n), -1.0 / a ** 2)
    return matrix


def dense_oracle(config: LatticeConfig, p: float) -> np.ndarray:
    """Dense H^p from the symmetric eigendecomposition of -Delta + m^2."""
    if config.n_sites > DENSE_ORACLE_LIMIT:
        raise SizeLimitError("dense oracle", config.n_sites, DENSE_ORACLE_LIMIT)
    if p == 0:
        return np.eye(config.n_sites)
    evals, evecs = linalg.eigh(laplacian_matrix(config))
    logger.debug(f"Dense oracle p={p} for n_sites={config.n_sites}")
    return (evecs * np.power(evals, p / 2.0)) @ evecs.T


def kernel_row(config: LatticeConfig, p: float) -> np.ndarray:
    """H^p applied to the lattice delta function (1/a at site 0)."""
    delta = np.zeros(config.n_sites)
    delta[0] = 1.0 / config.spacing
    return apply_h_power(delta, p, config)


def kernel_decay_exponent(p: float) -> float:
    """Power-law prefactor r**-alpha of the H^p kernel tail."""
    return (p + 2.0) / 2.0


def lattice_decay_rate(config: LatticeConfig) -> float:
    """Exact asymptotic decay rate (2/a) asinh(m a / 2) of lattice kernels."""
    return float(2.0 / config.spacing * np.arcsinh(config.mass * config.spacing / 2.0))


def decay_fit(config: LatticeConfig, p: float = 1.0) -> DecayFit:
    return fit_lattice_profile(config, kernel_row(config, p), alpha=kernel_decay_exponent(p),
                               quantity=f"H^{p:g} kernel")


def decay_rate(config: LatticeConfig, p: float = 1.0) -> float:
    return decay_fit(config, p).rate
