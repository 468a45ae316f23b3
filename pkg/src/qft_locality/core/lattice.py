"""Discretized classical phase space of the free scalar field.

The spatial slice is a periodic 1-D lattice. A point of phase space is a pair
of Cauchy data (phi, pi); the symplectic form and the L2 inner product are
lattice sums weighted by the spacing so that continuum formulas carry over.

Convention: ``l2_inner`` is conjugate-linear in its FIRST argument.
"""
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Tuple

import numpy as np

from ..utils.exceptions import ConfigurationError, ValidationError
from ..utils.logger import get_logger

logger = get_logger(__name__)

CauchyKind = Literal["phi", "pi"]


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LatticeConfig:
    """Periodic lattice: site count, spacing and field mass (hbar = c = 1)."""

    n_sites: int
    spacing: float
    mass: float
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ConfigurationError("lattice.n_sites", f"must be an integer >= 2, got {self.n_sites}")
        if not self.spacing > 0:
            raise ConfigurationError("lattice.spacing", f"must be positive, got {self.spacing}")
        # m > 0 keeps H invertible
        if not self.mass > 0:
            raise ConfigurationError("lattice.mass", f"must be positive, got {self.mass}")
        if self.boundary != "periodic":
            raise ConfigurationError("lattice.boundary", "only periodic boundaries are supported")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def length(self) -> float:
        return self.n_sites * self.spacing

    @property
    def compton_length(self) -> float:
        return 1.0 / self.mass

    def site_distances(self, origin: int = 0) -> np.ndarray:
        """Cyclic distance (in length units) of every site from ``origin``."""
        offsets = np.abs(np.arange(self.n_sites) - origin) % self.n_sites
        return self.spacing * np.minimum(offsets, self.n_sites - offsets)


def check_same_config(a: LatticeConfig, b: LatticeConfig) -> LatticeConfig:
    if a != b:
        logger.warning(f"Mismatched lattice configurations: {a} vs {b}")
        raise ConfigurationError("lattice", f"mismatched configurations {a} and {b}")
    return a


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Cauchy data f = phi (+) pi on the lattice."""

    phi: np.ndarray
    pi: np.ndarray
    config: LatticeConfig

    def __post_init__(self):
        phi = _frozen_array(self.phi, float)
        pi = _frozen_array(self.pi, float)
        n = self.config.n_sites
        if phi.shape != (n,) or pi.shape != (n,):
            raise ValidationError(
                "PhaseVector", (phi.shape, pi.shape), f"phi and pi must both have shape ({n},)"
            )
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "pi", pi)

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        check_same_config(self.config, other.config)
        return PhaseVector(self.phi + other.phi, self.pi + other.pi, self.config)

    def __sub__(self, other: "PhaseVector") -> "PhaseVector":
        check_same_config(self.config, other.config)
        return PhaseVector(self.phi - other.phi, self.pi - other.pi, self.config)

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(-self.phi, -self.pi, self.config)

    def __mul__(self, scalar: float) -> "PhaseVector":
        return PhaseVector(scalar * self.phi, scalar * self.pi, self.config)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not (np.any(self.phi) or np.any(self.pi))

    def support(self) -> "Region":
        mask = (self.phi != 0) | (self.pi != 0)
        return Region(tuple(np.flatnonzero(mask)), self.config.n_sites)


@dataclass(frozen=True, eq=False)
class ComplexMode:
    """Complex lattice function: an element of the one-particle space."""

    values: np.ndarray
    config: LatticeConfig

    def __post_init__(self):
        values = _frozen_array(self.values, complex)
        if values.shape != (self.config.n_sites,):
            raise ValidationError(
                "ComplexMode", values.shape, f"values must have shape ({self.config.n_sites},)"
            )
        object.__setattr__(self, "values", values)

    def __add__(self, other: "ComplexMode") -> "ComplexMode":
        check_same_config(self.config, other.config)
        return ComplexMode(self.values + other.values, self.config)

    def __sub__(self, other: "ComplexMode") -> "ComplexMode":
        check_same_config(self.config, other.config)
        return ComplexMode(self.values - other.values, self.config)

    def __neg__(self) -> "ComplexMode":
        return ComplexMode(-self.values, self.config)

    def __mul__(self, scalar: complex) -> "ComplexMode":
        return ComplexMode(scalar * self.values, self.config)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Region:
    """Sorted, duplicate-free set of lattice sites."""

    sites: Tuple[int, ...]
    n_sites: int = field(compare=True)

    def __post_init__(self):
        raw = [int(s) for s in self.sites]
        if len(set(raw)) != len(raw):
            raise ValidationError("Region.sites", self.sites, "sites must be duplicate-free")
        bad = [s for s in raw if not 0 <= s < self.n_sites]
        if bad:
            raise ValidationError("Region.sites", bad, f"site indices must lie in [0, {self.n_sites})")
        object.__setattr__(self, "sites", tuple(sorted(raw)))

    @classmethod
    def interval(cls, n_sites: int, start: int, stop: int) -> "Region":
        """Contiguous sites start, start+1, ..., stop-1, wrapped periodically."""
        if stop < start:
            raise ValidationError("Region.interval", (start, stop), "stop must be >= start")
        if stop - start > n_sites:
            raise ValidationError("Region.interval", (start, stop), "interval longer than the lattice")
        return cls(tuple(s % n_sites for s in range(start, stop)), n_sites)

    @classmethod
    def full(cls, n_sites: int) -> "Region":
        return cls(tuple(range(n_sites)), n_sites)

    @classmethod
    def empty(cls, n_sites: int) -> "Region":
        return cls((), n_sites)

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sites)

    def __contains__(self, site: int) -> bool:
        return site in set(self.sites)

    def mask(self) -> np.ndarray:
        mask = np.zeros(self.n_sites, dtype=bool)
        mask[list(self.sites)] = True
        return mask

    def complement(self) -> "Region":
        return Region(tuple(np.flatnonzero(~self.mask())), self.n_sites)

    def _check_compatible(self, other: "Region"):
        if other.n_sites != self.n_sites:
            raise ValidationError("Region", other.n_sites, "regions live on lattices of different size")

    def union(self, other: "Region") -> "Region":
        self._check_compatible(other)
        return Region(tuple(np.flatnonzero(self.mask() | other.mask())), self.n_sites)

    def intersection(self, other: "Region") -> "Region":
        self._check_compatible(other)
        return Region(tuple(np.flatnonzero(self.mask() & other.mask())), self.n_sites)

    def is_disjoint(self, other: "Region") -> bool:
        self._check_compatible(other)
        return not np.any(self.mask() & other.mask())

    def issubset(self, other: "Region") -> bool:
        self._check_compatible(other)
        return not np.any(self.mask() & ~other.mask())

    def shifted(self, shift: int) -> "Region":
        return Region(tuple((s + shift) % self.n_sites for s in self.sites), self.n_sites)

    def widened(self, margin: int) -> "Region":
        """All sites within ``margin`` sites (cyclically) of the region."""
        if margin < 0:
            raise ValidationError("margin", margin, "must be non-negative")
        base = self.mask()
        mask = base.copy()
        for s in range(1, min(margin, self.n_sites) + 1):
            mask |= np.roll(base, s) | np.roll(base, -s)
        return Region(tuple(np.flatnonzero(mask)), self.n_sites)

    def is_empty(self) -> bool:
        return not self.sites

    def is_full(self) -> bool:
        return len(self.sites) == self.n_sites


def region_interval(config: LatticeConfig, start: int, stop: int) -> Region:
    return Region.interval(config.n_sites, start, stop)


def separation(g1: Region, g2: Region, config: LatticeConfig) -> float:
    """Spacing times the minimal cyclic site distance between two regions."""
    g1._check_compatible(g2)
    if g1.is_empty() or g2.is_empty():
        raise ValidationError("separation", (g1, g2), "regions must be nonempty")
    a = np.asarray(g1.sites)[:, None]
    b = np.asarray(g2.sites)[None, :]
    offsets = np.abs(a - b) % config.n_sites
    return config.spacing * float(np.min(np.minimum(offsets, config.n_sites - offsets)))


# =============== 相空间向量构造 ===============

def zero_phase_vector(config: LatticeConfig) -> PhaseVector:
    zeros = np.zeros(config.n_sites)
    return PhaseVector(zeros, zeros, config)


def delta_phase_vector(config: LatticeConfig, site: int, kind: CauchyKind = "phi",
                       amplitude: float = 1.0) -> PhaseVector:
    """Single-site Cauchy datum of phi type or pi type."""
    if not 0 <= site < config.n_sites:
        raise ValidationError("site", site, f"must lie in [0, {config.n_sites})")
    bump = np.zeros(config.n_sites)
    bump[site] = amplitude
    zeros = np.zeros(config.n_sites)
    if kind == "phi":
        return PhaseVector(bump, zeros, config)
    if kind == "pi":
        return PhaseVector(zeros, bump, config)
    raise ValidationError("kind", kind, "must be 'phi' or 'pi'")


def delta_mode(config: LatticeConfig, site: int) -> ComplexMode:
    """L2-normalized single-site mode."""
    if not 0 <= site < config.n_sites:
        raise ValidationError("site", site, f"must lie in [0, {config.n_sites})")
    values = np.zeros(config.n_sites, dtype=complex)
    values[site] = 1.0 / np.sqrt(config.spacing)
    return ComplexMode(values, config)


def random_phase_vector(config: LatticeConfig, rng: np.random.Generator,
                        region: "Region | None" = None) -> PhaseVector:
    phi = rng.standard_normal(config.n_sites)
    pi = rng.standard_normal(config.n_sites)
    f = PhaseVector(phi, pi, config)
    return restrict(f, region) if region is not None else f


# =============== 基本运算 ===============

def symplectic_form(f: PhaseVector, g: PhaseVector) -> float:
    """sigma(f, g) = spacing * sum(phi_f pi_g - pi_f phi_g)."""
    config = check_same_config(f.config, g.config)
    return config.spacing * float(np.dot(f.phi, g.pi) - np.dot(f.pi, g.phi))


def l2_inner(u: ComplexMode, v: ComplexMode) -> complex:
    """<u, v> = spacing * sum(conj(u) v); conjugate-linear in u."""
    config = check_same_config(u.config, v.config)
    return config.spacing * complex(np.vdot(u.values, v.values))


def l2_norm(u: ComplexMode) -> float:
    return float(np.sqrt(max(l2_inner(u, u).real, 0.0)))


def phase_l2_norm(f: PhaseVector) -> float:
    """Euclidean norm of (phi, pi) with the lattice weight."""
    return float(np.sqrt(f.config.spacing * (np.dot(f.phi, f.phi) + np.dot(f.pi, f.pi))))


def restrict(f: PhaseVector, region: Region) -> PhaseVector:
    if region.n_sites != f.config.n_sites:
        raise ValidationError("region", region.n_sites, "region and vector live on different lattices")
    mask = region.mask()
    return PhaseVector(np.where(mask, f.phi, 0.0), np.where(mask, f.pi, 0.0), f.config)


def restrict_mode(u: ComplexMode, region: Region) -> ComplexMode:
    if region.n_sites != u.config.n_sites:
        raise ValidationError("region", region.n_sites, "region and mode live on different lattices")
    return ComplexMode(np.where(region.mask(), u.values, 0.0), u.config)


def _outside_max(values: Iterable[np.ndarray], region: Region) -> float:
    outside = ~region.mask()
    if not np.any(outside):
        return 0.0
    return max(float(np.max(np.abs(v[outside]))) for v in values)


def is_supported_in(f: PhaseVector, region: Region, tol: float = 0.0) -> bool:
    """True iff |phi| and |pi| are at most ``tol`` outside the region."""
    if tol < 0:
        raise ValidationError("tol", tol, "must be non-negative")
    return _outside_max((f.phi, f.pi), region) <= tol


def mode_supported_in(u: ComplexMode, region: Region, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValidationError("tol", tol, "must be non-negative")
    return _outside_max((u.values,), region) <= tol


def translate(f: PhaseVector, shift: int) -> PhaseVector:
    """Cyclic lattice translation by ``shift`` sites."""
    return PhaseVector(np.roll(f.phi, shift), np.roll(f.pi, shift), f.config)


def translate_mode(u: ComplexMode, shift: int) -> ComplexMode:
    return ComplexMode(np.roll(u.values, shift), u.config)
