"""Truncated bosonic Fock space over a few one-particle modes.

Basis states |n_0, ..., n_{M-1}> with 0 <= n_j <= cutoff are ordered as a
Kronecker product with mode 0 most significant, so the flat index is
sum_j n_j (cutoff+1)**(M-1-j). The vacuum is index 0.

Creation operators are linear and annihilation operators conjugate-linear in
the coefficient vector c: a*(c) = sum c_j a*_j, a(c) = sum conj(c_j) a_j.
"""
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..infrastructure.config import ConfigManager
from ..utils.exceptions import SizeLimitError, ValidationError
from ..utils.logger import get_logger
from .lattice import ComplexMode, l2_inner

logger = get_logger(__name__)

MAX_MODES = 6
MAX_CUTOFF = 8
ORTHONORMAL_TOL = 1e-10
DEFAULT_WORD_LENGTH = 3


@dataclass(frozen=True, eq=False)
class FockSpace:
    n_modes: int
    cutoff: int
    mode_basis: Tuple[ComplexMode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "mode_basis", tuple(self.mode_basis))
        if not 1 <= self.n_modes <= MAX_MODES:
            raise ValidationError("n_modes", self.n_modes, f"must lie in [1, {MAX_MODES}]")
        if not 1 <= self.cutoff <= MAX_CUTOFF:
            raise ValidationError("cutoff", self.cutoff, f"must lie in [1, {MAX_CUTOFF}]")
        limit = int(ConfigManager.get_instance().get("MAX_FOCK_DIM", 4096))
        if self.dim > limit:
            raise SizeLimitError("Fock space", self.dim, limit)
        if self.mode_basis:
            if len(self.mode_basis) != self.n_modes:
                raise ValidationError("mode_basis", len(self.mode_basis),
                                      f"expected {self.n_modes} modes")
            gram = np.array([[l2_inner(u, v) for v in self.mode_basis] for u in self.mode_basis])
            err = float(np.max(np.abs(gram - np.eye(self.n_modes))))
            if err > ORTHONORMAL_TOL:
                raise ValidationError("mode_basis", err, "modes must be L2-orthonormal")

    @classmethod
    def from_modes(cls, modes: Sequence[ComplexMode], cutoff: int) -> "FockSpace":
        modes = tuple(modes)
        return cls(len(modes), cutoff, modes)

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.n_modes

    @property
    def local_dim(self) -> int:
        return self.cutoff + 1

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n_modes) table of occupation numbers per basis state."""
        grids = np.unravel_index(np.arange(self.dim), (self.local_dim,) * self.n_modes)
        return np.stack(grids, axis=1)

    @cached_property
    def _annihilators(self) -> List[np.ndarray]:
        single = np.diag(np.sqrt(np.arange(1, self.local_dim, dtype=float)), k=1)
        eye = np.eye(self.local_dim)
        ops = []
        for j in range(self.n_modes):
            factors = [single if i == j else eye for i in range(self.n_modes)]
            ops.append(reduce(np.kron, factors).astype(complex))
        logger.debug(f"Built ladder operators for {self.n_modes} modes, cutoff {self.cutoff}")
        return ops

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise ValidationError("mode", mode, f"must lie in [0, {self.n_modes})")
        return int(mode)

    def check_coefficients(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.n_modes,):
            raise ValidationError("c", c.shape, f"expected {self.n_modes} coefficients")
        return c


@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray
    space: FockSpace

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex, copy=True)
        if amps.shape != (self.space.dim,):
            raise ValidationError("amplitudes", amps.shape, f"expected length {self.space.dim}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes", None, "must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockVector":
        return FockVector(self.amplitudes / self.norm(), self.space)

    def inner(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray
    space: FockSpace
    label: str = ""

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex, copy=True)
        dim = self.space.dim
        if matrix.shape != (dim, dim):
            raise ValidationError("matrix", matrix.shape, f"expected ({dim}, {dim})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix, self.space, f"{self.label}·{other.label}")
        if isinstance(other, FockVector):
            return FockVector(self.matrix @ other.amplitudes, self.space)
        return NotImplemented

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix + other.matrix, self.space, f"{self.label}+{other.label}")

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix - other.matrix, self.space, f"{self.label}-{other.label}")

    def __mul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(scalar * self.matrix, self.space, self.label)

    __rmul__ = __mul__

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.space, f"({self.label})*")

    def commutator(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix @ other.matrix - other.matrix @ self.matrix, self.space,
                            f"[{self.label},{other.label}]")

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, ord=2))

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=atol))


# =============== 基本算符 ===============

def vacuum(space: FockSpace) -> FockVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(amps, space)


def basis_vector(space: FockSpace, occupations: Sequence[int]) -> FockVector:
    occ = tuple(int(n) for n in occupations)
    if len(occ) != space.n_modes or any(not 0 <= n <= space.cutoff for n in occ):
        raise ValidationError("occupations", occ, "one occupation in [0, cutoff] per mode")
    amps = np.zeros(space.dim, dtype=complex)
    amps[np.ravel_multi_index(occ, (space.local_dim,) * space.n_modes)] = 1.0
    return FockVector(amps, space)


def identity_op(space: FockSpace) -> FockOperator:
    return FockOperator(np.eye(space.dim), space, "I")


def annihilation_op(space: FockSpace, mode: int) -> FockOperator:
    mode = space.check_mode(mode)
    return FockOperator(space._annihilators[mode], space, f"a({mode})")


def creation_op(space: FockSpace, mode: int) -> FockOperator:
    mode = space.check_mode(mode)
    return FockOperator(space._annihilators[mode].conj().T, space, f"a*({mode})")


def _smeared_annihilator(space: FockSpace, c: np.ndarray) -> np.ndarray:
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for cj, aj in zip(c, space._annihilators):
        if cj != 0:
            out += np.conj(cj) * aj
    return out


def smeared_annihilation_op(space: FockSpace, c) -> FockOperator:
    """a(c) = sum_j conj(c_j) a_j, antilinear in c."""
    return FockOperator(_smeared_annihilator(space, space.check_coefficients(c)), space, "a(c)")


def smeared_creation_op(space: FockSpace, c) -> FockOperator:
    a_c = _smeared_annihilator(space, space.check_coefficients(c))
    return FockOperator(a_c.conj().T, space, "a*(c)")


def mode_coefficients(space: FockSpace, u: ComplexMode) -> np.ndarray:
    """Coordinates <e_j, u> of u along the Fock space's mode basis."""
    if not space.mode_basis:
        raise ValidationError("space", space.n_modes, "Fock space has no mode basis")
    return np.array([l2_inner(e, u) for e in space.mode_basis], dtype=complex)


def field_op(space: FockSpace, c) -> FockOperator:
    """Phi(c) = (a*(c) + a(c)) / sqrt(2)."""
    c = space.check_coefficients(c)
    a_c = _smeared_annihilator(space, c)
    return FockOperator((a_c.conj().T + a_c) / np.sqrt(2.0), space, "Phi")


def weyl_op(space: FockSpace, c, label: str = "W") -> FockOperator:
    """W(c) = exp(i Phi(c)) via the Hermitian eigendecomposition of Phi(c)."""
    c = space.check_coefficients(c)
    if not np.any(c):
        return FockOperator(np.eye(space.dim), space, label)
    evals, evecs = linalg.eigh(field_op(space, c).matrix)
    return FockOperator((evecs * np.exp(1j * evals)) @ evecs.conj().T, space, label)


def number_op(space: FockSpace, c) -> FockOperator:
    """N(c) = a*(c) a(c)."""
    c = space.check_coefficients(c)
    a_c = _smeared_annihilator(space, c)
    return FockOperator(a_c.conj().T @ a_c, space, "N")


def edge_mask(space: FockSpace, margin: int = 1) -> np.ndarray:
    """Basis states at least ``margin`` quanta below the cutoff in every mode."""
    return np.all(space.occupations <= space.cutoff - margin, axis=1)


def weyl_product_defect(space: FockSpace, c, d) -> float:
    """||(W(c)W(d) - exp(-i Im<c,d>/2) W(c+d)) Omega||."""
    c = space.check_coefficients(c)
    d = space.check_coefficients(d)
    phase = np.exp(-0.5j * np.vdot(c, d).imag)
    omega = vacuum(space).amplitudes
    lhs = weyl_op(space, c).matrix @ (weyl_op(space, d).matrix @ omega)
    rhs = phase * (weyl_op(space, c + d).matrix @ omega)
    return float(np.linalg.norm(lhs - rhs))


def weyl_vacuum_error(space: FockSpace, c) -> float:
    """|<Omega, W(c) Omega> - exp(-|c|^2/4)|."""
    c = space.check_coefficients(c)
    value = weyl_op(space, c).matrix[0, 0]
    return float(abs(value - np.exp(-np.vdot(c, c).real / 4.0)))


# =============== 循环性 / 分离性探针 ===============

def word_orbit(generators: Sequence[FockOperator], vector: np.ndarray,
               max_word_length: int = DEFAULT_WORD_LENGTH) -> np.ndarray:
    """Columns {A v}: the identity and all generator words up to the given length."""
    columns = [vector]
    frontier = [vector]
    for _ in range(max_word_length):
        frontier = [g.matrix @ w for w in frontier for g in generators]
        columns.extend(frontier)
    return np.stack(columns, axis=1)


def _check_same_space(space: FockSpace, generators: Sequence[FockOperator], vector: FockVector):
    for g in generators:
        if g.space is not space:
            raise ValidationError("generators", g.label, "generator acts on a different Fock space")
    if vector.space is not space:
        raise ValidationError("vector", vector.space.dim, "vector lives in a different Fock space")


def cyclicity_rank(space: FockSpace, generators: Sequence[FockOperator], tol: float = 1e-8,
                   vector: Optional[FockVector] = None,
                   max_word_length: int = DEFAULT_WORD_LENGTH) -> int:
    """Numerical rank of the span of {A v} over generator words (v defaults to Omega)."""
    if tol <= 0:
        raise ValidationError("tol", tol, "must be positive")
    vector = vector if vector is not None else vacuum(space)
    _check_same_space(space, generators, vector)
    v = vector.amplitudes
    orbit = word_orbit(generators, v, max_word_length)
    svals = linalg.svdvals(orbit)
    if svals.size == 0 or svals[0] == 0:
        return 0
    rank = int(np.count_nonzero(svals > tol * svals[0]))
    logger.debug(f"Cyclicity rank {rank}/{space.dim} from {orbit.shape[1]} words")
    return rank


class SeparatingWitness(NamedTuple):
    defect: float
    witness: str


def separating_defect(space: FockSpace, generators: Sequence[FockOperator], vector: FockVector,
                      samples: int, seed: int = 0) -> SeparatingWitness:
    """min ||A v|| / ||A|| over sampled algebra elements A and the minimizing word.

    The sample starts with every generator, then random words of length up to
    three and random complex combinations of two such words.
    """
    if samples <= 0:
        raise ValidationError("samples", samples, "must be positive")
    if not generators:
        raise ValidationError("generators", generators, "at least one generator is required")
    _check_same_space(space, generators, vector)
    rng = np.random.default_rng(seed)
    v = vector.amplitudes

    def random_word() -> FockOperator:
        length = int(rng.integers(1, DEFAULT_WORD_LENGTH + 1))
        picks = rng.integers(0, len(generators), size=length)
        return reduce(lambda x, y: x @ y, (generators[i] for i in picks))

    candidates: List[FockOperator] = list(generators)[:samples]
    while len(candidates) < samples:
        if rng.random() < 0.5:
            candidates.append(random_word())
        else:
            alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            a, b = random_word(), random_word()
            combo = FockOperator(alpha * a.matrix + beta * b.matrix, space, f"({a.label})+({b.label})")
            candidates.append(combo)

    best = SeparatingWitness(np.inf, "")
    for op in candidates:
        op_norm = op.norm()
        if op_norm < 1e-14:
            continue
        ratio = float(np.linalg.norm(op.matrix @ v) / op_norm)
        if ratio < best.defect:
            best = SeparatingWitness(ratio, op.label)
    logger.debug(f"Separating defect {best.defect:.3g} (witness {best.witness})")
    return best
