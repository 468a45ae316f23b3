"""Standard and Newton-Wigner localization schemes.

A scheme assigns to a region G a local one-particle subspace and, through
the truncated Fock space, local Weyl generators:

* Standard: Cauchy data (phi, pi) supported in G, carried into the common
  one-particle space by ``one_particle_vector``. The images overflow G.
* Newton-Wigner: L2 modes that vanish outside G (normalized site deltas).

The checkers here evaluate isotony, translation covariance, equal-time and
spacelike microcausality, availability of a local number operator, and the
resulting fundamentality verdict for each scheme.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..utils.exceptions import ValidationError
from ..utils.logger import get_logger
from .decay_fit import DecayFit, fit_exponential_decay, fit_window
from .fock import (
    FockOperator,
    FockSpace,
    annihilation_op,
    creation_op,
    cyclicity_rank,
    mode_coefficients,
    separating_defect,
    vacuum,
    weyl_op,
)
from .lattice import (
    ComplexMode,
    LatticeConfig,
    PhaseVector,
    Region,
    delta_mode,
    delta_phase_vector,
    l2_inner,
    l2_norm,
    mode_supported_in,
    restrict_mode,
    separation,
    symplectic_form,
    translate_mode,
)
from .spectral import evolve_mode, nw_map_k_inverse, one_particle_vector, time_evolve
from .vacuum import SchemeKind

logger = get_logger(__name__)

DROP_RTOL = 1e-12
SPAN_TOL = 1e-10
WEAK_TOL = 1e-12
MICROCAUSALITY_TOL = 1e-6
NUMBER_OPERATOR_TOL = 1e-10
SUPPORT_RTOL = 1e-12
DEFAULT_MAGNITUDES = (0.25, 0.5, 1.0)

REASON_ISOTONY = "isotony violated"
REASON_COVARIANCE = "translation covariance violated"
REASON_WEAK = "weak microcausality defect"
REASON_STRONG = "strong microcausality defect"
REASON_NUMBER_OPERATOR = "no local number operator"


class CheckResult(NamedTuple):
    ok: bool
    residual: float


def gram_schmidt(vectors: Sequence[np.ndarray], spacing: float,
                 drop_rtol: float = DROP_RTOL) -> List[np.ndarray]:
    """Pivoted Gram-Schmidt in the weighted L2 product.

    At each step the remaining vector with the largest residual norm is taken;
    residuals below ``drop_rtol`` times the largest input norm are dropped.
    """
    work = [np.array(v, dtype=complex) for v in vectors]
    if not work:
        return []
    scale = max(np.sqrt(spacing) * np.linalg.norm(v) for v in work)
    basis: List[np.ndarray] = []
    while work:
        norms = [np.sqrt(spacing) * np.linalg.norm(v) for v in work]
        pivot = int(np.argmax(norms))
        if norms[pivot] <= drop_rtol * scale:
            break
        e = work.pop(pivot) / norms[pivot]
        basis.append(e)
        work = [v - spacing * np.vdot(e, v) * e for v in work]
    return basis


@dataclass(frozen=True, eq=False)
class LocalSubspace:
    scheme: SchemeKind
    region: Region
    basis: Tuple[ComplexMode, ...]
    raw_phase_basis: Tuple[PhaseVector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coefficients(self, u: ComplexMode) -> np.ndarray:
        return np.array([l2_inner(e, u) for e in self.basis], dtype=complex)

    def residual(self, u: ComplexMode) -> float:
        """L2 norm of the part of u orthogonal to the subspace."""
        projected = u.values.copy()
        for e, c in zip(self.basis, self.coefficients(u)):
            projected = projected - c * e.values
        return l2_norm(ComplexMode(projected, u.config))

    def outside_mass(self) -> float:
        """Largest L2 norm a basis mode carries outside the region."""
        outside = self.region.complement()
        return max(l2_norm(restrict_mode(e, outside)) for e in self.basis)


def _check_nonempty(region: Region, name: str = "region"):
    if region.is_empty():
        logger.warning(f"Empty {name} passed to a localization scheme")
        raise ValidationError(name, region.sites, "region must be nonempty")


def local_subspace(scheme, region: Region, config: LatticeConfig,
                   n_per_site: int = 2) -> LocalSubspace:
    """Local one-particle subspace of a region.

    ``n_per_site`` is the number of real generating directions per site:
    Standard uses phi deltas (1) or phi and pi deltas (2); Newton-Wigner uses
    u (1) or u and iu (2). The NW complex span is the same for both choices.
    """
    scheme = SchemeKind.parse(scheme)
    _check_nonempty(region)
    if n_per_site not in (1, 2):
        raise ValidationError("n_per_site", n_per_site, "must be 1 or 2")
    if region.n_sites != config.n_sites:
        raise ValidationError("region", region.n_sites, "region and lattice sizes differ")

    if scheme is SchemeKind.NEWTON_WIGNER:
        basis = tuple(delta_mode(config, j) for j in region)
        raw = []
        for u in basis:
            raw.append(nw_map_k_inverse(u))
            if n_per_site == 2:
                raw.append(nw_map_k_inverse(1j * u))
        return LocalSubspace(scheme, region, basis, tuple(raw))

    kinds = ("phi", "pi")[:n_per_site]
    raw = tuple(delta_phase_vector(config, j, kind) for j in region for kind in kinds)
    modes = gram_schmidt([one_particle_vector(f).values for f in raw], config.spacing)
    basis = tuple(ComplexMode(v, config) for v in modes)
    logger.debug(f"Standard subspace of {len(region)} sites has dimension {len(basis)}")
    return LocalSubspace(scheme, region, basis, raw)


def local_probes(scheme, region: Region, config: LatticeConfig) -> Tuple[PhaseVector, ...]:
    """Real phase-space probes generating the scheme's local Weyl algebra."""
    return local_subspace(scheme, region, config, n_per_site=2).raw_phase_basis


# =============== 公理检查 ===============

def check_isotony(scheme, g1: Region, g2: Region, config: LatticeConfig) -> CheckResult:
    if not g1.issubset(g2):
        raise ValidationError("g1, g2", (g1.sites, g2.sites), "g1 must be contained in g2")
    inner = local_subspace(scheme, g1, config)
    outer = local_subspace(scheme, g2, config)
    residual = max(outer.residual(e) for e in inner.basis)
    return CheckResult(residual < SPAN_TOL, float(residual))


def check_translation_covariance(scheme, region: Region, shift: int,
                                 config: LatticeConfig) -> CheckResult:
    original = local_subspace(scheme, region, config)
    moved = local_subspace(scheme, region.shifted(shift), config)
    forward = [translate_mode(e, shift) for e in original.basis]
    residual = max(
        max(moved.residual(u) for u in forward),
        max(
            LocalSubspace(original.scheme, region, tuple(forward), ()).residual(e)
            for e in moved.basis
        ),
    )
    return CheckResult(residual < SPAN_TOL, float(residual))


def _check_disjoint(g1: Region, g2: Region):
    _check_nonempty(g1, "g1")
    _check_nonempty(g2, "g2")
    if not g1.is_disjoint(g2):
        logger.warning("Microcausality check requested for overlapping regions")
        raise ValidationError("g1, g2", (g1.sites, g2.sites), "regions must be disjoint")


def check_weak_microcausality(scheme, g1: Region, g2: Region, config: LatticeConfig) -> float:
    """Equal-time commutator witness between the local algebras of g1 and g2."""
    scheme = SchemeKind.parse(scheme)
    _check_disjoint(g1, g2)
    if scheme is SchemeKind.STANDARD:
        raw1 = local_probes(scheme, g1, config)
        raw2 = local_probes(scheme, g2, config)
        return float(max(abs(symplectic_form(f, g)) for f in raw1 for g in raw2))
    b1 = local_subspace(scheme, g1, config).basis
    b2 = local_subspace(scheme, g2, config).basis
    return float(max(abs(l2_inner(u, v).imag) for u in b1 for v in b2))


def microcausality_defects(scheme, g1: Region, g2: Region, config: LatticeConfig,
                           times: Sequence[float]) -> np.ndarray:
    """Commutator witness per time between g1 evolved by t and g2.

    Standard: max |sigma(D_t f, g)| over the Cauchy-data deltas.
    Newton-Wigner: spectral norm of the block <v_l, U_t u_k> between the two
    orthonormal bases, which is the supremum of |Im<v, U_t u>| over unit
    vectors of the two complex subspaces.
    """
    scheme = SchemeKind.parse(scheme)
    _check_disjoint(g1, g2)
    times = [float(t) for t in times]
    if not times:
        raise ValidationError("times", times, "time grid must be nonempty")
    d = separation(g1, g2, config)
    if max(abs(t) for t in times) >= d:
        logger.warning(f"Timelike configuration: max |t| >= separation {d:g}")
        raise ValidationError("times", max(abs(t) for t in times),
                              f"max |t| must stay below the separation {d:g} (spacelike)")

    defects = np.zeros(len(times))
    if scheme is SchemeKind.STANDARD:
        raw1 = local_probes(scheme, g1, config)
        raw2 = local_probes(scheme, g2, config)
        for i, t in enumerate(times):
            evolved = [time_evolve(f, t) for f in raw1]
            defects[i] = max(abs(symplectic_form(ft, g)) for ft in evolved for g in raw2)
        return defects

    b1 = local_subspace(scheme, g1, config).basis
    b2 = local_subspace(scheme, g2, config).basis
    for i, t in enumerate(times):
        evolved = [evolve_mode(u, t) for u in b1]
        block = np.array([[l2_inner(v, ut) for ut in evolved] for v in b2])
        defects[i] = np.linalg.norm(block, ord=2)
    return defects


def check_strong_microcausality(scheme, g1: Region, g2: Region, config: LatticeConfig,
                                times: Sequence[float]) -> float:
    return float(np.max(microcausality_defects(scheme, g1, g2, config, times)))


class NumberOperatorCheck(NamedTuple):
    available: bool
    leak: float


def local_number_operator_available(scheme, region: Region, config: LatticeConfig) -> NumberOperatorCheck:
    """A local number operator exists iff the local real one-particle span is complex.

    The leak is the largest relative distance of i*w from the real span of the
    local one-particle vectors w.
    """
    raw = local_probes(scheme, region, config)
    weight = np.sqrt(config.spacing)
    vecs = [one_particle_vector(f).values for f in raw]

    def realify(v: np.ndarray) -> np.ndarray:
        return weight * np.concatenate([v.real, v.imag])

    q = linalg.orth(np.stack([realify(v) for v in vecs], axis=1))
    leak = 0.0
    for v in vecs:
        r = realify(1j * v)
        residual = r - q @ (q.T @ r)
        leak = max(leak, float(np.linalg.norm(residual) / np.linalg.norm(r)))
    return NumberOperatorCheck(leak < NUMBER_OPERATOR_TOL, leak)


# =============== Fock 空间中的局域生成元 ===============

def _standard_mode_basis(g1: Region, g2: Region, config: LatticeConfig) -> Tuple[ComplexMode, ...]:
    """One J-mixed mode per site: the images of the phi deltas of g1, then of g2.

    The g1 block is orthonormalized first, so the first ``len(g1)`` modes span
    exactly the phi images of g1; the g2 images are orthogonalized against it.
    """
    first = [e.values for e in local_subspace(SchemeKind.STANDARD, g1, config, n_per_site=1).basis]
    rest = []
    for f in local_subspace(SchemeKind.STANDARD, g2, config, n_per_site=1).raw_phase_basis:
        v = one_particle_vector(f).values
        for e in first:
            v = v - config.spacing * np.vdot(e, v) * e
        rest.append(v)
    second = gram_schmidt(rest, config.spacing)
    if len(second) != len(g2):
        raise ValidationError("region2", g2.sites, "phi images of the two regions are linearly dependent")
    return tuple(ComplexMode(v, config) for v in first + second)


def scheme_fock_space(scheme, g1: Region, g2: Region, config: LatticeConfig, cutoff: int,
                      n_modes: Optional[int] = None) -> FockSpace:
    """Fock space used to test a scheme on a two-region geometry.

    Both schemes get one mode per site of G1 and of G2, G1 first.
    NW: the site modes (a tensor split G1 (x) G2).
    Standard: the one-particle images of the phi deltas, orthonormalized.
    ``n_modes``, when given, must match the mode count of the geometry.
    """
    scheme = SchemeKind.parse(scheme)
    _check_disjoint(g1, g2)
    if scheme is SchemeKind.NEWTON_WIGNER:
        modes = local_subspace(scheme, g1, config).basis + local_subspace(scheme, g2, config).basis
    else:
        modes = _standard_mode_basis(g1, g2, config)
    if n_modes is not None and n_modes != len(modes):
        raise ValidationError("fock.n_modes", n_modes,
                              f"geometry needs {len(modes)} modes (one per site of region1 and region2)")
    return FockSpace.from_modes(modes, cutoff)


def _coefficients_or_raise(fock: FockSpace, u: ComplexMode) -> np.ndarray:
    c = mode_coefficients(fock, u)
    if np.linalg.norm(c) < 1e-12:
        raise ValidationError("mode", None, "mode has no component in the Fock mode basis")
    return c


def local_weyl_generators(scheme, region: Region, fock: FockSpace, config: LatticeConfig,
                          magnitudes: Sequence[float] = DEFAULT_MAGNITUDES) -> List[FockOperator]:
    """Weyl operators of the region's local algebra, projected onto the Fock modes.

    NW: W(lambda u) and W(i lambda u) per site mode u. Standard: W(lambda w)
    for the normalized one-particle image w of every phi and pi delta.
    """
    scheme = SchemeKind.parse(scheme)
    generators: List[FockOperator] = []
    if scheme is SchemeKind.NEWTON_WIGNER:
        for site, u in zip(region, local_subspace(scheme, region, config).basis):
            c = _coefficients_or_raise(fock, u)
            for lam in magnitudes:
                generators.append(weyl_op(fock, lam * c, f"W(nw:{site},{lam:g})"))
                generators.append(weyl_op(fock, 1j * lam * c, f"W(nw:{site},{lam:g}i)"))
        return generators

    kinds = ("phi", "pi")
    for f, (site, kind) in zip(local_probes(scheme, region, config),
                               ((j, k) for j in region for k in kinds)):
        w = one_particle_vector(f)
        c = _coefficients_or_raise(fock, w * (1.0 / l2_norm(w)))
        for lam in magnitudes:
            generators.append(weyl_op(fock, lam * c, f"W(std:{site}{kind},{lam:g})"))
    return generators


def _nw_mode_indices(region: Region, fock: FockSpace, config: LatticeConfig) -> List[int]:
    indices = []
    for u in local_subspace(SchemeKind.NEWTON_WIGNER, region, config).basis:
        c = mode_coefficients(fock, u)
        j = int(np.argmax(np.abs(c)))
        if abs(abs(c[j]) - 1.0) > SPAN_TOL:
            raise ValidationError("fock", fock.n_modes, "Fock modes do not contain the NW basis of the region")
        indices.append(j)
    return indices


def local_ladder_generators(region: Region, fock: FockSpace, config: LatticeConfig) -> List[FockOperator]:
    """NW annihilation and creation operators of the region's modes."""
    ops: List[FockOperator] = []
    for j in _nw_mode_indices(region, fock, config):
        ops.extend([annihilation_op(fock, j), creation_op(fock, j)])
    return ops


def nw_local_number_operator(region: Region, fock: FockSpace, config: LatticeConfig) -> FockOperator:
    """Sum of a*a over the NW modes of the region."""
    total = np.zeros((fock.dim, fock.dim), dtype=complex)
    for j in _nw_mode_indices(region, fock, config):
        a = annihilation_op(fock, j).matrix
        total += a.conj().T @ a
    return FockOperator(total, fock, "N_G")


def time_interval_generators(region: Region, fock: FockSpace, config: LatticeConfig,
                             times: Sequence[float],
                             magnitudes: Sequence[float] = (0.5,)) -> List[FockOperator]:
    """NW Weyl generators of U_t-evolved region modes on a time grid."""
    generators: List[FockOperator] = []
    for t in times:
        for site, u in zip(region, local_subspace(SchemeKind.NEWTON_WIGNER, region, config).basis):
            c = _coefficients_or_raise(fock, evolve_mode(u, t))
            for lam in magnitudes:
                generators.append(weyl_op(fock, lam * c, f"W(nw:{site},t={t:g},{lam:g})"))
                generators.append(weyl_op(fock, 1j * lam * c, f"W(nw:{site},t={t:g},{lam:g}i)"))
    return generators


def time_interval_ranks(region: Region, fock: FockSpace, config: LatticeConfig,
                        grids: Sequence[Sequence[float]], tol: float = 1e-8) -> List[int]:
    """Vacuum cyclicity rank for each time grid."""
    return [
        cyclicity_rank(fock, time_interval_generators(region, fock, config, grid), tol)
        for grid in grids
    ]


# =============== FAPP 局域代数 ===============

def _factor_split(region: Region, fock: FockSpace) -> Tuple[List[int], List[int]]:
    if not fock.mode_basis:
        raise ValidationError("fock", fock.n_modes, "Fock space has no mode basis")
    inside, outside = [], []
    complement = region.complement()
    for j, e in enumerate(fock.mode_basis):
        tol = SUPPORT_RTOL * float(np.max(np.abs(e.values)))
        if mode_supported_in(e, region, tol):
            inside.append(j)
        elif mode_supported_in(e, complement, tol):
            outside.append(j)
        else:
            raise ValidationError("fock", j, "mode basis does not split into region and complement")
    return inside, outside


def conditional_expectation(a: FockOperator, region: Region, fock: FockSpace) -> FockOperator:
    """Normalized partial trace over the complement modes, tensored with the identity."""
    inside, outside = _factor_split(region, fock)
    n, d = fock.n_modes, fock.local_dim
    order = inside + outside
    perm = order + [n + j for j in order]
    d_in, d_out = d ** len(inside), d ** len(outside)

    tensor = a.matrix.reshape((d,) * (2 * n)).transpose(perm).reshape(d_in, d_out, d_in, d_out)
    reduced = np.einsum("icjc->ij", tensor) / d_out
    projected = np.einsum("ij,kl->ikjl", reduced, np.eye(d_out))
    projected = projected.reshape((d,) * (2 * n)).transpose(np.argsort(perm))
    return FockOperator(projected.reshape(fock.dim, fock.dim), fock, f"E({a.label})")


def fapp_distance(a: FockOperator, region: Region, fock: FockSpace) -> float:
    """||A - E(A)|| in the spectral norm, an upper bound on the distance to the local algebra."""
    return float(np.linalg.norm(a.matrix - conditional_expectation(a, region, fock).matrix, ord=2))


@dataclass(frozen=True, eq=False)
class FappAlgebra:
    region: Region
    delta: float
    fock: FockSpace

    def __post_init__(self):
        if not self.delta > 0:
            raise ValidationError("delta", self.delta, "must be positive")

    def distance(self, a: FockOperator) -> float:
        return fapp_distance(a, self.region, self.fock)

    def contains(self, a: FockOperator) -> bool:
        return self.distance(a) < self.delta


# =============== 有效局域化（康普顿尺度） ===============

def effective_localization_profile(f: PhaseVector, region: Region,
                                   margins: Sequence[int]) -> np.ndarray:
    """One-particle norm of sqrt(2) K f left outside the region widened by each margin."""
    u = one_particle_vector(f)
    return np.array([
        l2_norm(restrict_mode(u, region.widened(int(m)).complement())) for m in margins
    ])


def effective_localization_length(f: PhaseVector, region: Region) -> DecayFit:
    config = f.config
    margins = np.arange(config.n_sites // 2)
    leaked = effective_localization_profile(f, region, margins)
    r_min, r_max = fit_window(config)
    return fit_exponential_decay(config.spacing * margins, leaked, r_min=r_min, r_max=r_max,
                                 quantity="effective localization")


# =============== 基本性判据报告 ===============

@dataclass(frozen=True)
class ReportGeometry:
    region1: Region
    region2: Region
    times: Tuple[float, ...]
    shift: int = 3
    cutoff: int = 3
    separating_samples: int = 500
    seed: int = 0
    magnitudes: Tuple[float, ...] = DEFAULT_MAGNITUDES
    n_modes: Optional[int] = None

    def describe(self, config: LatticeConfig) -> Dict[str, Any]:
        return {
            "n_sites": config.n_sites,
            "spacing": config.spacing,
            "mass": config.mass,
            "region1": list(self.region1.sites),
            "region2": list(self.region2.sites),
            "separation": separation(self.region1, self.region2, config),
            "times": list(self.times),
            "shift": self.shift,
            "cutoff": self.cutoff,
        }


@dataclass(frozen=True)
class SchemeReport:
    scheme: SchemeKind
    geometry: Dict[str, Any]
    isotony_ok: bool
    translation_covariance_ok: bool
    weak_microcausality_defect: float
    strong_microcausality_defect: float
    vacuum_cyclic_rank: int
    fock_dim: int
    vacuum_separating_defect: float
    separating_witness: str
    local_number_op_available: bool
    number_operator_leak: float
    fundamentality_verdict: bool
    reasons: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "geometry": self.geometry,
            "isotony_ok": bool(self.isotony_ok),
            "translation_covariance_ok": bool(self.translation_covariance_ok),
            "weak_microcausality_defect": float(self.weak_microcausality_defect),
            "strong_microcausality_defect": float(self.strong_microcausality_defect),
            "vacuum_cyclic_rank": int(self.vacuum_cyclic_rank),
            "fock_dim": int(self.fock_dim),
            "vacuum_separating_defect": float(self.vacuum_separating_defect),
            "separating_witness": self.separating_witness,
            "local_number_op_available": bool(self.local_number_op_available),
            "number_operator_leak": float(self.number_operator_leak),
            "fundamentality_verdict": bool(self.fundamentality_verdict),
            "reasons": list(self.reasons),
        }


def fundamentality_report(scheme, geometry: ReportGeometry, config: LatticeConfig,
                          fock: Optional[FockSpace] = None, max_workers: int = 1) -> SchemeReport:
    """Run every assumption checker for a scheme and derive the fundamentality verdict.

    A scheme is fundamentality-compatible only if isotony, translation
    covariance and both microcausality checks pass and a local number
    operator exists.
    """
    scheme = SchemeKind.parse(scheme)
    g1, g2 = geometry.region1, geometry.region2
    _check_disjoint(g1, g2)
    if fock is None:
        fock = scheme_fock_space(scheme, g1, g2, config, geometry.cutoff, geometry.n_modes)

    def separating() -> Tuple[float, str]:
        generators = local_weyl_generators(scheme, g1, fock, config, geometry.magnitudes)
        if scheme is SchemeKind.NEWTON_WIGNER:
            generators = generators + local_ladder_generators(g1, fock, config)
        return tuple(separating_defect(fock, generators, vacuum(fock),
                                       geometry.separating_samples, geometry.seed))

    checks: List[Tuple[str, Callable[[], Any]]] = [
        ("isotony", lambda: check_isotony(scheme, g1, g1.widened(1), config)),
        ("covariance", lambda: check_translation_covariance(scheme, g1, geometry.shift, config)),
        ("weak", lambda: check_weak_microcausality(scheme, g1, g2, config)),
        ("strong", lambda: check_strong_microcausality(scheme, g1, g2, config, geometry.times)),
        ("rank", lambda: cyclicity_rank(
            fock, local_weyl_generators(scheme, g1, fock, config, geometry.magnitudes), 1e-8)),
        ("separating", separating),
        ("number", lambda: local_number_operator_available(scheme, g1, config)),
    ]
    # executor.map 保持输入顺序，结果与线程数无关
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as executor:
        results = dict(zip((name for name, _ in checks), executor.map(lambda item: item[1](), checks)))

    reasons = []
    if not results["isotony"].ok:
        reasons.append(REASON_ISOTONY)
    if not results["covariance"].ok:
        reasons.append(REASON_COVARIANCE)
    if results["weak"] > WEAK_TOL:
        reasons.append(REASON_WEAK)
    if results["strong"] > MICROCAUSALITY_TOL:
        reasons.append(REASON_STRONG)
    if not results["number"].available:
        reasons.append(REASON_NUMBER_OPERATOR)

    defect, witness = results["separating"]
    report = SchemeReport(
        scheme=scheme,
        geometry=geometry.describe(config),
        isotony_ok=results["isotony"].ok,
        translation_covariance_ok=results["covariance"].ok,
        weak_microcausality_defect=results["weak"],
        strong_microcausality_defect=results["strong"],
        vacuum_cyclic_rank=results["rank"],
        fock_dim=fock.dim,
        vacuum_separating_defect=defect,
        separating_witness=witness,
        local_number_op_available=results["number"].available,
        number_operator_leak=results["number"].leak,
        fundamentality_verdict=not reasons,
        reasons=tuple(reasons),
    )
    logger.info(f"Fundamentality report for {scheme.value}: verdict={report.fundamentality_verdict} {reasons}")
    return report
