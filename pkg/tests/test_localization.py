from dataclasses import replace

import numpy as np
import pytest

from qft_locality.core.fock import (
    FockOperator,
    annihilation_op,
    creation_op,
    cyclicity_rank,
    identity_op,
    mode_coefficients,
)
from qft_locality.core.lattice import (
    LatticeConfig,
    Region,
    delta_mode,
    delta_phase_vector,
    l2_norm,
    random_phase_vector,
)
from qft_locality.core.localization import (
    REASON_NUMBER_OPERATOR,
    REASON_STRONG,
    FappAlgebra,
    ReportGeometry,
    check_isotony,
    check_strong_microcausality,
    check_translation_covariance,
    check_weak_microcausality,
    conditional_expectation,
    effective_localization_length,
    effective_localization_profile,
    fapp_distance,
    fundamentality_report,
    gram_schmidt,
    local_ladder_generators,
    local_number_operator_available,
    local_subspace,
    local_weyl_generators,
    microcausality_defects,
    nw_local_number_operator,
    scheme_fock_space,
    time_interval_generators,
    time_interval_ranks,
)
from qft_locality.core.spectral import one_particle_vector
from qft_locality.core.vacuum import SchemeKind
from qft_locality.utils.exceptions import ValidationError

STD = SchemeKind.STANDARD
NW = SchemeKind.NEWTON_WIGNER


def test_gram_schmidt_is_orthonormal(rng):
    spacing = 0.1
    vectors = [rng.standard_normal(20) + 1j * rng.standard_normal(20) for _ in range(4)]
    vectors.append(vectors[0] + vectors[1])
    basis = gram_schmidt(vectors, spacing)
    assert len(basis) == 4
    gram = np.array([[spacing * np.vdot(u, v) for v in basis] for u in basis])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)


class TestLocalSubspace:
    def test_dimensions(self, lattice):
        region = Region.interval(lattice.n_sites, 5, 8)
        assert local_subspace(NW, region, lattice).dim == 3
        assert local_subspace(STD, region, lattice).dim == 6
        assert local_subspace(STD, region, lattice, n_per_site=1).dim == 3

    def test_standard_images_overflow_the_region(self, lattice):
        region = Region.interval(lattice.n_sites, 5, 8)
        assert local_subspace(STD, region, lattice).outside_mass() > 1e-3
        assert local_subspace(NW, region, lattice).outside_mass() == 0.0

    def test_rejects_empty_region(self, lattice):
        with pytest.raises(ValidationError):
            local_subspace(NW, Region.empty(lattice.n_sites), lattice)

    def test_rejects_bad_generator_count(self, lattice):
        with pytest.raises(ValidationError):
            local_subspace(STD, Region((0,), lattice.n_sites), lattice, n_per_site=3)


class TestAxioms:
    @pytest.mark.parametrize("scheme", [STD, NW])
    def test_isotony(self, scheme, lattice):
        g1 = Region.interval(lattice.n_sites, 10, 12)
        result = check_isotony(scheme, g1, g1.widened(2), lattice)
        assert result.ok
        assert result.residual < 1e-10

    def test_isotony_needs_nested_regions(self, lattice):
        with pytest.raises(ValidationError):
            check_isotony(NW, Region((3,), lattice.n_sites), Region((4,), lattice.n_sites), lattice)

    @pytest.mark.parametrize("scheme", [STD, NW])
    @pytest.mark.parametrize("shift", [3, -17, 64])
    def test_translation_covariance(self, scheme, shift, lattice):
        region = Region.interval(lattice.n_sites, 120, 130)
        assert check_translation_covariance(scheme, region, shift, lattice).ok

    @pytest.mark.parametrize("scheme", [STD, NW])
    def test_weak_microcausality_is_exact(self, scheme, lattice):
        g1 = Region.interval(lattice.n_sites, 0, 2)
        g2 = Region.interval(lattice.n_sites, 2, 4)
        assert check_weak_microcausality(scheme, g1, g2, lattice) < 1e-14

    def test_overlapping_regions_rejected(self, lattice):
        g = Region.interval(lattice.n_sites, 0, 3)
        with pytest.raises(ValidationError):
            check_weak_microcausality(STD, g, g, lattice)


class TestStrongMicrocausality:
    def test_default_geometry(self, lattice, regions):
        times = np.linspace(-2.0, 2.0, 9)
        std = microcausality_defects(STD, *regions, lattice, times)
        nw = microcausality_defects(NW, *regions, lattice, times)
        assert std.shape == nw.shape == (9,)
        assert np.max(std) < 1e-6
        assert np.max(nw) > 1e-4
        assert nw[4] == 0.0

    def test_newton_wigner_violation_at_short_range(self, lattice):
        g1 = Region((0,), lattice.n_sites)
        g2 = Region((10,), lattice.n_sites)
        assert check_strong_microcausality(NW, g1, g2, lattice, [0.25, 0.5, 0.75]) > 1e-2

    def test_timelike_times_are_rejected(self, lattice, regions):
        with pytest.raises(ValidationError):
            microcausality_defects(NW, *regions, lattice, [0.0, 4.0])

    def test_empty_time_grid(self, lattice, regions):
        with pytest.raises(ValidationError):
            microcausality_defects(STD, *regions, lattice, [])


class TestNumberOperator:
    def test_standard_has_no_local_number_operator(self, lattice):
        check = local_number_operator_available(STD, Region.interval(lattice.n_sites, 0, 2), lattice)
        assert not check.available
        assert check.leak > 1e-3

    def test_newton_wigner_number_operator(self, lattice, regions):
        check = local_number_operator_available(NW, regions[0], lattice)
        assert check.available
        fock = scheme_fock_space(NW, *regions, lattice, 3)
        n_g = nw_local_number_operator(regions[0], fock, lattice)
        assert n_g.label == "N_G"
        assert n_g.is_hermitian()
        for w in local_weyl_generators(NW, regions[1], fock, lattice):
            assert n_g.commutator(w).norm() < 1e-10

    def test_newton_wigner_number_spectrum(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 3)
        evals = np.linalg.eigvalsh(nw_local_number_operator(regions[0], fock, lattice).matrix)
        np.testing.assert_allclose(evals, np.round(evals), atol=1e-10)
        assert set(np.round(evals).astype(int)) == {0, 1, 2, 3}


class TestFockEmbedding:
    def test_scheme_fock_spaces(self, lattice, regions):
        assert scheme_fock_space(NW, *regions, lattice, 3).dim == 16
        assert scheme_fock_space(STD, *regions, lattice, 3).dim == 16

    def test_ladder_generator_labels(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 3)
        labels = [op.label for op in local_ladder_generators(regions[1], fock, lattice)]
        assert labels == ["a(1)", "a*(1)"]

    def test_cyclicity_dichotomy(self, lattice, regions):
        nw_fock = scheme_fock_space(NW, *regions, lattice, 3)
        std_fock = scheme_fock_space(STD, *regions, lattice, 3)
        nw1 = local_weyl_generators(NW, regions[0], nw_fock, lattice)
        nw2 = local_weyl_generators(NW, regions[1], nw_fock, lattice)
        std1 = local_weyl_generators(STD, regions[0], std_fock, lattice)
        assert len(nw1) == 6
        assert cyclicity_rank(nw_fock, nw1) == 4
        assert cyclicity_rank(nw_fock, nw1 + nw2) == 16
        assert cyclicity_rank(std_fock, std1) <= std_fock.dim

    @pytest.mark.parametrize("site", [1, 3])
    def test_standard_vacuum_cyclic_at_short_separation(self, lattice, regions, site):
        g2 = Region((site,), lattice.n_sites)
        fock = scheme_fock_space(STD, regions[0], g2, lattice, 3)
        assert cyclicity_rank(fock, local_weyl_generators(STD, regions[0], fock, lattice)) == 16

    def test_standard_rank_drops_at_long_separation(self, lattice, regions):
        fock = scheme_fock_space(STD, *regions, lattice, 3)
        assert cyclicity_rank(fock, local_weyl_generators(STD, regions[0], fock, lattice)) < fock.dim

    def test_standard_space_spans_both_regions(self, lattice, regions):
        g1, g2 = regions
        near = scheme_fock_space(STD, g1, g2, lattice, 2)
        far = scheme_fock_space(STD, g1, Region((90,), lattice.n_sites), lattice, 2)
        w1 = one_particle_vector(delta_phase_vector(lattice, 0, "phi"))
        w2 = one_particle_vector(delta_phase_vector(lattice, 40, "phi"))
        # region1 block comes first and does not depend on region2
        np.testing.assert_allclose(near.mode_basis[0].values, far.mode_basis[0].values, atol=1e-12)
        assert not np.allclose(near.mode_basis[1].values, far.mode_basis[1].values, atol=1e-6)
        for w in (w1, w2):
            c = mode_coefficients(near, w)
            assert np.linalg.norm(c) == pytest.approx(l2_norm(w), rel=1e-10)

    def test_mode_count_must_match(self, lattice, regions):
        assert scheme_fock_space(NW, *regions, lattice, 2, n_modes=2).n_modes == 2
        with pytest.raises(ValidationError):
            scheme_fock_space(STD, *regions, lattice, 2, n_modes=3)
        with pytest.raises(ValidationError):
            scheme_fock_space(STD, regions[0], regions[0], lattice, 2)

    def test_generators_need_embedded_modes(self, lattice, regions):
        nw_fock = scheme_fock_space(NW, *regions, lattice, 2)
        far = Region((90,), lattice.n_sites)
        with pytest.raises(ValidationError):
            local_weyl_generators(NW, far, nw_fock, lattice)

    def test_time_interval_ranks_grow(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 3)
        ranks = time_interval_ranks(regions[0], fock, lattice, [[0.0], [0.0, 1.0], [0.0, 0.5, 1.0, 1.5]])
        assert ranks[0] == 4
        assert all(b >= a for a, b in zip(ranks, ranks[1:]))
        assert len(time_interval_generators(regions[0], fock, lattice, [0.0, 1.0])) == 4


class TestFapp:
    def test_local_operators_have_zero_distance(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 2)
        a0 = annihilation_op(fock, 0)
        assert fapp_distance(a0, regions[0], fock) < 1e-12
        np.testing.assert_allclose(conditional_expectation(a0, regions[0], fock).matrix, a0.matrix, atol=1e-12)

    def test_remote_operator_is_far(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 2)
        n1 = creation_op(fock, 1) @ annihilation_op(fock, 1)
        projected = conditional_expectation(n1, regions[0], fock)
        # the partial trace of a*a over a cutoff-2 mode is 3/3 = 1
        np.testing.assert_allclose(projected.matrix, identity_op(fock).matrix, atol=1e-12)
        algebra = FappAlgebra(regions[0], 0.1, fock)
        assert not algebra.contains(n1)
        assert algebra.contains(annihilation_op(fock, 0))

    def test_traceless_remote_operator_has_unit_distance(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 2)
        remote = np.diag([1.0, -1.0, 0.0])
        op = FockOperator(np.kron(np.eye(fock.local_dim), remote), fock, "I(x)C")
        assert fapp_distance(op, regions[0], fock) == pytest.approx(1.0, abs=1e-12)

    def test_distance_obeys_triangle_inequality(self, lattice, regions, rng):
        fock = scheme_fock_space(NW, *regions, lattice, 2)

        def random_op():
            m = rng.standard_normal((fock.dim, fock.dim)) + 1j * rng.standard_normal((fock.dim, fock.dim))
            return FockOperator(m, fock)

        for _ in range(20):
            a, b, c = random_op(), random_op(), random_op()
            lhs = fapp_distance(a - c, regions[0], fock)
            rhs = fapp_distance(a - b, regions[0], fock) + fapp_distance(b - c, regions[0], fock)
            assert lhs <= rhs + 1e-10

    def test_delta_must_be_positive(self, lattice, regions):
        fock = scheme_fock_space(NW, *regions, lattice, 2)
        with pytest.raises(ValidationError):
            FappAlgebra(regions[0], 0.0, fock)

    def test_modes_must_split_across_the_region(self, lattice, regions):
        fock = scheme_fock_space(STD, *regions, lattice, 2)
        with pytest.raises(ValidationError):
            fapp_distance(identity_op(fock), regions[0], fock)


class TestEffectiveLocalization:
    def test_profile_is_decreasing(self, lattice):
        f = delta_phase_vector(lattice, 0, "phi")
        leaked = effective_localization_profile(f, Region((0,), lattice.n_sites), [0, 5, 10, 20])
        assert np.all(np.diff(leaked) < 0)

    def test_compton_scale(self):
        config = LatticeConfig(512, 0.05, 1.0)
        f = delta_phase_vector(config, 0, "phi")
        length = effective_localization_length(f, Region((0,), config.n_sites)).length
        assert 0.6 <= length * config.mass <= 1.4


class TestFundamentalityReport:
    @pytest.fixture
    def geometry(self, regions):
        return ReportGeometry(regions[0], regions[1], times=tuple(np.linspace(-2, 2, 5)),
                              separating_samples=60, seed=5)

    def test_standard_fails_on_number_operator(self, lattice, geometry):
        report = fundamentality_report(STD, geometry, lattice)
        assert not report.fundamentality_verdict
        assert report.reasons == (REASON_NUMBER_OPERATOR,)
        assert report.isotony_ok and report.translation_covariance_ok
        assert report.fock_dim == 16
        assert report.vacuum_cyclic_rank <= report.fock_dim
        assert report.vacuum_separating_defect > 0

    def test_standard_vacuum_cyclic_for_adjacent_regions(self, lattice, regions):
        near = ReportGeometry(regions[0], Region((1,), lattice.n_sites), times=(0.0,),
                              separating_samples=60, seed=5, n_modes=2)
        report = fundamentality_report(STD, near, lattice)
        assert report.vacuum_cyclic_rank == report.fock_dim == 16
        assert report.reasons == (REASON_NUMBER_OPERATOR,)

    def test_mode_count_mismatch_is_rejected(self, lattice, geometry):
        with pytest.raises(ValidationError):
            fundamentality_report(NW, replace(geometry, n_modes=4), lattice)

    def test_newton_wigner_fails_on_microcausality(self, lattice, geometry):
        report = fundamentality_report(NW, geometry, lattice)
        assert not report.fundamentality_verdict
        assert report.reasons == (REASON_STRONG,)
        assert report.local_number_op_available
        assert report.vacuum_separating_defect == 0.0
        assert report.vacuum_cyclic_rank < report.fock_dim

    def test_parallel_checks_give_the_same_report(self, lattice, geometry):
        serial = fundamentality_report(NW, geometry, lattice, max_workers=1).to_dict()
        parallel = fundamentality_report(NW, geometry, lattice, max_workers=4).to_dict()
        assert serial == parallel
        assert serial["scheme"] == "newton-wigner"
        assert serial["geometry"]["separation"] == pytest.approx(4.0)


def test_random_local_data_stays_in_standard_span(lattice, rng):
    region = Region.interval(lattice.n_sites, 30, 33)
    f = random_phase_vector(lattice, rng, region)
    assert local_subspace(STD, region, lattice).residual(one_particle_vector(f)) < 1e-10
    assert local_subspace(NW, region, lattice).residual(delta_mode(lattice, 31)) < 1e-12
