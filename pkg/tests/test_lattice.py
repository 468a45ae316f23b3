import numpy as np
import pytest

from qft_locality.core.lattice import (
    ComplexMode,
    LatticeConfig,
    PhaseVector,
    Region,
    delta_mode,
    delta_phase_vector,
    is_supported_in,
    l2_inner,
    l2_norm,
    random_phase_vector,
    restrict,
    separation,
    symplectic_form,
    translate,
    zero_phase_vector,
)
from qft_locality.utils.exceptions import ConfigurationError, ValidationError


class TestLatticeConfig:
    @pytest.mark.parametrize("kwargs", [
        {"n_sites": 1, "spacing": 0.1, "mass": 1.0},
        {"n_sites": 16, "spacing": 0.0, "mass": 1.0},
        {"n_sites": 16, "spacing": 0.1, "mass": 0.0},
        {"n_sites": 16, "spacing": 0.1, "mass": -1.0},
        {"n_sites": 16, "spacing": 0.1, "mass": 1.0, "boundary": "dirichlet"},
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            LatticeConfig(**kwargs)

    def test_derived_lengths(self, lattice):
        assert lattice.length == pytest.approx(12.8)
        assert lattice.compton_length == pytest.approx(1.0)

    def test_site_distances_are_cyclic(self, small_lattice):
        d = small_lattice.site_distances(0)
        assert d[1] == pytest.approx(0.5)
        assert d[15] == pytest.approx(0.5)
        assert d[8] == pytest.approx(4.0)


class TestRegion:
    def test_interval_wraps(self):
        region = Region.interval(10, 8, 12)
        assert region.sites == (0, 1, 8, 9)

    def test_rejects_out_of_range_sites(self):
        with pytest.raises(ValidationError):
            Region((3, 10), 10)

    def test_set_operations(self):
        a = Region.interval(10, 0, 3)
        b = Region.interval(10, 2, 5)
        assert a.union(b).sites == (0, 1, 2, 3, 4)
        assert a.intersection(b).sites == (2,)
        assert not a.is_disjoint(b)
        assert Region.interval(10, 0, 1).issubset(a)
        assert len(a.complement()) == 7

    def test_widened_and_shifted(self):
        region = Region((0,), 10)
        assert region.widened(2).sites == (0, 1, 2, 8, 9)
        assert region.shifted(-1).sites == (9,)
        assert Region.full(10).is_full()
        assert Region.empty(10).is_empty()

    def test_separation(self, lattice, regions):
        assert separation(*regions, lattice) == pytest.approx(4.0)
        with pytest.raises(ValidationError):
            separation(Region.empty(lattice.n_sites), regions[1], lattice)


class TestPhaseSpace:
    def test_vectors_are_read_only(self, lattice):
        f = delta_phase_vector(lattice, 3, "phi")
        with pytest.raises(ValueError):
            f.phi[0] = 1.0

    def test_shape_is_validated(self, lattice):
        with pytest.raises(ValidationError):
            PhaseVector(np.zeros(3), np.zeros(3), lattice)

    def test_mismatched_configs_are_rejected(self, lattice, small_lattice):
        with pytest.raises(ConfigurationError):
            delta_phase_vector(lattice, 0) + delta_phase_vector(small_lattice, 0)

    def test_symplectic_form_is_antisymmetric(self, lattice, rng):
        f = random_phase_vector(lattice, rng)
        g = random_phase_vector(lattice, rng)
        assert symplectic_form(f, g) == pytest.approx(-symplectic_form(g, f))
        assert symplectic_form(f, f) == pytest.approx(0.0, abs=1e-12)

    def test_symplectic_form_of_deltas(self, lattice):
        phi = delta_phase_vector(lattice, 5, "phi")
        pi = delta_phase_vector(lattice, 5, "pi")
        assert symplectic_form(phi, pi) == pytest.approx(lattice.spacing)

    def test_delta_mode_is_normalized(self, lattice):
        u = delta_mode(lattice, 7)
        assert l2_norm(u) == pytest.approx(1.0)
        assert l2_inner(u, delta_mode(lattice, 8)) == 0

    def test_l2_inner_is_conjugate_linear_in_first_slot(self, lattice):
        u = delta_mode(lattice, 2)
        assert l2_inner(1j * u, u) == pytest.approx(-1j)
        assert l2_inner(u, 1j * u) == pytest.approx(1j)

    def test_support_and_restriction(self, lattice, rng):
        region = Region.interval(lattice.n_sites, 10, 14)
        f = random_phase_vector(lattice, rng, region)
        assert f.support().issubset(region)
        assert is_supported_in(f, region)
        assert is_supported_in(restrict(random_phase_vector(lattice, rng), region), region)
        assert zero_phase_vector(lattice).is_zero()

    def test_translate_moves_support(self, lattice):
        f = translate(delta_phase_vector(lattice, 127, "pi"), 2)
        assert f.support().sites == (1,)

    def test_complex_mode_arithmetic(self, lattice):
        u = delta_mode(lattice, 0)
        v = (u + u) - u * 0.5
        assert isinstance(v, ComplexMode)
        assert l2_norm(v) == pytest.approx(1.5)
