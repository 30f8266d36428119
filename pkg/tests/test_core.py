import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracff.core import (
    BoundaryKind,
    DriveProtocol,
    FieldKind,
    GridSpec,
    InvalidArgumentError,
    PhysicalParams,
    PotentialMatrix,
    Representation,
    ROTATION_XZ,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SpinorField,
    UnsupportedOperationError,
    make_constant_protocol,
    make_sinusoidal_protocol,
    protocol_from_table,
    rotate_matrix,
    wavenumber_lattice,
)


def periodic_grid(n=64, length=2 * math.pi):
    return GridSpec(-length / 2, length / 2, n, BoundaryKind.PERIODIC)


class TestPhysicalParams:
    def test_defaults_are_natural_units(self):
        p = PhysicalParams()
        assert (p.mass, p.light_speed, p.hbar, p.kappa) == (1.0, 1.0, 1.0, 0.0)

    def test_massless_is_allowed(self):
        assert PhysicalParams(mass=0.0).rest_energy == 0.0

    @pytest.mark.parametrize(
        "kwargs", [{"mass": -1.0}, {"light_speed": 0.0}, {"hbar": -2.0}]
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            PhysicalParams(**kwargs)


class TestGridSpec:
    def test_spacing(self):
        g = GridSpec(0.0, 2.0, 8)
        assert g.dx == pytest.approx(0.25)
        assert g.points[0] == 0.0 and g.points[-1] == pytest.approx(2.0 - 0.25)

    def test_bounded_grid_samples_cell_centers(self):
        g = GridSpec(-1.0, 1.0, 4, BoundaryKind.BOUNDED)
        assert np.allclose(g.points, [-0.75, -0.25, 0.25, 0.75])

    def test_too_few_points(self):
        with pytest.raises(InvalidArgumentError):
            GridSpec(0.0, 1.0, 1)

    def test_wavenumber_lattice_n4(self):
        g = periodic_grid(n=4)
        assert np.allclose(wavenumber_lattice(g), [0.0, 1.0, -2.0, -1.0])

    def test_wavenumber_lattice_n2(self):
        g = periodic_grid(n=2)
        assert np.allclose(wavenumber_lattice(g), [0.0, -1.0])

    def test_wavenumber_lattice_spacing(self):
        g = GridSpec(-16 * math.pi, 16 * math.pi, 1024)
        assert wavenumber_lattice(g)[1] == pytest.approx(1.0 / 16.0, abs=0, rel=1e-15)

    def test_bounded_grid_has_no_lattice(self):
        g = GridSpec(0.0, 1.0, 8, BoundaryKind.BOUNDED)
        with pytest.raises(UnsupportedOperationError):
            wavenumber_lattice(g)

    def test_kappa_lattice_validation(self):
        g = GridSpec(-16 * math.pi, 16 * math.pi, 256)
        g.validate_kappa(0.0625)
        with pytest.raises(InvalidArgumentError, match="0.0625"):
            g.validate_kappa(0.07)

    def test_power_of_two_enforcement(self):
        GridSpec(0.0, 1.0, 64).require_power_of_two()
        with pytest.raises(InvalidArgumentError):
            GridSpec(0.0, 1.0, 48).require_power_of_two()


class TestFieldKind:
    def test_homogeneous_ignores_position(self):
        x = np.linspace(-3, 3, 7)
        assert np.all(FieldKind.HOMOGENEOUS.evaluate(x, 1.5) == 1.5)

    def test_linear_is_alpha_times_x(self):
        x = np.linspace(-3, 3, 7)
        assert np.all(FieldKind.LINEAR.evaluate(x, 2.0) == 2.0 * x)


class TestSinusoidalProtocol:
    def test_endpoint_values(self):
        p = make_sinusoidal_protocol(1.0)
        assert float(p.alpha(0.0)) == pytest.approx(1.0)
        assert float(p.alpha(1.0)) == pytest.approx(2.0)
        assert abs(float(p.alpha_dot(0.0))) <= 1e-10
        assert abs(float(p.alpha_dot(1.0))) <= 1e-10
        assert p.flat_start and p.flat_end

    def test_midpoint_values(self):
        p = make_sinusoidal_protocol(1.0)
        assert float(p.alpha(0.5)) == pytest.approx(1.5)
        assert float(p.alpha_dot(0.5)) == pytest.approx(math.pi / 2.0)

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(InvalidArgumentError):
            make_sinusoidal_protocol(0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1.0 - 1e-3))
    def test_alpha_dot_matches_finite_difference(self, t):
        p = make_sinusoidal_protocol(1.0)
        h = 1e-5
        fd = (float(p.alpha(t + h)) - float(p.alpha(t - h))) / (2 * h)
        ad = float(p.alpha_dot(t))
        assert abs(ad - fd) <= 1e-6 * max(1.0, abs(ad))

    def test_claimed_flat_flags_are_verified(self):
        with pytest.raises(InvalidArgumentError):
            DriveProtocol(1.0, lambda t: t, lambda t: np.ones_like(np.asarray(t, float)),
                          flat_start=True, flat_end=False)


class TestTableProtocol:
    def test_round_trip(self):
        t = np.linspace(0.0, 2.0, 513)
        proto = protocol_from_table(t, 1.0 + t**2 / 8.0, t / 4.0)
        assert float(proto.alpha(1.0)) == pytest.approx(1.125, rel=1e-6)
        assert proto.flat_start and not proto.flat_end

    def test_rejects_decreasing_times(self):
        with pytest.raises(InvalidArgumentError):
            protocol_from_table([0.0, 0.5, 0.4], [1, 1, 1], [0, 0, 0])


class TestRepresentation:
    def test_sigma_assignment(self):
        assert np.allclose(Representation.KINETIC_X.sigma_kinetic, SIGMA_X)
        assert np.allclose(Representation.KINETIC_Z.sigma_kinetic, SIGMA_Z)
        assert np.allclose(Representation.KINETIC_X.sigma_mass, SIGMA_Z)
        assert np.allclose(Representation.KINETIC_Z.sigma_mass, SIGMA_X)

    def test_rotation_is_unitary_and_involutive(self):
        u = ROTATION_XZ
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-15)
        assert np.allclose(u @ u, np.eye(2), atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=-5, max_value=5), min_size=4, max_size=4))
    def test_double_rotation_is_identity_on_hermitian_matrices(self, coeffs):
        a, bx, by, bz = coeffs
        m = a * np.eye(2) + bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z
        assert np.allclose(rotate_matrix(rotate_matrix(m)), m, atol=1e-13)

    def test_rotation_swaps_x_and_z(self):
        assert np.allclose(rotate_matrix(SIGMA_X), SIGMA_Z, atol=1e-15)
        assert np.allclose(rotate_matrix(SIGMA_Z), SIGMA_X, atol=1e-15)
        assert np.allclose(rotate_matrix(SIGMA_Y), -SIGMA_Y, atol=1e-15)


class TestSpinorField:
    def test_normalization_and_idempotence(self):
        g = periodic_grid(n=32)
        rng = np.random.default_rng(7)
        values = rng.normal(size=(32, 2)) + 1j * rng.normal(size=(32, 2))
        f = SpinorField(g, values).normalized()
        assert f.norm() == pytest.approx(1.0, abs=1e-10)
        again = f.normalized()
        assert np.allclose(again.values, f.values, atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_normalize_random_fields(self, seed):
        g = periodic_grid(n=16)
        rng = np.random.default_rng(seed)
        values = rng.normal(size=(16, 2)) + 1j * rng.normal(size=(16, 2))
        if np.max(np.abs(values)) == 0:
            return
        assert SpinorField(g, values).normalized().norm() == pytest.approx(1.0, abs=1e-10)

    def test_values_are_read_only(self):
        g = periodic_grid(n=8)
        f = SpinorField(g, np.ones((8, 2), dtype=complex))
        with pytest.raises(ValueError):
            f.values[0, 0] = 0.0


class TestPotentialMatrix:
    def test_representation_conversion_flips_pseudoscalar(self):
        m = PotentialMatrix(
            v_t=np.array([1.0]), v_e=np.array([0.0]),
            v_p=np.array([-0.25]), v_s=np.array([0.5]),
        )
        x = m.in_representation(Representation.KINETIC_X)
        assert x.v_p[0] == 0.25
        assert x.v_t[0] == 1.0 and x.v_s[0] == 0.5

    def test_conversion_preserves_the_assembled_physics(self):
        # the assembled matrices are related by the X<->Z rotation
        m = PotentialMatrix(
            v_t=np.array([0.3]), v_e=np.array([0.1]),
            v_p=np.array([-0.2]), v_s=np.array([0.7]),
        )
        z = m.as_matrices()[0]
        x = m.in_representation(Representation.KINETIC_X).as_matrices()[0]
        assert np.allclose(rotate_matrix(z), x, atol=1e-15)

    def test_complex_coefficients_rejected(self):
        with pytest.raises(InvalidArgumentError):
            PotentialMatrix(
                v_t=np.array([1.0 + 1e-3j]), v_e=np.array([0.0]),
                v_p=np.array([0.0]), v_s=np.array([0.0]),
            )


def test_constant_protocol_is_flat():
    p = make_constant_protocol(1.5, 2.0)
    assert float(p.alpha(1.3)) == 1.5
    assert p.flat_start and p.flat_end
