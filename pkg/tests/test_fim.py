import dataclasses
import math

import numpy as np
import pytest

from nfcrb.closedform import RhoGeometry, i1_closed, i3_bounds, i5_bounds, i6_closed
from nfcrb.fieldmodel import DipoleScenario, SurfacePoint, dipole_field
from nfcrb.fim import (
    CplIntegrals,
    FisherMatrix,
    IllConditionedFisherError,
    cpl_integrals,
    crb_cpl,
    crb_from_fim,
    field_jacobian_analytic,
    field_jacobian_fd,
    fim_scalar_field,
    fim_vector_field,
    scalar_jacobian_analytic,
    scalar_jacobian_fd,
)
FIG3 = DipoleScenario(wavelength=0.01, chi=1.0, source_position=(6.0, 0.0, 0.0),
                      surface_side=3.0, noise_sigma2=10.0, dipole_length=0.005)

# Regression anchors for the reference scenario (surface area 9 m^2,
# distance 6 m, SNR -10 dB), frozen from the converged quadrature values.
FIG3_CRB_X = 1.118687638143e-04
FIG3_CRB_Y = 5.542665109821e-03
FIG3_CRB_Z = 5.634282593071e-03


def off_axis_scenario():
    return DipoleScenario(wavelength=0.01, chi=0.9 + 0.3j,
                          source_position=(6.0, 0.25, -0.4),
                          surface_side=3.0, noise_sigma2=10.0)


class TestFieldJacobian:
    def test_transverse_derivative_vanishes_on_axis(self):
        jac = field_jacobian_analytic(SurfacePoint(0.0, 0.0), FIG3)
        assert jac[1, 0] == 0.0  # d e_y / d x_C at u = v = 0

    def test_matches_finite_differences(self):
        scenario = off_axis_scenario()
        rng = np.random.default_rng(7)
        step = 1e-6 * scenario.wavelength
        for _ in range(20):
            p = SurfacePoint(float(rng.uniform(-1.5, 1.5)),
                             float(rng.uniform(-1.5, 1.5)))
            analytic = field_jacobian_analytic(p, scenario)
            fd = field_jacobian_fd(p, scenario, step)
            assert np.max(np.abs(analytic - fd)) <= 1e-6 * np.max(np.abs(analytic))

    def test_fd_second_order(self):
        p = SurfacePoint(0.8, -0.6)
        scenario = off_axis_scenario()
        exact = field_jacobian_analytic(p, scenario)
        h = 2e-6  # truncation-dominated regime; roundoff enters below ~5e-7
        err_h = np.max(np.abs(field_jacobian_fd(p, scenario, h) - exact))
        err_h2 = np.max(np.abs(field_jacobian_fd(p, scenario, h / 2) - exact))
        assert 3.5 <= err_h / err_h2 <= 4.5

    def test_phase_term_dominates_axial_derivative(self):
        # many wavelengths out, the derivative of exp(-jkr) dwarfs the
        # amplitude derivatives: |d e_z/d x_C| is close to k |e_z| on axis
        p = SurfacePoint(0.0, 0.0)
        jac = field_jacobian_analytic(p, FIG3)
        e_z = dipole_field(p, FIG3).ez
        ratio = abs(jac[2, 0]) / (FIG3.wavenumber * abs(e_z))
        assert abs(ratio - 1.0) < 0.01

    def test_zero_field_line_fd(self):
        scenario = off_axis_scenario()
        p = SurfacePoint(0.7, scenario.z_c)  # e_x vanishes identically in y
        fd = field_jacobian_fd(p, scenario, 1e-8)
        assert abs(fd[0, 1]) < 1e-10 * np.max(np.abs(fd))

    def test_step_crossing_surface_rejected(self):
        with pytest.raises(ValueError):
            field_jacobian_fd(SurfacePoint(0.0, 0.0), FIG3, 7.0)


class TestScalarJacobian:
    def test_matches_finite_differences(self):
        scenario = off_axis_scenario()
        rng = np.random.default_rng(8)
        step = 1e-6 * scenario.wavelength
        for _ in range(20):
            p = SurfacePoint(float(rng.uniform(-1.5, 1.5)),
                             float(rng.uniform(-1.5, 1.5)))
            analytic = scalar_jacobian_analytic(p, scenario)
            fd = scalar_jacobian_fd(p, scenario, step)
            assert np.max(np.abs(analytic - fd)) <= 1e-6 * np.max(np.abs(analytic))


class TestVectorFim:
    def test_cpl_diagonal(self):
        f = fim_vector_field(FIG3).matrix
        off = np.max(np.abs(f - np.diag(np.diag(f))))
        assert off <= 1e-10 * np.max(np.diag(f))

    def test_first_diagonal_matches_integral_split(self):
        ints = cpl_integrals(FIG3)
        f = fim_vector_field(FIG3).matrix
        assert f[0, 0] == pytest.approx(FIG3.snr * (ints.i1 + ints.i2), rel=1e-8)
        assert f[1, 1] == pytest.approx(FIG3.snr * (ints.i3 + ints.i4), rel=1e-8)
        assert f[2, 2] == pytest.approx(FIG3.snr * (ints.i5 + ints.i6), rel=1e-8)

    def test_noise_scaling_is_exact(self):
        doubled = dataclasses.replace(FIG3, noise_sigma2=2 * FIG3.noise_sigma2)
        f1 = fim_vector_field(FIG3).matrix
        f2 = fim_vector_field(doubled).matrix
        assert np.array_equal(f2, f1 / 2.0)

    def test_symmetric_psd_off_axis(self):
        f = fim_vector_field(off_axis_scenario()).matrix
        assert np.array_equal(f, f.T)
        eigvals = np.linalg.eigvalsh(f)
        assert eigvals.min() >= -1e-12 * np.trace(f)

    def test_far_field_warning(self):
        scenario = dataclasses.replace(FIG3, dipole_length=1.0)
        with pytest.warns(UserWarning, match="radiating region"):
            fim_vector_field(scenario)


class TestScalarFim:
    def test_cpl_diagonal(self):
        f = fim_scalar_field(FIG3).matrix
        off = np.max(np.abs(f - np.diag(np.diag(f))))
        assert off <= 1e-10 * np.max(np.diag(f))

    def test_close_to_vector_model_at_practical_size(self):
        vec = crb_from_fim(fim_vector_field(FIG3)).as_array()
        sca = crb_from_fim(fim_scalar_field(FIG3)).as_array()
        assert np.max(np.abs(sca / vec - 1.0)) < 0.25


class TestCrbFromFim:
    def test_diagonal_inverse(self):
        f = FisherMatrix(matrix=np.diag([4.0, 5.0, 8.0]), est_rel_error=0.0,
                         panels_used=1)
        crb = crb_from_fim(f)
        assert crb.as_array() == pytest.approx([0.25, 0.2, 0.125], rel=1e-15)

    def test_inverse_diagonal_dominates_reciprocal(self):
        rng = np.random.default_rng(15)
        for _ in range(25):
            a = rng.normal(size=(3, 3))
            m = a @ a.T + 0.05 * np.eye(3)
            crb = crb_from_fim(m).as_array()
            assert np.all(crb >= 1.0 / np.diag(m) - 1e-12)

    def test_matches_dense_inverse(self):
        rng = np.random.default_rng(16)
        for _ in range(25):
            a = rng.normal(size=(3, 3))
            m = a @ a.T + 0.05 * np.eye(3)
            crb = crb_from_fim(m).as_array()
            assert crb == pytest.approx(np.diag(np.linalg.inv(m)), rel=1e-12)

    def test_singular_matrix_names_direction(self):
        m = np.diag([1.0, 1.0, 0.0])
        with pytest.raises(IllConditionedFisherError, match="z_C"):
            crb_from_fim(m)


class TestCplIntegrals:
    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 5.0])
    def test_axial_integrals_match_closed_forms(self, rho):
        scenario = DipoleScenario(wavelength=2 * math.pi, chi=1.0,
                                  source_position=(1.0, 0.0, 0.0),
                                  surface_side=rho, noise_sigma2=1.0)
        ints = cpl_integrals(scenario)
        g = RhoGeometry.from_scenario(scenario)
        assert ints.i1 == pytest.approx(i1_closed(g), rel=1e-8)
        assert ints.i6 == pytest.approx(i6_closed(g), rel=1e-8)

    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 5.0])
    def test_transverse_integrals_inside_bounds(self, rho):
        scenario = DipoleScenario(wavelength=2 * math.pi, chi=1.0,
                                  source_position=(1.0, 0.0, 0.0),
                                  surface_side=rho, noise_sigma2=1.0)
        ints = cpl_integrals(scenario)
        g = RhoGeometry.from_scenario(scenario)
        b3, b5 = i3_bounds(g), i5_bounds(g)
        assert b3.lower < ints.i3 <= b3.upper + 1e-12
        assert b5.lower < ints.i5 <= b5.upper + 1e-12

    def test_all_nonnegative(self):
        ints = cpl_integrals(FIG3)
        assert np.all(ints.as_array() >= 0.0)

    def test_requires_cpl(self):
        with pytest.raises(ValueError, match="central perpendicular"):
            cpl_integrals(off_axis_scenario())


class TestCrbCpl:
    def test_matches_general_path(self):
        fast = crb_cpl(FIG3).as_array()
        general = crb_from_fim(fim_vector_field(FIG3)).as_array()
        assert np.max(np.abs(fast / general - 1.0)) <= 1e-8

    def test_reference_anchor_values(self):
        crb = crb_cpl(FIG3)
        assert crb.crb_x == pytest.approx(FIG3_CRB_X, rel=1e-9)
        assert crb.crb_y == pytest.approx(FIG3_CRB_Y, rel=1e-9)
        assert crb.crb_z == pytest.approx(FIG3_CRB_Z, rel=1e-9)
        # transverse accuracy sits in the tens-of-centimeters decade
        assert 0.01 < math.sqrt(crb.crb_y) < 1.0
        assert 0.01 < math.sqrt(crb.crb_z) < 1.0

    def test_noise_scaling_exact(self):
        crb1 = crb_cpl(FIG3).as_array()
        crb2 = crb_cpl(dataclasses.replace(FIG3, noise_sigma2=30.0)).as_array()
        assert crb2 == pytest.approx(3.0 * crb1, rel=1e-15)

    def test_monotone_in_aperture(self):
        values = []
        for side in (1.0, 1.5, 2.0, 3.0, 4.0, 5.0):
            values.append(crb_cpl(dataclasses.replace(FIG3, surface_side=side)).as_array())
        values = np.array(values)
        assert np.all(np.diff(values, axis=0) < 0.0)

    def test_transverse_bounds_exceed_axial(self):
        crb = crb_cpl(FIG3)
        assert crb.crb_x < crb.crb_y
        assert crb.crb_x < crb.crb_z


class TestFisherMatrixType:
    def test_rejects_asymmetric(self):
        m = np.array([[1.0, 0.5, 0.0], [0.4, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            FisherMatrix(matrix=m, est_rel_error=0.0, panels_used=1)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            FisherMatrix(matrix=np.eye(2), est_rel_error=0.0, panels_used=1)

    def test_cpl_integrals_shape(self):
        ints = CplIntegrals(1, 2, 3, 4, 5, 6)
        assert ints.as_array().tolist() == [1, 2, 3, 4, 5, 6]
