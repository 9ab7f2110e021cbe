"""Cross-validation suite: every closed form against an independent oracle.

Each check pairs a computation path with an oracle that does not share its
implementation: closed forms against quadrature of the defining integrals,
analytic Jacobians against central finite differences, the fast on-axis
bound path against the general assembled-matrix path, and the dipole field
closed forms against the radiation-pattern composition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform
from .closedform import RhoGeometry, i3_bounds, i5_bounds
from .fieldmodel import (
    DipoleScenario,
    SurfacePoint,
    cartesian_from_spherical,
    dipole_field,
    dipole_radiation_vector,
    field_from_radiation,
    spherical_from_cartesian,
)
from .fim import (
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
from .quadrature import QuadratureConfig

RHO_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)
SANDWICH_SLACK = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


def _rho_scenario(rho):
    # Unit wavenumber (lambda = 2 pi) and unit distance keep the integral
    # values O(1-10), so the absolute sandwich slack stays meaningful.
    return DipoleScenario(wavelength=2.0 * np.pi, chi=1.0,
                          source_position=(1.0, 0.0, 0.0),
                          surface_side=rho, noise_sigma2=1.0)


def check_i1_closed(cfg=None):
    cfg = cfg or QuadratureConfig()
    worst = 0.0
    for rho in RHO_GRID:
        scenario = _rho_scenario(rho)
        quad = cpl_integrals(scenario, cfg).i1
        closed = closedform.i1_closed(RhoGeometry.from_scenario(scenario))
        worst = max(worst, abs(quad / closed - 1.0))
    return CheckResult("i1_closed_vs_quadrature", worst <= 1e-8, worst, 1e-8,
                       f"max rel diff over rho {RHO_GRID}")


def check_i6_closed(cfg=None):
    cfg = cfg or QuadratureConfig()
    worst = 0.0
    for rho in RHO_GRID:
        scenario = _rho_scenario(rho)
        quad = cpl_integrals(scenario, cfg).i6
        closed = closedform.i6_closed(RhoGeometry.from_scenario(scenario))
        worst = max(worst, abs(quad / closed - 1.0))
    return CheckResult("i6_closed_vs_quadrature", worst <= 1e-8, worst, 1e-8,
                       f"max rel diff over rho {RHO_GRID}")


def _sandwich_margin(value, bounds):
    """Positive when lower < value <= upper (+slack); the margin is the
    worst signed distance to the admissible interval."""
    return min(value - bounds.lower, bounds.upper + SANDWICH_SLACK - value)


def check_i3_sandwich(cfg=None):
    cfg = cfg or QuadratureConfig()
    worst = np.inf
    for rho in RHO_GRID:
        scenario = _rho_scenario(rho)
        ints = cpl_integrals(scenario, cfg)
        g = RhoGeometry.from_scenario(scenario)
        worst = min(worst, _sandwich_margin(ints.i3, i3_bounds(g)))
    return CheckResult("i3_sandwich_bounds", worst > 0.0, worst, 0.0,
                       "worst signed margin inside (lower, upper]")


def check_i5_sandwich(cfg=None):
    cfg = cfg or QuadratureConfig()
    worst = np.inf
    for rho in RHO_GRID:
        scenario = _rho_scenario(rho)
        ints = cpl_integrals(scenario, cfg)
        g = RhoGeometry.from_scenario(scenario)
        worst = min(worst, _sandwich_margin(ints.i5, i5_bounds(g)))
    return CheckResult("i5_sandwich_bounds", worst > 0.0, worst, 0.0,
                       "worst signed margin inside (lower, upper]")


def _random_points(rng, n, half):
    return [SurfacePoint(y=float(rng.uniform(-half, half)),
                         z=float(rng.uniform(-half, half))) for _ in range(n)]


def check_vector_jacobian(seed=20260810, n_points=25):
    rng = np.random.default_rng(seed)
    scenario = DipoleScenario(wavelength=0.01, chi=1.0 + 0.4j,
                              source_position=(6.0, 0.25, -0.4),
                              surface_side=3.0, noise_sigma2=10.0)
    step = 1e-6 * scenario.wavelength
    worst = 0.0
    for p in _random_points(rng, n_points, scenario.half_side):
        analytic = field_jacobian_analytic(p, scenario)
        fd = field_jacobian_fd(p, scenario, step)
        worst = max(worst, float(np.max(np.abs(analytic - fd))
                                 / np.max(np.abs(analytic))))
    return CheckResult("vector_jacobian_vs_fd", worst <= 1e-6, worst, 1e-6,
                       f"{n_points} random points, step 1e-6 wavelength")


def check_scalar_jacobian(seed=20260811, n_points=25):
    rng = np.random.default_rng(seed)
    scenario = DipoleScenario(wavelength=0.01, chi=0.8,
                              source_position=(6.0, -0.2, 0.3),
                              surface_side=3.0, noise_sigma2=10.0)
    step = 1e-6 * scenario.wavelength
    worst = 0.0
    for p in _random_points(rng, n_points, scenario.half_side):
        analytic = scalar_jacobian_analytic(p, scenario)
        fd = scalar_jacobian_fd(p, scenario, step)
        worst = max(worst, float(np.max(np.abs(analytic - fd))
                                 / np.max(np.abs(analytic))))
    return CheckResult("scalar_jacobian_vs_fd", worst <= 1e-6, worst, 1e-6,
                       f"{n_points} random points, step 1e-6 wavelength")


_CPL_CHECK_SCENARIOS = (
    DipoleScenario(wavelength=0.05, source_position=(2.0, 0.0, 0.0),
                   surface_side=1.0, noise_sigma2=1.0),
    DipoleScenario(wavelength=0.01, source_position=(6.0, 0.0, 0.0),
                   surface_side=3.0, noise_sigma2=10.0),
)


def check_cpl_diagonality(cfg=None):
    worst = 0.0
    for scenario in _CPL_CHECK_SCENARIOS:
        f = fim_vector_field(scenario, cfg).matrix
        off = np.max(np.abs(f - np.diag(np.diag(f))))
        worst = max(worst, float(off / np.max(np.diag(f))))
    return CheckResult("cpl_fim_diagonality", worst <= 1e-10, worst, 1e-10,
                       "off-diagonal over max diagonal, vector model")


def check_scalar_diagonality(cfg=None):
    worst = 0.0
    for scenario in _CPL_CHECK_SCENARIOS:
        f = fim_scalar_field(scenario, cfg).matrix
        off = np.max(np.abs(f - np.diag(np.diag(f))))
        worst = max(worst, float(off / np.max(np.diag(f))))
    return CheckResult("cpl_scalar_fim_diagonality", worst <= 1e-10, worst, 1e-10,
                       "off-diagonal over max diagonal, scalar model")


def check_lemma_path(cfg=None):
    worst = 0.0
    for scenario in _CPL_CHECK_SCENARIOS:
        fast = crb_cpl(scenario, cfg).as_array()
        general = crb_from_fim(fim_vector_field(scenario, cfg)).as_array()
        worst = max(worst, float(np.max(np.abs(fast / general - 1.0))))
    return CheckResult("cpl_fast_path_vs_general_fim", worst <= 1e-8, worst, 1e-8,
                       "bound triple, fast on-axis path vs assembled matrix")


def check_field_path(seed=20260812, n_points=10):
    rng = np.random.default_rng(seed)
    scenario = DipoleScenario.from_antenna(
        wavelength=0.01, current=1.0, dipole_length=0.005,
        source_position=(6.0, 0.0, 0.0), surface_side=3.0, noise_sigma2=10.0)
    worst = 0.0
    for p in _random_points(rng, n_points, scenario.half_side):
        direct = dipole_field(p, scenario).as_array()
        sc = spherical_from_cartesian(p, scenario.source_position)
        r_th, r_ph = dipole_radiation_vector(
            sc.theta, scenario.dipole_length, 1.0)
        via = field_from_radiation(sc, r_th, r_ph, scenario.wavenumber).as_array()
        worst = max(worst, float(np.max(np.abs(direct - via))
                                 / np.max(np.abs(direct))))
    return CheckResult("dipole_field_vs_radiation_path", worst <= 1e-12, worst, 1e-12,
                       f"{n_points} random points")


def check_round_trip(seed=20260813, n_points=20):
    rng = np.random.default_rng(seed)
    source = (4.0, 0.7, -1.1)
    worst = 0.0
    for _ in range(n_points):
        p = SurfacePoint(y=float(rng.uniform(-2, 2)), z=float(rng.uniform(-2, 2)))
        sc = spherical_from_cartesian(p, source)
        back = cartesian_from_spherical(sc, source)
        scale = max(abs(p.y), abs(p.z), 1.0)
        worst = max(worst, abs(back.y - p.y) / scale, abs(back.z - p.z) / scale)
    return CheckResult("spherical_round_trip", worst <= 1e-12, worst, 1e-12,
                       f"{n_points} random points")


def check_fim_psd(cfg=None):
    scenario = DipoleScenario(wavelength=0.05, source_position=(2.0, 0.3, -0.2),
                              surface_side=1.5, noise_sigma2=2.0)
    f = fim_vector_field(scenario, cfg).matrix
    eigvals = np.linalg.eigvalsh(f)
    margin = float(eigvals[0] / np.trace(f))
    return CheckResult("fim_positive_semidefinite", margin >= -1e-12, margin, -1e-12,
                       "smallest eigenvalue over trace, off-axis scenario")


ALL_CHECKS = (
    check_i1_closed,
    check_i6_closed,
    check_i3_sandwich,
    check_i5_sandwich,
    check_vector_jacobian,
    check_scalar_jacobian,
    check_cpl_diagonality,
    check_scalar_diagonality,
    check_lemma_path,
    check_field_path,
    check_round_trip,
    check_fim_psd,
)


def run_validation_checks():
    """Run every check; returns the list of results in a fixed order."""
    return [check() for check in ALL_CHECKS]
