"""Cramer-Rao bounds for near-field localization of a z-oriented dipole.

The electric vector field radiated by a short dipole is observed, with
additive white complex Gaussian noise, over a square surface of side L.
This package evaluates the Fisher information of the three source
coordinates and the resulting position bounds, both by direct numerical
integration of the field Jacobians and through closed-form expressions
and sandwich bounds valid on the central perpendicular line, and
validates the bounds against a maximum-likelihood Monte Carlo estimator.
"""

__version__ = "0.1.0"

from .fieldmodel import (
    FREE_SPACE_IMPEDANCE,
    DipoleScenario,
    FieldVector,
    SphericalCoords,
    SurfacePoint,
    dipole_field,
    dipole_radiation_vector,
    far_field_check,
    field_from_radiation,
    green_scalar,
    radiation_vector_numeric,
    scalar_poynting_field,
    scalar_poynting_from_radiation,
    spherical_from_cartesian,
)
from .quadrature import IntegralResult, IntegrationError, QuadratureConfig, integrate_2d
from .fim import (
    CplIntegrals,
    CrbTriple,
    FisherMatrix,
    IllConditionedFisherError,
    cpl_integrals,
    crb_cpl,
    crb_from_fim,
    field_jacobian_analytic,
    field_jacobian_fd,
    fim_scalar_field,
    fim_vector_field,
)
from .closedform import (
    AsymptoticLimits,
    IntegralBounds,
    LargeDistanceApprox,
    RhoGeometry,
    asymptotic_limits,
    crb_approx_large_xc,
    i1_closed,
    i3_bounds,
    i5_bounds,
    i6_closed,
)
from .montecarlo import (
    McReport,
    MlEstimate,
    NoisyObservation,
    SearchSpec,
    SurfaceGrid,
    expected_curvature_fim,
    loglikelihood,
    mle_estimate,
    run_campaign,
    sample_observation,
)

__all__ = [
    "FREE_SPACE_IMPEDANCE",
    "DipoleScenario",
    "FieldVector",
    "SphericalCoords",
    "SurfacePoint",
    "dipole_field",
    "dipole_radiation_vector",
    "far_field_check",
    "field_from_radiation",
    "green_scalar",
    "radiation_vector_numeric",
    "scalar_poynting_field",
    "scalar_poynting_from_radiation",
    "spherical_from_cartesian",
    "IntegralResult",
    "IntegrationError",
    "QuadratureConfig",
    "integrate_2d",
    "CplIntegrals",
    "CrbTriple",
    "FisherMatrix",
    "IllConditionedFisherError",
    "cpl_integrals",
    "crb_cpl",
    "crb_from_fim",
    "field_jacobian_analytic",
    "field_jacobian_fd",
    "fim_scalar_field",
    "fim_vector_field",
    "AsymptoticLimits",
    "IntegralBounds",
    "LargeDistanceApprox",
    "RhoGeometry",
    "asymptotic_limits",
    "crb_approx_large_xc",
    "i1_closed",
    "i3_bounds",
    "i5_bounds",
    "i6_closed",
    "McReport",
    "MlEstimate",
    "NoisyObservation",
    "SearchSpec",
    "SurfaceGrid",
    "expected_curvature_fim",
    "loglikelihood",
    "mle_estimate",
    "run_campaign",
    "sample_observation",
]
