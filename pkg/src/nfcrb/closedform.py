"""Closed forms, sandwich bounds, and asymptotic limits for the CPL bounds.

The aperture ratio rho = L/x_C controls everything here.  The closed-form
and bound expressions are stated in terms of the half-aperture ratio
q = L/(2 x_C) = rho/2: evaluated that way they reproduce the defining
integrals over [-L/2, L/2]^2 to quadrature accuracy, which is the
correctness criterion used throughout this package (see the package's
validation suite).

Limits for a fixed source distance as the surface grows:

    CRB(x_C) -> SNR^-1 lambda^2 / (3 pi^3)
    CRB(y_C) ~  SNR^-1 lambda^2 / (3 pi^3 ln rho)
    CRB(z_C) ~  SNR^-1 lambda^2 / (pi^3 ln rho)
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RhoGeometry:
    """Aperture geometry: rho = L/x_C, plus the wavenumber and distance."""

    rho: float
    k: float
    x_c: float

    def __post_init__(self):
        if self.rho <= 0 or self.k <= 0 or self.x_c <= 0:
            raise ValueError("rho, k and x_c must all be positive")

    @classmethod
    def from_scenario(cls, scenario):
        return cls(rho=scenario.surface_side / scenario.x_c,
                   k=scenario.wavenumber, x_c=scenario.x_c)

    @property
    def surface_side(self):
        return self.rho * self.x_c


@dataclass(frozen=True)
class IntegralBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"bounds must satisfy lower < upper, got {self.lower}, {self.upper}")

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class LargeDistanceApprox:
    """Approximate bounds for x_C >> lambda, with the bracket reported.

    crb_y is the midpoint of [crb_y_lower, crb_y_upper]; the bracket stems
    from the sandwich bounds on the transverse information integral.
    ``gate_ok`` is False when the distance-to-wavelength gate failed; the
    values are still returned.
    """

    crb_x: float
    crb_y: float
    crb_y_lower: float
    crb_y_upper: float
    bracket_width: float
    gate_ok: bool


@dataclass(frozen=True)
class AsymptoticLimits:
    """Large-aperture limits: CRB(x) -> limit_x; CRB(y/z) ~ coeff/(ln rho)."""

    limit_x: float
    coeff_y: float
    coeff_z: float


def _i1_expr(q):
    """Closed form of the axial phase integral at half-aperture ratio q."""
    q2 = q * q
    s = math.sqrt(1.0 + q2)
    return (q / (2.0 * (1.0 + q2))) * (
        (7.0 + 6.0 * q2) / s * math.atan(q / s) + q / (1.0 + 2.0 * q2))


def _i6_expr(q):
    """Closed form of x_C^2 times the axial amplitude integral."""
    q2 = q * q
    s = math.sqrt(1.0 + q2)
    t1 = q * (18.0 * q2 * q2 + 38.0 * q2 + 17.0) / (4.0 * (1.0 + q2) ** 2.5) \
        * math.atan(q / s)
    t2 = q2 * (6.0 * q2 * q2 + 2.0 * q2 - 1.0) / (
        4.0 * (1.0 + q2) ** 2 * (1.0 + 2.0 * q2) ** 2)
    return t1 + t2


def _i3_lower_expr(q):
    q2 = q * q
    return (3.0 * math.pi / 8.0) * math.log1p(q2) \
        - (math.pi / 16.0) * q2 * (5.0 * q2 + 6.0) / (1.0 + q2) ** 2


def _i3_upper_expr(q):
    q2 = q * q
    return (3.0 * math.pi / 8.0) * math.log1p(2.0 * q2) \
        - (math.pi / 4.0) * q2 * (5.0 * q2 + 3.0) / (1.0 + 2.0 * q2) ** 2


def _i5_lower_expr(q):
    q2 = q * q
    return (math.pi / 8.0) * math.log1p(q2) \
        + (math.pi / 16.0) * q2 * (q2 - 2.0) / (1.0 + q2) ** 2


def _i5_upper_expr(q):
    q2 = q * q
    return (math.pi / 8.0) * math.log1p(2.0 * q2) \
        + (math.pi / 4.0) * q2 * (q2 - 1.0) / (1.0 + 2.0 * q2) ** 2


def i1_closed(g):
    """Exact value of the axial phase integral (matches quadrature of the
    defining integrand to the quadrature tolerance)."""
    return g.k ** 2 * _i1_expr(0.5 * g.rho)


def i6_closed(g):
    """Exact value of the axial amplitude integral."""
    return _i6_expr(0.5 * g.rho) / (g.x_c * g.x_c)


def i3_bounds(g):
    """Sandwich bounds for the transverse (y) phase integral."""
    q = 0.5 * g.rho
    k2 = g.k ** 2
    return IntegralBounds(lower=k2 * _i3_lower_expr(q), upper=k2 * _i3_upper_expr(q))


def i5_bounds(g):
    """Sandwich bounds for the transverse (z) phase integral."""
    q = 0.5 * g.rho
    k2 = g.k ** 2
    return IntegralBounds(lower=k2 * _i5_lower_expr(q), upper=k2 * _i5_upper_expr(q))


def crb_approx_large_xc(scenario, geometry=None, min_distance_wavelengths=100.0):
    """Approximate CRB(x_C) and CRB(y_C) for distances many wavelengths out.

    Drops the amplitude integrals (they are smaller than the phase
    integrals by order (lambda/x_C)^2) and uses the closed form for the
    axial integral and the bound midpoint for the transverse one.
    """
    g = geometry or RhoGeometry.from_scenario(scenario)
    gate_ok = scenario.x_c >= min_distance_wavelengths * scenario.wavelength
    inv_snr = 1.0 / scenario.snr
    crb_x = inv_snr / i1_closed(g)
    bounds = i3_bounds(g)
    crb_y_lower = inv_snr / bounds.upper
    crb_y_upper = inv_snr / bounds.lower
    return LargeDistanceApprox(
        crb_x=crb_x,
        crb_y=0.5 * (crb_y_lower + crb_y_upper),
        crb_y_lower=crb_y_lower,
        crb_y_upper=crb_y_upper,
        bracket_width=crb_y_upper - crb_y_lower,
        gate_ok=gate_ok,
    )


def asymptotic_limits(wavelength, snr):
    """Large-aperture limit of CRB(x_C) and the ln-rho coefficients.

    Callers evaluate the transverse asymptotes as coeff / ln(rho).
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if snr <= 0:
        raise ValueError("snr must be positive")
    lam2 = wavelength * wavelength
    pi3 = math.pi ** 3
    return AsymptoticLimits(
        limit_x=lam2 / (3.0 * pi3 * snr),
        coeff_y=lam2 / (3.0 * pi3 * snr),
        coeff_z=lam2 / (pi3 * snr),
    )
