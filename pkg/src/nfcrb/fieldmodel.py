"""Electric field of a z-oriented dipole over a planar observation surface.

Geometry: the observation surface is the square |y| <= L/2, |z| <= L/2 in
the plane x = 0; the dipole center sits at (x_C, y_C, z_C) with x_C > 0.
All field quantities are monochromatic phasors.  Spherical coordinates of
a surface point relative to the source use the polar angle theta measured
from the +z axis and an azimuth phi measured in the xy-plane around the
source-to-surface look direction, so that

    r       = sqrt(x_C^2 + (y - y_C)^2 + (z - z_C)^2)
    cos(th) = (z - z_C)/r
    tan(ph) = -(y - y_C)/x_C,   ph in (-pi/2, pi/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# Characteristic impedance of free space, ohms.
FREE_SPACE_IMPEDANCE = 376.730313668


@dataclass(frozen=True)
class DipoleScenario:
    """Full problem instance for one bound evaluation.

    Parameters
    ----------
    wavelength : float
        Wavelength lambda in meters.
    chi : complex
        Source amplitude in volts.  For a short dipole fed with uniform
        current ``i_in`` it equals ``eta * i_in * l_s / (2 * wavelength)``;
        see :meth:`from_antenna`.
    source_position : tuple of float
        (x_C, y_C, z_C) in meters; x_C > 0 puts the source in front of
        the surface.
    surface_side : float
        Side L of the square observation surface, meters.
    noise_sigma2 : float
        Noise spectral level sigma^2, V^2.
    dipole_length : float
        Physical dipole length l_s in meters; only used by the far-field
        validity check.
    """

    wavelength: float
    chi: complex = 1.0 + 0.0j
    source_position: tuple[float, float, float] = (1.0, 0.0, 0.0)
    surface_side: float = 1.0
    noise_sigma2: float = 1.0
    dipole_length: float = 0.0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.surface_side <= 0:
            raise ValueError(f"surface_side must be positive, got {self.surface_side}")
        if self.noise_sigma2 <= 0:
            raise ValueError(f"noise_sigma2 must be positive, got {self.noise_sigma2}")
        if self.dipole_length < 0:
            raise ValueError("dipole_length must be nonnegative")
        pos = tuple(float(c) for c in self.source_position)
        if len(pos) != 3:
            raise ValueError("source_position must have three components")
        if pos[0] <= 0:
            raise ValueError(f"source must lie in front of the surface (x_C > 0), got x_C={pos[0]}")
        object.__setattr__(self, "source_position", pos)
        object.__setattr__(self, "chi", complex(self.chi))

    @classmethod
    def from_antenna(cls, wavelength, current, dipole_length,
                     eta=FREE_SPACE_IMPEDANCE, **kwargs):
        """Build a scenario from feed current and dipole length.

        The source amplitude is chi = eta * current * dipole_length /
        (2 * wavelength), in volts.
        """
        chi = eta * current * dipole_length / (2.0 * wavelength)
        return cls(wavelength=wavelength, chi=chi,
                   dipole_length=dipole_length, **kwargs)

    @property
    def wavenumber(self):
        """k = 2 pi / lambda, rad/m.  Derived, never stored."""
        return 2.0 * math.pi / self.wavelength

    @property
    def x_c(self):
        return self.source_position[0]

    @property
    def y_c(self):
        return self.source_position[1]

    @property
    def z_c(self):
        return self.source_position[2]

    @property
    def half_side(self):
        return 0.5 * self.surface_side

    @property
    def snr(self):
        """|chi|^2 / sigma^2, dimensionless."""
        return abs(self.chi) ** 2 / self.noise_sigma2

    @property
    def is_cpl(self):
        """True when the source sits on the central perpendicular line."""
        return self.y_c == 0.0 and self.z_c == 0.0


@dataclass(frozen=True)
class SurfacePoint:
    """Observation point (y, z) on the surface plane x = 0."""

    y: float
    z: float


@dataclass(frozen=True)
class SphericalCoords:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"radial distance must be positive, got {self.r}")


@dataclass(frozen=True)
class FieldVector:
    """Complex Cartesian components of the electric field, V/m."""

    ex: complex
    ey: complex
    ez: complex

    def as_array(self):
        return np.array([self.ex, self.ey, self.ez])

    def norm(self):
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class FarFieldReport:
    """Outcome of the Fraunhofer-region validity check.

    Margins are ratios of the source-to-surface distance to the scaled
    thresholds; both must be >= 1 for the radiating-region approximation
    to hold at the requested strictness.
    """

    valid: bool
    margin_size: float
    margin_fraunhofer: float
    r_o: float
    strict_factor: float = 10.0


def spherical_from_cartesian(p, source_position):
    """Spherical coordinates of surface point ``p`` as seen from the source.

    Returns (r, theta, phi) with cos(theta) = (z - z_C)/r and
    tan(phi) = -(y - y_C)/x_C.  Since x_C > 0, phi lies in (-pi/2, pi/2).
    """
    x_c, y_c, z_c = source_position
    u = p.y - y_c
    v = p.z - z_c
    r = math.sqrt(x_c * x_c + u * u + v * v)
    if r == 0.0:
        raise ValueError("observation point coincides with the source")
    theta = math.acos(max(-1.0, min(1.0, v / r)))
    phi = math.atan2(-u, x_c)
    return SphericalCoords(r=r, theta=theta, phi=phi)


def cartesian_from_spherical(sc, source_position):
    """Inverse of :func:`spherical_from_cartesian` (round-trip check)."""
    x_c, y_c, z_c = source_position
    rho_perp = sc.r * math.sin(sc.theta)
    u = -rho_perp * math.sin(sc.phi)
    v = sc.r * math.cos(sc.theta)
    return SurfacePoint(y=y_c + u, z=z_c + v)


def green_scalar(r, k, eta=FREE_SPACE_IMPEDANCE):
    """Scalar Green's function -j k eta exp(-j k r) / (4 pi r)."""
    if r <= 0:
        raise ValueError(f"radial distance must be positive, got {r}")
    return -1j * k * eta * cmath.exp(-1j * k * r) / (4.0 * math.pi * r)


def dipole_radiation_vector(theta, dipole_length, current):
    """Angular radiation pattern of a short z-oriented dipole.

    Returns the polar and azimuthal components (R_theta, R_phi) =
    (l_s * i_in * sin(theta), 0).
    """
    return dipole_length * current * np.sin(theta), 0.0 * np.asarray(theta)


def radiation_vector_numeric(points, weights, currents, theta, phi, k):
    """Radiation vector of a sampled current distribution.

    Evaluates sum_i w_i j_i exp(j k r_hat . s_i) where r_hat is the unit
    vector from the source centroid toward the observation direction
    (theta, phi), i.e. r_hat = (-sin th cos ph, sin th sin ph, cos th)
    in surface-frame axes.

    Parameters
    ----------
    points : (n, 3) array
        Sample locations s_i in the source region, meters.
    weights : (n,) array
        Quadrature weights (volume/length elements).
    currents : (n, 3) array
        Complex current density at each sample.
    theta, phi : float
        Observation direction.
    k : float
        Wavenumber, rad/m.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    currents = np.atleast_2d(np.asarray(currents, dtype=complex))
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("empty current sample set")
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    r_hat = np.array([-st * cp, st * sp, ct])
    phase = np.exp(1j * k * (points @ r_hat))
    return np.sum(weights[:, None] * currents * phase[:, None], axis=0)


def project_radiation(r_cart, theta, phi):
    """Polar/azimuthal components of a Cartesian radiation vector.

    Uses the basis in which a z-directed element projects to
    R_theta = R_z sin(theta):  th_hat = (cos th cos ph, cos th sin ph,
    sin th), ph_hat = (-sin ph, cos ph, 0).
    """
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    th_hat = np.array([ct * cp, ct * sp, st])
    ph_hat = np.array([-sp, cp, 0.0])
    r_cart = np.asarray(r_cart)
    return complex(r_cart @ th_hat), complex(r_cart @ ph_hat)


def line_current_samples(dipole_length, current, n):
    """Midpoint sampling of a uniform z-directed line current of length l_s."""
    if n < 1:
        raise ValueError("need at least one sample")
    h = dipole_length / n
    zs = -0.5 * dipole_length + h * (np.arange(n) + 0.5)
    points = np.zeros((n, 3))
    points[:, 2] = zs
    weights = np.full(n, h)
    currents = np.zeros((n, 3), dtype=complex)
    currents[:, 2] = current
    return points, weights, currents


def field_from_radiation(sc, r_theta, r_phi, k, eta=FREE_SPACE_IMPEDANCE):
    """Cartesian field components from the angular radiation pattern.

    The polar/azimuthal basis here is oriented opposite to the one used by
    :func:`project_radiation`; with the pattern of a z-oriented dipole
    (R_theta = l_s i_in sin th) this reproduces the closed-form components
    of :func:`dipole_field` identically.
    """
    g = green_scalar(sc.r, k, eta)
    st, ct = math.sin(sc.theta), math.cos(sc.theta)
    sp, cp = math.sin(sc.phi), math.cos(sc.phi)
    ex = -g * (r_theta * ct * cp - r_phi * sp)
    ey = -g * (r_theta * ct * sp + r_phi * cp)
    ez = -g * r_theta * st
    return FieldVector(ex=complex(ex), ey=complex(ey), ez=complex(ez))


def field_components(y, z, scenario):
    """Vectorized dipole field on the surface.

    Parameters
    ----------
    y, z : array_like
        Surface coordinates, broadcast together.
    scenario : DipoleScenario

    Returns
    -------
    ndarray, shape (3,) + broadcast shape
        Complex (e_x, e_y, e_z) at each point.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    u = y - scenario.y_c
    v = z - scenario.z_c
    x_c = scenario.x_c
    r2 = x_c * x_c + u * u + v * v
    r = np.sqrt(r2)
    if np.any(r == 0.0):
        raise ValueError("observation point coincides with the source")
    k = scenario.wavenumber
    c = 1j * scenario.chi * np.exp(-1j * k * r) / (r2 * r)
    return np.stack(np.broadcast_arrays(
        c * x_c * v,
        -c * u * v,
        c * (x_c * x_c + u * u),
    ))


def dipole_field(p, scenario):
    """Field of the z-oriented dipole at one surface point.

    Closed forms (u = y - y_C, v = z - z_C):

        e_x =  j chi exp(-jkr) x_C v / r^3
        e_y = -j chi exp(-jkr) u v / r^3
        e_z =  j chi (exp(-jkr)/r) [1 - v^2/r^2]
    """
    ex, ey, ez = field_components(p.y, p.z, scenario)
    return FieldVector(ex=complex(ex), ey=complex(ey), ez=complex(ez))


def scalar_field_components(y, z, scenario):
    """Vectorized power-flux scalar observable on the surface.

    E = chi exp(-jkr) r^(-5/2) sqrt(x_C [x_C^2 + (y - y_C)^2]).
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    u = y - scenario.y_c
    v = z - scenario.z_c
    x_c = scenario.x_c
    w = x_c * x_c + u * u
    r2 = w + v * v
    r = np.sqrt(r2)
    if np.any(r == 0.0):
        raise ValueError("observation point coincides with the source")
    radicand = x_c * w
    if np.any(radicand < 0.0):
        raise ValueError("negative radicand in scalar field (x_C must be positive)")
    k = scenario.wavenumber
    return scenario.chi * np.exp(-1j * k * r) * np.sqrt(radicand) / (r2 * np.sqrt(r))


def scalar_poynting_field(p, scenario):
    """Scalar observable proportional to the normal power flux at ``p``.

    Reduction of the general form (see
    :func:`scalar_poynting_from_radiation`) for the z-oriented dipole.
    """
    return complex(scalar_field_components(p.y, p.z, scenario))


def scalar_poynting_from_radiation(sc, r_theta, r_phi, k, eta=FREE_SPACE_IMPEDANCE):
    """General power-flux scalar field for an arbitrary radiation pattern.

    E = k eta exp(-jkr) sqrt(x_C) / (4 pi r^(3/2)) * sqrt(R_th^2 + R_ph^2),
    with x_C recovered from the look geometry as r sin(th) cos(ph).
    """
    x_c = sc.r * math.sin(sc.theta) * math.cos(sc.phi)
    if x_c < 0:
        raise ValueError("geometry has nonpositive perpendicular distance")
    amp = cmath.sqrt(r_theta * r_theta + r_phi * r_phi)
    return (k * eta * cmath.exp(-1j * k * sc.r) * math.sqrt(x_c)
            / (4.0 * math.pi * sc.r ** 1.5) * amp)


def far_field_check(scenario, strict_factor=10.0):
    """Check that the surface lies in the radiating region of the source.

    Requires r_o >= strict_factor * l_s and r_o >= strict_factor *
    2 l_s^2 / lambda, where r_o is the distance from the source center to
    the nearest point of the surface.  Reports margins instead of raising.
    """
    x_c, y_c, z_c = scenario.source_position
    half = scenario.half_side
    dy = max(0.0, abs(y_c) - half)
    dz = max(0.0, abs(z_c) - half)
    r_o = math.sqrt(x_c * x_c + dy * dy + dz * dz)
    l_s = scenario.dipole_length
    size_threshold = strict_factor * l_s
    fraunhofer_threshold = strict_factor * 2.0 * l_s * l_s / scenario.wavelength
    margin_size = math.inf if size_threshold == 0 else r_o / size_threshold
    margin_fraunhofer = math.inf if fraunhofer_threshold == 0 else r_o / fraunhofer_threshold
    return FarFieldReport(
        valid=(margin_size >= 1.0 and margin_fraunhofer >= 1.0),
        margin_size=margin_size,
        margin_fraunhofer=margin_fraunhofer,
        r_o=r_o,
        strict_factor=strict_factor,
    )
