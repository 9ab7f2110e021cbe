"""Scenario files: INI-style key-value sections, strictly validated.

A scenario file fully determines a run: the physical scenario, the
quadrature policy, and optionally a sweep or Monte Carlo section.  Unknown
sections or keys are rejected with the offending line number.  Missing
keys fall back to the shipped defaults (the reference configuration:
wavelength 0.01 m, unit source amplitude, sigma^2 = 10 V^2 so the SNR is
-10 dB, source 6 m in front of a 3 m x 3 m surface).
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

from .fieldmodel import DipoleScenario
from .quadrature import QuadratureConfig

_SCENARIO_KEYS = {
    "wavelength": float,
    "chi": complex,
    "x_c": float,
    "y_c": float,
    "z_c": float,
    "surface_side": float,
    "noise_sigma2": float,
    "dipole_length": float,
}
_QUADRATURE_KEYS = {
    "nodes_per_panel": int,
    "panels_per_axis": int,
    "target_rel_tol": float,
    "max_refinements": int,
}
_SWEEP_KEYS = {
    "variable": str,
    "minimum": float,
    "maximum": float,
    "points": int,
    "scale": str,
    "wavelengths": str,
}
_MC_KEYS = {
    "n_per_axis": int,
    "trials": int,
    "seed": int,
    "noise_sigma2": float,
    "search_half_width_x": float,
    "search_half_width_y": float,
    "search_half_width_z": float,
    "coarse_points": int,
    "model": str,
}
_SECTIONS = {
    "scenario": _SCENARIO_KEYS,
    "quadrature": _QUADRATURE_KEYS,
    "sweep": _SWEEP_KEYS,
    "montecarlo": _MC_KEYS,
}

_SWEEP_VARIABLES = ("surface_area", "distance")
_SWEEP_SCALES = ("log", "linear")


class ScenarioFileError(ValueError):
    """Malformed scenario file (syntax, unknown key, or bad value)."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "surface_area"
    minimum: float = 1.0
    maximum: float = 1e4
    points: int = 25
    scale: str = "log"
    wavelengths: tuple = ()

    def __post_init__(self):
        if self.variable not in _SWEEP_VARIABLES:
            raise ScenarioFileError(
                f"sweep variable must be one of {_SWEEP_VARIABLES}, got {self.variable!r}")
        if self.scale not in _SWEEP_SCALES:
            raise ScenarioFileError(
                f"sweep scale must be one of {_SWEEP_SCALES}, got {self.scale!r}")
        if not (0 < self.minimum < self.maximum):
            raise ScenarioFileError("sweep needs 0 < minimum < maximum")
        if self.points < 2:
            raise ScenarioFileError("sweep needs at least 2 points")


@dataclass(frozen=True)
class MonteCarloSpec:
    """Campaign configuration.

    Campaigns validate the bound in the asymptotic (high-SNR) regime, so
    they carry their own noise level rather than inheriting the sweep
    scenario's; the search box half-widths should stay a comfortable
    multiple of the expected per-coordinate standard deviations.
    """

    n_per_axis: int = 32
    trials: int = 500
    seed: int = 1234
    noise_sigma2: float = 0.01
    search_half_width_x: float = 5e-3
    search_half_width_y: float = 1e-2
    search_half_width_z: float = 1e-2
    coarse_points: int = 13
    model: str = "vector"

    def __post_init__(self):
        if self.model not in ("vector", "scalar"):
            raise ScenarioFileError("montecarlo model must be 'vector' or 'scalar'")
        if self.trials < 2:
            raise ScenarioFileError("montecarlo needs at least 2 trials")
        if self.noise_sigma2 <= 0:
            raise ScenarioFileError("montecarlo noise_sigma2 must be positive")

    @property
    def half_widths(self):
        return (self.search_half_width_x, self.search_half_width_y,
                self.search_half_width_z)


@dataclass(frozen=True)
class ScenarioBundle:
    """Everything a CLI command needs to run."""

    scenario: DipoleScenario
    quadrature: QuadratureConfig
    sweep: SweepSpec
    montecarlo: MonteCarloSpec

    def metadata(self):
        """Flat, ordered mapping of every effective setting."""
        s, q = self.scenario, self.quadrature
        sw, mc = self.sweep, self.montecarlo
        meta = {
            "scenario.wavelength": s.wavelength,
            "scenario.chi": s.chi,
            "scenario.x_c": s.x_c,
            "scenario.y_c": s.y_c,
            "scenario.z_c": s.z_c,
            "scenario.surface_side": s.surface_side,
            "scenario.noise_sigma2": s.noise_sigma2,
            "scenario.dipole_length": s.dipole_length,
            "scenario.snr": s.snr,
            "quadrature.nodes_per_panel": q.nodes_per_panel,
            "quadrature.panels_per_axis": q.panels_per_axis,
            "quadrature.target_rel_tol": q.target_rel_tol,
            "quadrature.max_refinements": q.max_refinements,
            "sweep.variable": sw.variable,
            "sweep.minimum": sw.minimum,
            "sweep.maximum": sw.maximum,
            "sweep.points": sw.points,
            "sweep.scale": sw.scale,
            "sweep.wavelengths": ",".join(repr(w) for w in sw.wavelengths),
            "montecarlo.n_per_axis": mc.n_per_axis,
            "montecarlo.trials": mc.trials,
            "montecarlo.seed": mc.seed,
            "montecarlo.noise_sigma2": mc.noise_sigma2,
            "montecarlo.search_half_width_x": mc.search_half_width_x,
            "montecarlo.search_half_width_y": mc.search_half_width_y,
            "montecarlo.search_half_width_z": mc.search_half_width_z,
            "montecarlo.coarse_points": mc.coarse_points,
            "montecarlo.model": mc.model,
        }
        return meta


def default_bundle():
    """The reference configuration used when no file is given."""
    return ScenarioBundle(
        scenario=DipoleScenario(
            wavelength=0.01,
            chi=1.0,
            source_position=(6.0, 0.0, 0.0),
            surface_side=3.0,
            noise_sigma2=10.0,
            dipole_length=0.005,
        ),
        quadrature=QuadratureConfig(),
        sweep=SweepSpec(),
        montecarlo=MonteCarloSpec(),
    )


def _line_of(text, section, key=None):
    """Best-effort line number of a section header or key in the raw text."""
    in_section = section is None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if key is None and name == section:
                return lineno
            in_section = (name == section)
        elif key is not None and in_section:
            head = stripped.split("=", 1)[0].split(":", 1)[0].strip().lower()
            if head == key:
                return lineno
    return None


def _convert(raw, typ, where):
    try:
        if typ is complex:
            return complex(raw.replace(" ", ""))
        return typ(raw)
    except ValueError as exc:
        raise ScenarioFileError(f"{where}: cannot parse {raw!r} as {typ.__name__}") from exc


def parse_scenario_text(text, source="<string>"):
    """Parse and validate scenario file contents into a bundle."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ScenarioFileError(f"{source}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTIONS:
            line = _line_of(text, section)
            raise ScenarioFileError(
                f"{source}:{line}: unknown section [{section}]")
        for key in parser[section]:
            if key not in _SECTIONS[section]:
                line = _line_of(text, section, key)
                raise ScenarioFileError(
                    f"{source}:{line}: unknown key {key!r} in [{section}]")

    def section_values(name, defaults):
        values = dict(defaults)
        if parser.has_section(name):
            for key, raw in parser[name].items():
                values[key] = _convert(raw, _SECTIONS[name][key], f"{source} [{name}] {key}")
        return values

    base = default_bundle()
    s = section_values("scenario", {
        "wavelength": base.scenario.wavelength,
        "chi": base.scenario.chi,
        "x_c": base.scenario.x_c,
        "y_c": base.scenario.y_c,
        "z_c": base.scenario.z_c,
        "surface_side": base.scenario.surface_side,
        "noise_sigma2": base.scenario.noise_sigma2,
        "dipole_length": base.scenario.dipole_length,
    })
    try:
        scenario = DipoleScenario(
            wavelength=s["wavelength"],
            chi=s["chi"],
            source_position=(s["x_c"], s["y_c"], s["z_c"]),
            surface_side=s["surface_side"],
            noise_sigma2=s["noise_sigma2"],
            dipole_length=s["dipole_length"],
        )
    except ValueError as exc:
        raise ScenarioFileError(f"{source} [scenario]: {exc}") from exc

    q = section_values("quadrature", {
        "nodes_per_panel": base.quadrature.nodes_per_panel,
        "panels_per_axis": base.quadrature.panels_per_axis,
        "target_rel_tol": base.quadrature.target_rel_tol,
        "max_refinements": base.quadrature.max_refinements,
    })
    try:
        quadrature = QuadratureConfig(**q)
    except ValueError as exc:
        raise ScenarioFileError(f"{source} [quadrature]: {exc}") from exc

    sw = section_values("sweep", {
        "variable": base.sweep.variable,
        "minimum": base.sweep.minimum,
        "maximum": base.sweep.maximum,
        "points": base.sweep.points,
        "scale": base.sweep.scale,
        "wavelengths": "",
    })
    raw_wl = sw.pop("wavelengths")
    if isinstance(raw_wl, str) and raw_wl.strip():
        try:
            wavelengths = tuple(float(tok) for tok in raw_wl.split(",") if tok.strip())
        except ValueError as exc:
            raise ScenarioFileError(
                f"{source} [sweep] wavelengths: cannot parse {raw_wl!r}") from exc
    else:
        wavelengths = ()
    sweep = SweepSpec(wavelengths=wavelengths, **sw)

    mc = section_values("montecarlo", {
        "n_per_axis": base.montecarlo.n_per_axis,
        "trials": base.montecarlo.trials,
        "seed": base.montecarlo.seed,
        "noise_sigma2": base.montecarlo.noise_sigma2,
        "search_half_width_x": base.montecarlo.search_half_width_x,
        "search_half_width_y": base.montecarlo.search_half_width_y,
        "search_half_width_z": base.montecarlo.search_half_width_z,
        "coarse_points": base.montecarlo.coarse_points,
        "model": base.montecarlo.model,
    })
    montecarlo = MonteCarloSpec(**mc)

    return ScenarioBundle(scenario=scenario, quadrature=quadrature,
                          sweep=sweep, montecarlo=montecarlo)


def parse_scenario_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_scenario_text(text, source=str(path))


def config_hash(metadata):
    """Hash of an ordered metadata mapping; identifies a run configuration."""
    canon = "\n".join(f"{k}={v!r}" for k, v in sorted(metadata.items()))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
