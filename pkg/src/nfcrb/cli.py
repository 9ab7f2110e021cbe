"""Command-line driver: sweeps, validation, and Monte Carlo campaigns.

Subcommands
-----------
sweep-area      Bounds versus surface area at fixed source distance.
sweep-distance  Bounds versus source distance at fixed surface size.
validate        Run the oracle cross-check suite; nonzero exit on failure.
montecarlo      ML estimation campaign against the computed bounds.

Every command accepts ``--scenario FILE`` (INI-style; missing keys take
the shipped defaults) and ``--out DIR``.  CSV files carry the full
effective configuration in ``#`` metadata lines; figures are rendered as
SVG next to them.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .closedform import asymptotic_limits, crb_approx_large_xc
from .fim import crb_cpl, crb_from_fim, fim_scalar_field
from .montecarlo import SearchSpec, SurfaceGrid, run_campaign
from .report import (
    plot_area_sweep,
    plot_distance_sweep,
    plot_montecarlo,
    write_csv,
)
from .scenario_io import ScenarioFileError, default_bundle, parse_scenario_file
from .validate import run_validation_checks


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nfcrb",
        description="Position-estimation bounds for a dipole source "
                    "observed over a planar surface.")
    parser.add_argument("--version", action="version", version=f"nfcrb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", metavar="FILE",
                       help="scenario file (INI sections; defaults used when omitted)")
        p.add_argument("--out", metavar="DIR", default="nfcrb-out",
                       help="output directory (default: %(default)s)")

    p_area = sub.add_parser("sweep-area", help="bounds versus surface area")
    add_common(p_area)
    p_area.add_argument("--compare-scalar", action="store_true",
                        help="add scalar power-flux model columns")
    p_area.add_argument("--closed-form", action="store_true",
                        help="add closed-form approximation columns")

    p_dist = sub.add_parser("sweep-distance", help="bounds versus source distance")
    add_common(p_dist)
    p_dist.add_argument("--compare-scalar", action="store_true",
                        help="add scalar power-flux model columns")
    p_dist.add_argument("--closed-form", action="store_true",
                        help="add closed-form approximation columns")

    p_val = sub.add_parser("validate", help="run the oracle cross-check suite")
    add_common(p_val)

    p_mc = sub.add_parser("montecarlo", help="ML campaign against the bounds")
    add_common(p_mc)
    p_mc.add_argument("--trials", type=int, metavar="N",
                      help="number of trials (overrides scenario file)")
    p_mc.add_argument("--seed", type=int, metavar="N",
                      help="campaign seed (overrides scenario file)")
    return parser


def _load_bundle(args):
    if args.scenario:
        return parse_scenario_file(args.scenario)
    return default_bundle()


def _sweep_grid(spec):
    if spec.scale == "log":
        return np.geomspace(spec.minimum, spec.maximum, spec.points)
    return np.linspace(spec.minimum, spec.maximum, spec.points)


def _require_cpl(scenario, command):
    if not scenario.is_cpl:
        raise ScenarioFileError(
            f"{command} requires a source on the central perpendicular line "
            f"(y_c = z_c = 0); got y_c={scenario.y_c}, z_c={scenario.z_c}")


def _scalar_crbs(scenario, cfg):
    return crb_from_fim(fim_scalar_field(scenario, cfg)).as_array()


def cmd_sweep_area(args):
    bundle = _load_bundle(args)
    scenario, cfg = bundle.scenario, bundle.quadrature
    _require_cpl(scenario, "sweep-area")
    spec = bundle.sweep
    if spec.variable != "surface_area":
        raise ScenarioFileError(
            "sweep-area needs sweep.variable = surface_area "
            f"(scenario file says {spec.variable!r})")
    areas = _sweep_grid(spec)
    limits = asymptotic_limits(scenario.wavelength, scenario.snr)

    header = ["surface_area_m2", "crb_x_m2", "crb_y_m2", "crb_z_m2"]
    if args.compare_scalar:
        header += ["scalar_crb_x_m2", "scalar_crb_y_m2", "scalar_crb_z_m2"]
    if args.closed_form:
        header += ["cf_crb_x_m2", "cf_crb_y_m2", "cf_crb_y_lower_m2", "cf_crb_y_upper_m2"]
    header.append("crb_x_asymptote_m2")

    rows = []
    for area in areas:
        point = dataclasses.replace(scenario, surface_side=float(np.sqrt(area)))
        crb = crb_cpl(point, cfg)
        row = [float(area), crb.crb_x, crb.crb_y, crb.crb_z]
        if args.compare_scalar:
            row.extend(_scalar_crbs(point, cfg))
        if args.closed_form:
            approx = crb_approx_large_xc(point)
            row.extend([approx.crb_x, approx.crb_y,
                        approx.crb_y_lower, approx.crb_y_upper])
        row.append(limits.limit_x)
        rows.append(row)

    meta = dict(bundle.metadata())
    meta.update({"command": "sweep-area",
                 "compare_scalar": args.compare_scalar,
                 "closed_form": args.closed_form})
    csv_path = os.path.join(args.out, "area_sweep.csv")
    write_csv(csv_path, header, rows, meta)
    svg_path = plot_area_sweep(os.path.join(args.out, "area_sweep.svg"), header, rows)
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


def cmd_sweep_distance(args):
    bundle = _load_bundle(args)
    scenario, cfg = bundle.scenario, bundle.quadrature
    _require_cpl(scenario, "sweep-distance")
    spec = bundle.sweep
    if spec.variable == "distance":
        distances = _sweep_grid(spec)
    else:
        # The shipped default sweep section is an area sweep; use the
        # reference distance grid unless the file asks for distance.
        distances = np.geomspace(0.3, 12.0, 20)
    wavelengths = spec.wavelengths or (scenario.wavelength, 0.1 * scenario.wavelength)

    header = ["wavelength_m", "distance_m", "crb_x_m2", "crb_y_m2", "crb_z_m2"]
    if args.compare_scalar:
        header += ["scalar_crb_x_m2", "scalar_crb_y_m2", "scalar_crb_z_m2"]
    if args.closed_form:
        header += ["cf_crb_x_m2", "cf_crb_y_m2", "cf_crb_y_lower_m2", "cf_crb_y_upper_m2"]

    rows = []
    for lam in sorted(wavelengths):
        for dist in distances:
            point = dataclasses.replace(
                scenario, wavelength=float(lam),
                source_position=(float(dist), 0.0, 0.0))
            crb = crb_cpl(point, cfg)
            row = [float(lam), float(dist), crb.crb_x, crb.crb_y, crb.crb_z]
            if args.compare_scalar:
                row.extend(_scalar_crbs(point, cfg))
            if args.closed_form:
                approx = crb_approx_large_xc(point)
                row.extend([approx.crb_x, approx.crb_y,
                            approx.crb_y_lower, approx.crb_y_upper])
            rows.append(row)

    meta = dict(bundle.metadata())
    meta.update({"command": "sweep-distance",
                 "compare_scalar": args.compare_scalar,
                 "closed_form": args.closed_form})
    csv_path = os.path.join(args.out, "distance_sweep.csv")
    write_csv(csv_path, header, rows, meta)
    svg_path = plot_distance_sweep(os.path.join(args.out, "distance_sweep.svg"),
                                   header, rows)
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


def cmd_validate(args):
    bundle = _load_bundle(args)
    results = run_validation_checks()
    header = ["check", "passed", "measured", "tolerance", "detail"]
    rows = [[r.name, bool(r.passed), float(r.measured), float(r.tolerance), r.detail]
            for r in results]
    meta = dict(bundle.metadata())
    meta["command"] = "validate"
    csv_path = os.path.join(args.out, "validation_report.csv")
    write_csv(csv_path, header, rows, meta)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}: measured={r.measured:.3e} "
              f"tolerance={r.tolerance:.3e}  ({r.detail})")
        failures += 0 if r.passed else 1
    print(f"wrote {csv_path}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def cmd_montecarlo(args):
    bundle = _load_bundle(args)
    scenario, cfg = bundle.scenario, bundle.quadrature
    mc = bundle.montecarlo
    trials = args.trials if args.trials is not None else mc.trials
    seed = args.seed if args.seed is not None else mc.seed
    # Campaigns run at their own noise level (bound validation needs the
    # estimator in its asymptotic regime).
    campaign_scenario = dataclasses.replace(scenario, noise_sigma2=mc.noise_sigma2)
    grid = SurfaceGrid.for_scenario(campaign_scenario, n_per_axis=mc.n_per_axis)
    search = SearchSpec(half_widths=mc.half_widths, coarse_points=mc.coarse_points)
    report = run_campaign(campaign_scenario, grid, trials, seed, search=search,
                          model=mc.model, quadrature_cfg=cfg)

    meta = dict(bundle.metadata())
    meta.update({
        "command": "montecarlo",
        "montecarlo.trials": trials,
        "montecarlo.seed": seed,
        "crb_reference": "crb_cpl" if (mc.model == "vector" and scenario.is_cpl)
                         else f"crb_from_fim({mc.model})",
        "reliable": report.reliable,
    })

    truth = np.asarray(campaign_scenario.source_position)
    trial_rows = []
    for i in range(report.n_trials):
        est = report.estimates[i]
        err = est - truth
        trial_rows.append([i, bool(report.converged_mask[i]),
                           est[0], est[1], est[2], err[0], err[1], err[2]])
    trials_path = os.path.join(args.out, "montecarlo_trials.csv")
    write_csv(trials_path,
              ["trial", "converged", "x_hat_m", "y_hat_m", "z_hat_m",
               "err_x_m", "err_y_m", "err_z_m"],
              trial_rows, meta)

    summary_rows = []
    for i, coord in enumerate(("x_c", "y_c", "z_c")):
        summary_rows.append([coord, report.crb[i], report.mse[i], report.bias[i],
                             report.efficiency[i], report.mse_standard_error[i]])
    summary_path = os.path.join(args.out, "montecarlo_summary.csv")
    write_csv(summary_path,
              ["coordinate", "crb_m2", "mse_m2", "bias_m", "efficiency_mse_over_crb",
               "mse_standard_error_m2"],
              summary_rows, meta)
    svg_path = plot_montecarlo(os.path.join(args.out, "montecarlo.svg"), report)

    for i, coord in enumerate(("x_c", "y_c", "z_c")):
        print(f"{coord}: CRB={report.crb[i]:.6e} m^2  MSE={report.mse[i]:.6e} m^2  "
              f"efficiency={report.efficiency[i]:.3f}")
    print(f"{report.n_failed}/{report.n_trials} trials failed"
          + ("" if report.reliable else "  [UNRELIABLE]"))
    print(f"wrote {trials_path}")
    print(f"wrote {summary_path}")
    print(f"wrote {svg_path}")
    return 0


_COMMANDS = {
    "sweep-area": cmd_sweep_area,
    "sweep-distance": cmd_sweep_distance,
    "validate": cmd_validate,
    "montecarlo": cmd_montecarlo,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
