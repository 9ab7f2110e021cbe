import numpy as np
import pytest

import nfcrb.closedform
from nfcrb.cli import main
from nfcrb.report import read_csv
from nfcrb.scenario_io import (
    ScenarioFileError,
    default_bundle,
    parse_scenario_text,
)

SMALL_AREA_SWEEP = """
[scenario]
wavelength = 0.01
x_c = 6.0
surface_side = 3.0
noise_sigma2 = 10.0
dipole_length = 0.005

[quadrature]
target_rel_tol = 1e-10

[sweep]
variable = surface_area
minimum = 1.0
maximum = 25.0
points = 5
scale = log
"""

SMALL_DISTANCE_SWEEP = """
[sweep]
variable = distance
minimum = 0.5
maximum = 8.0
points = 5
scale = log
wavelengths = 0.01, 0.001
"""

SMALL_MONTECARLO = """
[montecarlo]
n_per_axis = 16
trials = 30
seed = 77
noise_sigma2 = 0.01
coarse_points = 9
"""


def write_scenario(tmp_path, text, name="scen.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestScenarioParsing:
    def test_defaults_round_trip(self):
        bundle = default_bundle()
        assert bundle.scenario.wavelength == 0.01
        assert bundle.scenario.snr == pytest.approx(0.1)
        meta = bundle.metadata()
        assert meta["scenario.x_c"] == 6.0
        assert "montecarlo.seed" in meta

    def test_shipped_reference_file_matches_defaults(self):
        import pathlib
        ref = pathlib.Path(__file__).resolve().parent.parent / "scenarios" / "reference.ini"
        from nfcrb.scenario_io import parse_scenario_file
        bundle = parse_scenario_file(ref)
        assert bundle.scenario == default_bundle().scenario
        assert bundle.quadrature == default_bundle().quadrature

    def test_partial_file_keeps_defaults(self):
        bundle = parse_scenario_text("[scenario]\nwavelength = 0.02\n")
        assert bundle.scenario.wavelength == 0.02
        assert bundle.scenario.surface_side == 3.0

    def test_unknown_section_rejected(self):
        with pytest.raises(ScenarioFileError, match=r":2: unknown section"):
            parse_scenario_text("\n[mystery]\nkey = 1\n")

    def test_unknown_key_rejected_with_line(self):
        text = "[scenario]\nwavelength = 0.01\nbandwidth = 5\n"
        with pytest.raises(ScenarioFileError, match=r":3: unknown key 'bandwidth'"):
            parse_scenario_text(text)

    def test_bad_value_reported(self):
        with pytest.raises(ScenarioFileError, match="cannot parse"):
            parse_scenario_text("[scenario]\nwavelength = fast\n")

    def test_physics_validation_propagates(self):
        with pytest.raises(ScenarioFileError, match="x_C"):
            parse_scenario_text("[scenario]\nx_c = -2.0\n")

    def test_complex_amplitude(self):
        bundle = parse_scenario_text("[scenario]\nchi = 0.5+0.5j\n")
        assert bundle.scenario.chi == 0.5 + 0.5j

    def test_sweep_validation(self):
        with pytest.raises(ScenarioFileError, match="variable"):
            parse_scenario_text("[sweep]\nvariable = frequency\n")


class TestSweepArea:
    def test_outputs_and_shape(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_AREA_SWEEP)
        out = tmp_path / "out"
        rc = main(["sweep-area", "--scenario", scen, "--out", str(out),
                   "--compare-scalar", "--closed-form"])
        assert rc == 0
        assert (out / "area_sweep.svg").exists()
        meta, header, rows = read_csv(out / "area_sweep.csv")
        assert meta["tool"] == "nfcrb"
        assert "config_hash" in meta and len(meta["config_hash"]) == 64
        assert meta["scenario.wavelength"] == "0.01"
        assert header[:4] == ["surface_area_m2", "crb_x_m2", "crb_y_m2", "crb_z_m2"]
        assert "scalar_crb_x_m2" in header and "cf_crb_x_m2" in header
        assert len(rows) == 5

        area = np.array([float(r[0]) for r in rows])
        assert np.all(np.diff(area) > 0)  # sorted by sweep value
        for col in (1, 2, 3):
            vals = np.array([float(r[col]) for r in rows])
            assert np.all(np.diff(vals) < 0)  # larger aperture never hurts
        crb_x = np.array([float(r[1]) for r in rows])
        crb_y = np.array([float(r[2]) for r in rows])
        crb_z = np.array([float(r[3]) for r in rows])
        assert np.all(crb_x < crb_y) and np.all(crb_x < crb_z)

    def test_float_cells_round_trip_exactly(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_AREA_SWEEP)
        out = tmp_path / "out"
        assert main(["sweep-area", "--scenario", scen, "--out", str(out)]) == 0
        from nfcrb.fim import crb_cpl
        import dataclasses
        bundle = parse_scenario_text(SMALL_AREA_SWEEP)
        _, header, rows = read_csv(out / "area_sweep.csv")
        area = float(rows[0][0])
        point = dataclasses.replace(bundle.scenario, surface_side=float(np.sqrt(area)))
        expected = crb_cpl(point, bundle.quadrature)
        assert float(rows[0][1]) == expected.crb_x  # 17 significant digits

    def test_requires_cpl(self, tmp_path):
        scen = write_scenario(tmp_path, "[scenario]\ny_c = 0.5\n")
        rc = main(["sweep-area", "--scenario", scen, "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_missing_file_is_reported(self, tmp_path, capsys):
        rc = main(["sweep-area", "--scenario", str(tmp_path / "nope.ini"),
                   "--out", str(tmp_path / "o")])
        assert rc != 0


class TestSweepDistance:
    def test_outputs_and_ordering(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_DISTANCE_SWEEP)
        out = tmp_path / "out"
        rc = main(["sweep-distance", "--scenario", scen, "--out", str(out)])
        assert rc == 0
        meta, header, rows = read_csv(out / "distance_sweep.csv")
        assert (out / "distance_sweep.svg").exists()
        assert header[:2] == ["wavelength_m", "distance_m"]
        lam = np.array([float(r[0]) for r in rows])
        dist = np.array([float(r[1]) for r in rows])
        assert len(rows) == 10  # two wavelengths, five distances
        order = np.lexsort((dist, lam))
        assert np.array_equal(order, np.arange(len(rows)))

        # transverse bounds grow with distance; shorter wavelength is
        # pointwise better
        for lam_val in (0.001, 0.01):
            sel = lam == lam_val
            crb_y = np.array([float(r[3]) for r in rows])[sel]
            crb_z = np.array([float(r[4]) for r in rows])[sel]
            assert np.all(np.diff(crb_y) > 0)
            assert np.all(np.diff(crb_z) > 0)
        for col in (2, 3, 4):
            vals = np.array([float(r[col]) for r in rows])
            assert np.all(vals[lam == 0.001] < vals[lam == 0.01])


class TestValidateCommand:
    def test_green_build_passes(self, tmp_path, capsys):
        out = tmp_path / "v"
        rc = main(["validate", "--out", str(out)])
        captured = capsys.readouterr().out
        assert rc == 0
        assert "FAIL" not in captured
        meta, header, rows = read_csv(out / "validation_report.csv")
        assert header == ["check", "passed", "measured", "tolerance", "detail"]
        assert all(r[1] == "true" for r in rows)
        assert len(rows) >= 10

    def test_detects_perturbed_closed_form(self, tmp_path, capsys, monkeypatch):
        original = nfcrb.closedform._i1_expr
        monkeypatch.setattr(nfcrb.closedform, "_i1_expr",
                            lambda q: original(q) * (1.0 + 1e-6))
        rc = main(["validate", "--out", str(tmp_path / "v")])
        captured = capsys.readouterr().out
        assert rc == 1
        assert "FAIL  i1_closed_vs_quadrature" in captured


class TestMonteCarloCommand:
    def test_outputs(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_MONTECARLO)
        out = tmp_path / "mc"
        rc = main(["montecarlo", "--scenario", scen, "--out", str(out)])
        assert rc == 0
        meta, header, rows = read_csv(out / "montecarlo_trials.csv")
        assert len(rows) == 30
        assert meta["crb_reference"] == "crb_cpl"
        smeta, sheader, srows = read_csv(out / "montecarlo_summary.csv")
        assert [r[0] for r in srows] == ["x_c", "y_c", "z_c"]
        assert "crb_m2" in sheader
        assert (out / "montecarlo.svg").exists()

    def test_same_seed_identical_bytes(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_MONTECARLO)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["montecarlo", "--scenario", scen, "--out", str(out1),
                     "--trials", "20"]) == 0
        assert main(["montecarlo", "--scenario", scen, "--out", str(out2),
                     "--trials", "20"]) == 0
        assert (out1 / "montecarlo_trials.csv").read_bytes() == \
            (out2 / "montecarlo_trials.csv").read_bytes()

    def test_cli_overrides(self, tmp_path):
        scen = write_scenario(tmp_path, SMALL_MONTECARLO)
        out = tmp_path / "mc"
        rc = main(["montecarlo", "--scenario", scen, "--out", str(out),
                   "--trials", "12", "--seed", "123"])
        assert rc == 0
        meta, _, rows = read_csv(out / "montecarlo_trials.csv")
        assert len(rows) == 12
        assert meta["montecarlo.seed"] == "123"
