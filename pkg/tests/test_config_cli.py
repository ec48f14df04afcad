import filecmp
from pathlib import Path

import pytest

from hevopt.cli import (
    EXIT_INFEASIBLE,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_TOLERANCE,
    cmd_compare,
    cmd_solve,
    cmd_validate_cycle,
    main,
)
from hevopt.config import DEFAULTS, ConfigError, ExperimentConfig, defaults_path
from hevopt.cycle import bundled_cycle_path

# reduced resolution keeps CLI runs quick while staying feasible
FAST_KEYS = "dp.soc_points = 161\ndp.theta_points = 15\ndp.u_points = 11\n"


@pytest.fixture()
def fast_config(tmp_path):
    path = tmp_path / "fast.cfg"
    path.write_text(FAST_KEYS, encoding="utf-8")
    return path


class TestConfig:
    def test_defaults_file_mirrors_dict(self):
        cfg = ExperimentConfig.from_file(defaults_path())
        assert cfg.values == DEFAULTS

    def test_override_and_unknown_key(self):
        cfg = ExperimentConfig.from_text("vehicle.mass = 1500\n")
        assert cfg["vehicle.mass"] == 1500.0
        with pytest.raises(ConfigError, match="unknown key"):
            ExperimentConfig.from_text("vehicle.masses = 1500\n")

    def test_bad_value_reports_key(self):
        with pytest.raises(ConfigError, match="dp.soc_points"):
            ExperimentConfig.from_text("dp.soc_points = many\n")

    def test_bool_parsing(self):
        assert ExperimentConfig.from_text("dp.snap_transitions = true\n")["dp.snap_transitions"] is True
        assert ExperimentConfig.from_text("dp.snap_transitions = false\n")["dp.snap_transitions"] is False

    def test_manifest_round_trip(self):
        cfg = ExperimentConfig.from_text("vehicle.mass = 1500\nmotor.eta = 0.88\n")
        back = ExperimentConfig.from_text(cfg.manifest_text())
        assert back.values == cfg.values
        assert back.manifest_text() == cfg.manifest_text()

    def test_build_models_defaults(self):
        models = ExperimentConfig.defaults().build_models()
        assert models.vehicle.mass == 1800.0
        assert models.engine.max_torque == 199.0
        assert models.motor.max_torque == 133.0
        assert models.electrical.capacity == 54000.0
        assert models.thermal.heat_capacity == pytest.approx(3072.0)

    def test_invalid_window_rejected_via_solver_config(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text("soc.final_min = 0.56\nsoc.final_max = 0.54\n").build_solver_config()

    def test_cycle_path_defaults_to_bundled(self):
        assert ExperimentConfig.defaults().cycle_path() == bundled_cycle_path()


class TestValidateCycle:
    def test_bundled_passes(self, capsys):
        assert cmd_validate_cycle(str(bundled_cycle_path())) == EXIT_OK
        out = capsys.readouterr().out
        assert "JN-1015 tolerances: ok" in out

    def test_corrupted_sample_fails_tolerance(self, tmp_path):
        lines = Path(bundled_cycle_path()).read_text().splitlines()
        lines[300] = lines[300].split(",")[0] + ",50.0"
        bad = tmp_path / "jn1015_bad.csv"
        bad.write_text("\n".join(lines) + "\n", encoding="utf-8")
        assert cmd_validate_cycle(str(bad)) == EXIT_TOLERANCE

    def test_malformed_file_is_input_error(self, tmp_path):
        bad = tmp_path / "broken.csv"
        bad.write_text("t_s,v_mps\n0,0\n1,zzz\n", encoding="utf-8")
        assert cmd_validate_cycle(str(bad)) == EXIT_INPUT

    def test_non_jn_cycle_prints_stats_only(self, tmp_path, capsys):
        p = tmp_path / "custom.csv"
        p.write_text("t_s,v_mps\n0,0\n1,5\n2,0\n", encoding="utf-8")
        assert cmd_validate_cycle(str(p)) == EXIT_OK
        assert "distance_m" in capsys.readouterr().out


class TestSolveCommand:
    def test_writes_artifacts(self, fast_config, tmp_path):
        out = tmp_path / "run"
        code = cmd_solve(str(fast_config), "soc-only", str(out), plots=True)
        assert code == EXIT_OK
        for name in ("manifest.cfg", "trace.csv", "summary.txt",
                     "posthoc_theta.csv", "soc.svg", "theta.svg", "control.svg"):
            assert (out / name).exists(), name
        summary = (out / "summary.txt").read_text()
        assert "fuel_l_per_100km" in summary
        assert "posthoc_max_theta_c" in summary

    def test_two_state_mode(self, fast_config, tmp_path):
        out = tmp_path / "run2"
        assert cmd_solve(str(fast_config), "two-state", str(out)) == EXIT_OK
        assert not (out / "posthoc_theta.csv").exists()

    def test_missing_config_is_input_error(self, tmp_path):
        assert cmd_solve(str(tmp_path / "nope.cfg"), "soc-only", str(tmp_path / "o")) == EXIT_INPUT

    def test_infeasible_window_exit_code(self, tmp_path):
        zero = tmp_path / "zero.csv"
        rows = "\n".join(f"{t},0.0" for t in range(6))
        zero.write_text("t_s,v_mps\n" + rows + "\n", encoding="utf-8")
        cfgp = tmp_path / "inf.cfg"
        cfgp.write_text(
            f"cycle.path = {zero}\ndp.soc_points = 21\ndp.theta_points = 5\n"
            "dp.u_points = 3\ndp.u_min = 0\n", encoding="utf-8")
        assert cmd_solve(str(cfgp), "soc-only", str(tmp_path / "o")) == EXIT_INFEASIBLE

    def test_manifest_rerun_reproduces_bytes(self, fast_config, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert cmd_solve(str(fast_config), "soc-only", str(out1)) == EXIT_OK
        assert cmd_solve(str(out1 / "manifest.cfg"), "soc-only", str(out2)) == EXIT_OK
        for name in ("manifest.cfg", "trace.csv", "summary.txt", "posthoc_theta.csv"):
            assert filecmp.cmp(out1 / name, out2 / name, shallow=False), name


class TestCompareCommand:
    def test_comparison_report(self, fast_config, tmp_path, capsys):
        out = tmp_path / "cmp"
        assert cmd_compare(str(fast_config), str(out)) == EXIT_OK
        report = (out / "comparison.txt").read_text()
        assert "fuel_l_per_100km" in report
        assert (out / "soc_only" / "trace.csv").exists()
        assert (out / "two_state" / "trace.csv").exists()
        # two-state fuel must not be lower than the baseline
        line = [l for l in report.splitlines() if l.startswith("fuel_l_per_100km")][0]
        _, base, two = line.split(", ")
        assert float(two) >= float(base)


class TestMainEntry:
    def test_dispatch_validate(self, capsys):
        assert main(["validate-cycle", str(bundled_cycle_path())]) == EXIT_OK

    def test_requires_command(self):
        with pytest.raises(SystemExit):
            main([])


class TestValueDump:
    def test_dump_stage_csv(self, tmp_path):
        cfgp = tmp_path / "dump.cfg"
        cfgp.write_text(
            "dp.soc_points = 161\ndp.theta_points = 21\ndp.u_points = 11\n"
            "dp.dump_value_stages = 0,659\n", encoding="utf-8")
        out = tmp_path / "o"
        assert cmd_solve(str(cfgp), "two-state", str(out)) == EXIT_OK
        for stage in (0, 659):
            path = out / f"values_stage_{stage:04d}.csv"
            assert path.exists()
            lines = path.read_text().splitlines()
            assert lines[0] == "soc,theta,J,u_opt"
            assert len(lines) == 1 + 161 * 21
