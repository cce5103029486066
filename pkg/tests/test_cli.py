import json

import pytest
from click.testing import CliRunner

from spherebot import model, scenarios
from spherebot.cli import main
from spherebot.errors import IncompleteRunError, ScenarioError


@pytest.fixture()
def runner():
    return CliRunner()


class TestSimulateCommand:
    def test_list_scenarios(self, runner):
        result = runner.invoke(main, ["simulate", "--list"])
        assert result.exit_code == 0
        names = result.output.split()
        assert "fig4" in names and "fig15" in names and "scaling" in names

    def test_adhoc_run_writes_csv(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--beta-deg", "10", "--speed", "1",
             "--duration", "3", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        files = list(tmp_path.glob("*.csv"))
        assert len(files) == 1
        header = files[0].read_text().splitlines()[0]
        assert header.startswith("t,phi,theta,psi,beta,X,Z")

    def test_unknown_scenario_is_validation_error(self, runner, tmp_path):
        result = runner.invoke(
            main, ["simulate", "--scenario", "fig99", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2
        assert "unknown scenario" in result.output

    def test_bad_params_file_is_validation_error(self, runner, tmp_path):
        bad = tmp_path / "params.json"
        bad.write_text(json.dumps({"m_h": 2.0, "bogus": 1.0}))
        result = runner.invoke(
            main,
            ["simulate", "--beta-deg", "5", "--duration", "1",
             "--params", str(bad), "--out", str(tmp_path)],
        )
        assert result.exit_code == 2

    def test_negative_duration_is_validation_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--duration", "-5", "--out", str(tmp_path)],
        )
        assert result.exit_code == 2


class TestAnalyzeAndCharacterize:
    def test_characterize_outputs_json(self, runner):
        result = runner.invoke(
            main, ["characterize", "--beta-deg", "5", "--speed", "1"]
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["provenance"] == "predicted"
        assert payload["frequency_rad_s"] == pytest.approx(4.7407, abs=1e-3)

    def test_analyze_round_trip(self, runner, tmp_path):
        run = runner.invoke(
            main,
            ["simulate", "--beta-deg", "5", "--speed", "1",
             "--duration", "20", "--out", str(tmp_path)],
        )
        assert run.exit_code == 0, run.output
        csv = next(tmp_path.glob("*.csv"))
        result = runner.invoke(main, ["analyze", "--traj", str(csv)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["provenance"] == "measured"
        assert payload["frequency_rad_s"] == pytest.approx(4.73, abs=0.1)

    def test_analyze_insufficient_data_is_numerical_error(self, runner, tmp_path):
        run = runner.invoke(
            main,
            ["simulate", "--beta-deg", "5", "--speed", "1",
             "--duration", "2", "--out", str(tmp_path)],
        )
        assert run.exit_code == 0
        csv = next(tmp_path.glob("*.csv"))
        result = runner.invoke(main, ["analyze", "--traj", str(csv)])
        assert result.exit_code == 3


class TestControlCommand:
    def test_closed_loop_run(self, runner, tmp_path):
        params_file = tmp_path / "params.json"
        model.save_params(scenarios.CONTROLLER_PARAMS, params_file)
        result = runner.invoke(
            main,
            ["control", "--beta-deg", "15", "--speed", "1",
             "--duration", "3", "--gamma", "0.9", "--delta", "0.1",
             "--params", str(params_file), "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "control_beta15_speed1.csv").exists()

    def test_numerical_failure_exit_code(self, runner, tmp_path):
        # pure wobble blend at default parameters escapes in finite time
        result = runner.invoke(
            main,
            ["control", "--beta-deg", "15", "--speed", "1",
             "--duration", "5", "--gamma", "1.0", "--delta", "0.0",
             "--out", str(tmp_path)],
        )
        assert result.exit_code == 3
        assert "error:" in result.output

    def test_maneuver_plan_file(self, runner, tmp_path):
        params_file = tmp_path / "params.json"
        model.save_params(scenarios.CONTROLLER_PARAMS, params_file)
        plan = [
            {"psi_dot_des": -1.0, "beta_des": 0.0, "duration": 1.0},
            {"psi_dot_des": -1.0, "beta_des": 0.1, "duration": 1.0},
        ]
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(json.dumps(plan))
        result = runner.invoke(
            main,
            ["control", "--maneuver", str(plan_file),
             "--params", str(params_file), "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "maneuver.csv").exists()


class TestScenariosAndReport:
    def test_fig5_artifacts_and_report(self, runner, tmp_path):
        result = runner.invoke(
            main, ["simulate", "--scenario", "fig5", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "fig5__manifest.json").exists()
        assert (tmp_path / "fig5__metrics.json").exists()
        assert (tmp_path / "fig5__run.csv").exists()

        report = runner.invoke(main, ["report", "--out", str(tmp_path)])
        assert report.exit_code == 0, report.output
        payload = json.loads((tmp_path / "report.json").read_text())
        assert "fig5" in payload["scenarios"]

    def test_rerun_is_byte_identical(self, runner, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            result = runner.invoke(
                main, ["simulate", "--scenario", "fig5", "--out", str(out)]
            )
            assert result.exit_code == 0
        assert (a / "fig5__run.csv").read_bytes() == (
            (b / "fig5__run.csv").read_bytes()
        )
        assert (a / "fig5__metrics.json").read_bytes() == (
            (b / "fig5__metrics.json").read_bytes()
        )
        ma = json.loads((a / "fig5__manifest.json").read_text())
        mb = json.loads((b / "fig5__manifest.json").read_text())
        assert ma["config_sha256"] == mb["config_sha256"]

    def test_report_on_empty_dir_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["report", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_report_detects_missing_artifact(self, runner, tmp_path):
        result = runner.invoke(
            main, ["simulate", "--scenario", "fig5", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0
        (tmp_path / "fig5__run.csv").unlink()
        report = runner.invoke(main, ["report", "--out", str(tmp_path)])
        assert report.exit_code == 2


class TestScenarioRegistry:
    def test_every_figure_has_exactly_one_scenario(self):
        names = scenarios.scenario_names()
        for fig in ("fig4", "fig5", "fig6", "fig7", "fig8", "fig10-11",
                    "fig12", "fig13", "fig14", "fig15"):
            assert fig in names

    def test_unknown_scenario_raises(self, tmp_path):
        with pytest.raises(ScenarioError):
            scenarios.run_scenario("fig99", tmp_path)

    def test_summarize_empty_raises(self, tmp_path):
        with pytest.raises(IncompleteRunError):
            scenarios.summarize(tmp_path)
