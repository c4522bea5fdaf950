import pytest

from tcellsim.cli import main
from tcellsim.dataio import read_manifest, read_trajectory_csv


def run_cli(*args):
    return main([str(a) for a in args])


def small_run(out, engine="ode", scenario=2, extra=()):
    return run_cli(
        "run", "--scenario", scenario, "--engine", engine,
        "--t-end", 5, "--replicates", 2, "--seed", 7, "--out", out, *extra,
    )


class TestRun:
    def test_ode_run_writes_trajectory_and_manifest(self, tmp_path):
        out = tmp_path / "r"
        assert small_run(out) == 0
        traj = read_trajectory_csv(out / "scenario2_ode.csv")
        assert traj.times[-1] == pytest.approx(5.0)
        manifest = read_manifest(out / "manifest.txt")
        assert manifest["scenario"] == "2"
        assert manifest["engine"] == "ode"
        assert manifest["actives_placeholder"] == "true"
        assert "timestamp_utc" in manifest
        assert "rng" in manifest

    def test_default_horizon_is_100_years(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli("run", "--scenario", 2, "--engine", "ode", "--out", out) == 0
        traj = read_trajectory_csv(out / "scenario2_ode.csv")
        assert traj.times[-1] == pytest.approx(100.0)

    def test_abm_run_writes_mean_and_replicates(self, tmp_path):
        out = tmp_path / "r"
        assert small_run(out, engine="abm") == 0
        assert (out / "scenario2_abm_mean.csv").exists()
        lines = (out / "scenario2_abm_replicates.csv").read_text().splitlines()
        assert lines[0].startswith("replicate,")
        replicates = {line.split(",", 1)[0] for line in lines[1:]}
        assert replicates == {"0", "1"}

    def test_both_writes_comparison_report(self, tmp_path, capsys):
        out = tmp_path / "r"
        assert small_run(out, engine="both", scenario=3) == 0
        report = (out / "scenario3_comparison.csv").read_text().splitlines()
        assert report[0] == (
            "scenario,quantity,u_statistic,p_value,method,rms_difference,max_difference"
        )
        assert len(report) == 5
        quantities = [line.split(",")[1] for line in report[1:]]
        assert quantities == ["N", "Np", "M", "total"]
        assert (out / "scenario3_comparison.txt").exists()
        assert "scenario 3 total:" in capsys.readouterr().out

    def test_unknown_scenario_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run_cli("run", "--scenario", 9, "--out", tmp_path)
        assert err.value.code == 2

    def test_unreadable_actives_exits_3(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", 1, "--t-end", 1,
            "--actives", tmp_path / "absent.csv", "--out", tmp_path / "r",
        )
        assert code == 3
        assert "data error" in capsys.readouterr().err

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("TCELLSIM_OUT", str(target))
        assert run_cli("run", "--scenario", 1, "--engine", "ode", "--t-end", 2) == 0
        assert (target / "scenario1_ode.csv").exists()

    def test_numerical_failure_exits_4(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", 2, "--engine", "ode", "--method", "euler",
            "--dt", 1e160, "--t-end", 2e160, "--out", tmp_path / "r",
        )
        assert code == 4
        assert "numerical failure" in capsys.readouterr().err

    def test_custom_actives_not_flagged_placeholder(self, tmp_path):
        actives = tmp_path / "actives.csv"
        actives.write_text("age_years,active_per_mm3\n0,50\n20,10\n", encoding="utf-8")
        out = tmp_path / "r"
        assert small_run(out, extra=("--actives", actives)) == 0
        assert read_manifest(out / "manifest.txt")["actives_placeholder"] == "false"

    def test_reproducible_artifacts(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert small_run(out, engine="both", scenario=1) == 0
        names = sorted(p.name for p in out_a.iterdir() if p.name != "manifest.txt")
        assert names
        for name in names:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


class TestValidate:
    def test_writes_overlay_and_residuals(self, tmp_path):
        out = tmp_path / "v"
        code = run_cli(
            "validate", "--scenario", 3, "--dataset", "murray",
            "--t-end", 60, "--out", out,
        )
        assert code == 0
        assert (out / "scenario3_murray_overlay.svg").exists()
        residuals = (out / "scenario3_murray_residuals.csv").read_text().splitlines()
        assert residuals[0] == "age_years,data_pct,model_pct,residual_pct"
        assert len(residuals) == 13
        fit = read_manifest(out / "scenario3_murray_fit.txt")
        assert float(fit["rms_residual_pct"]) > 0.0
        manifest = read_manifest(out / "manifest.txt")
        assert manifest["normalization"].startswith("percent-of-age-0")

    def test_both_datasets_by_default(self, tmp_path):
        out = tmp_path / "v"
        code = run_cli("validate", "--scenario", 1, "--t-end", 30, "--out", out)
        assert code == 0
        assert (out / "scenario1_murray_overlay.svg").exists()
        assert (out / "scenario1_lorenzi_overlay.svg").exists()

    def test_unknown_dataset_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run_cli("validate", "--scenario", 1, "--dataset", "nonsense", "--out", tmp_path)
        assert err.value.code == 2

    def test_abm_engine_validate(self, tmp_path):
        out = tmp_path / "v"
        code = run_cli(
            "validate", "--scenario", 2, "--engine", "abm", "--dataset", "lorenzi",
            "--t-end", 10, "--replicates", 2, "--seed", 5, "--out", out,
        )
        assert code == 0
        assert (out / "scenario2_lorenzi_overlay.svg").exists()


class TestCompare:
    def test_compare_two_runs(self, tmp_path, capsys):
        out = tmp_path / "r"
        assert small_run(out, engine="both") == 0
        code = run_cli(
            "compare", out / "scenario2_ode.csv", out / "scenario2_abm_mean.csv",
            "--scenario", 2, "--out", tmp_path / "c",
        )
        assert code == 0
        assert (tmp_path / "c" / "comparison.csv").exists()
        assert "scenario 2 total:" in capsys.readouterr().out

    def test_mismatched_grids_exit_3(self, tmp_path, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert small_run(out_a) == 0
        assert run_cli(
            "run", "--scenario", 2, "--engine", "ode", "--t-end", 7, "--out", out_b
        ) == 0
        code = run_cli(
            "compare", out_a / "scenario2_ode.csv", out_b / "scenario2_ode.csv",
            "--out", tmp_path / "c",
        )
        assert code == 3
        assert "mismatched" in capsys.readouterr().err


class TestDatasets:
    def test_prints_published_tables(self, capsys):
        assert run_cli("datasets") == 0
        out = capsys.readouterr().out
        assert "dataset=murray" in out
        assert "dataset=lorenzi" in out
        assert "0,0,5.03,48" in out
        assert "50,54,4.21,21" in out
