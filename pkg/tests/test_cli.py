"""Tests for the command-line interface."""

import io
import json

import pytest
from click.testing import CliRunner

from stable_limit_lab.cli import EXIT_OK, EXIT_USAGE, cli
from stable_limit_lab.state import StepPath
from stable_limit_lab.tools.mpath import path_to_csv
from stable_limit_lab.tools.output_saver import read_csv_header

TWO_TAP = {"coeffs": [1.0, 0.5], "innovation": {"alpha": 1.5, "beta": 0.2}}


@pytest.fixture
def runner():
    return CliRunner()


def write_path(file_path, jump_times, values) -> str:
    handle = io.StringIO()
    path_to_csv(StepPath(jump_times=jump_times, values=values), handle)
    file_path.write_text(handle.getvalue())
    return str(file_path)


class TestSimulate:
    """Tests for the simulate command."""

    def test_writes_samples(self, runner, write_config, tmp_path):
        """Test samples.csv carries n rows and the reproducibility header."""
        path = write_config(TWO_TAP, simulate={"n": 50})
        out_dir = tmp_path / "out"
        result = runner.invoke(cli, ["simulate", "--config", path, "--out-dir", str(out_dir), "--reproducible"])

        assert result.exit_code == EXIT_OK, result.output
        samples = out_dir / "samples.csv"
        header = read_csv_header(samples)
        assert header["seed"] == "1"
        assert len(header["config_hash"]) == 64
        rows = [line for line in samples.read_text().splitlines() if not line.startswith("#")]
        assert rows[0] == "j,x"
        assert len(rows) == 51
        assert (out_dir / "samples_ecdf.svg").exists()
        assert json.loads((out_dir / "manifest.json").read_text())["experiment"] == "simulate"

    def test_seed_changes_samples(self, runner, write_config, tmp_path):
        """Test --seed overrides the config's master_seed."""
        path = write_config(TWO_TAP, simulate={"n": 20})
        runner.invoke(cli, ["simulate", "--config", path, "--out-dir", str(tmp_path / "a")])
        runner.invoke(cli, ["simulate", "--config", path, "--out-dir", str(tmp_path / "b"), "--seed", "5"])

        assert read_csv_header(tmp_path / "b" / "samples.csv")["seed"] == "5"
        assert (tmp_path / "a" / "samples.csv").read_text() != (tmp_path / "b" / "samples.csv").read_text()

    def test_config_error(self, runner, write_config, tmp_path):
        """Test an invalid config exits with the usage code."""
        path = write_config({"coeffs": [1.0], "innovation": {"alpha": 3.0}})
        result = runner.invoke(cli, ["simulate", "--config", path, "--out-dir", str(tmp_path / "out")])

        assert result.exit_code == EXIT_USAGE
        assert "alpha" in result.output


class TestPipelineCommands:
    """Tests for diagnose and verify."""

    def test_diagnose(self, runner, write_config, tmp_path):
        """Test diagnose completes with exit code 0."""
        path = write_config(TWO_TAP, diagnose={"n_grid": [100], "reps": 2000, "a_grid": [1.0, 10.0, 100.0]})
        out_dir = tmp_path / "out"
        result = runner.invoke(cli, ["diagnose", "--config", path, "--out-dir", str(out_dir), "--reproducible"])

        assert result.exit_code == EXIT_OK, result.output
        assert (out_dir / "condition_report.csv").exists()

    def test_verify_tangent(self, runner, write_config, tmp_path):
        """Test verify --which tangent."""
        path = write_config(TWO_TAP, tangent={"N_grid": [10, 100]})
        out_dir = tmp_path / "out"
        result = runner.invoke(cli, ["verify", "--which", "tangent", "--config", path, "--out-dir", str(out_dir)])

        assert result.exit_code == EXIT_OK, result.output
        assert (out_dir / "tangent.csv").exists()

    def test_verify_not_applicable(self, runner, write_config, tmp_path):
        """Test a verification that does not apply exits with the usage code."""
        path = write_config(TWO_TAP)
        result = runner.invoke(cli, ["verify", "--which", "alpha1", "--config", path, "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE

    def test_verify_config_error(self, runner, write_config, tmp_path):
        """Test a schema violation exits with the usage code."""
        path = write_config({"coeffs": [-1.0], "innovation": {"alpha": 1.5}})
        result = runner.invoke(cli, ["verify", "--config", path, "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE

    def test_unknown_verification(self, runner, write_config):
        """Test --which only accepts known verifications."""
        path = write_config(TWO_TAP)
        result = runner.invoke(cli, ["verify", "--which", "bogus", "--config", path])
        assert result.exit_code != EXIT_OK


class TestM1Dist:
    """Tests for the m1-dist command."""

    def test_distances(self, runner, tmp_path):
        """Test the split-jump pair and the distances CSV."""
        x = write_path(tmp_path / "x.csv", [0.0, 0.4, 0.5], [0.0, 0.5, 1.0])
        y = write_path(tmp_path / "y.csv", [0.0, 0.5], [0.0, 1.0])
        out_dir = tmp_path / "out"
        result = runner.invoke(cli, ["m1-dist", x, y, "--out-dir", str(out_dir)])

        assert result.exit_code == EXIT_OK, result.output
        assert "M1" in result.output
        lines = [line for line in (out_dir / "distances.csv").read_text().splitlines() if not line.startswith("#")]
        assert lines[0] == "m1,j1,uniform"
        m1, j1, uniform = (float(v) for v in lines[1].split(","))
        assert m1 <= 0.1 + 1e-3
        assert j1 >= 0.5 - 1e-3
        assert uniform == pytest.approx(0.5)

    def test_malformed_path(self, runner, tmp_path):
        """Test a path with decreasing times exits with the usage code."""
        x = tmp_path / "x.csv"
        x.write_text("time,value\n0.0,0.0\n0.5,1.0\n0.2,2.0\n")
        y = write_path(tmp_path / "y.csv", [0.0], [0.0])
        result = runner.invoke(cli, ["m1-dist", str(x), y])
        assert result.exit_code == EXIT_USAGE


class TestGraphCommand:
    """Tests for the graph command."""

    def test_prints_graph(self, runner):
        """Test the pipeline nodes appear in the output."""
        result = runner.invoke(cli, ["graph"])
        assert result.exit_code == EXIT_OK
        assert "load_config" in result.output
        assert "run_verification" in result.output

    def test_version(self, runner):
        """Test --version."""
        result = runner.invoke(cli, ["--version"])
        assert "0.1.0" in result.output
