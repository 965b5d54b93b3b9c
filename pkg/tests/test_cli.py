"""Tests for the command line front end."""

import pandas as pd
import pytest

from pyras.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_ORACLE_FAILED,
    ORACLE_FILE,
    build_parser,
    main,
)
from pyras.config_parser import serialize_config
from pyras.reporting import (
    CURVES_FILE,
    EPISODES_FILE,
    STEPS_FILE,
    SWEEP_FILE,
    SWEEP_SUMMARY_FILE,
)


@pytest.fixture
def tiny_config_file(config_factory, tmp_path):
    """Region small enough for the oracle."""
    path = tmp_path / "tiny.ini"
    config = config_factory(num_reservations=2, types=((3, 1.0, 0), (3, 0.5, 0)))
    path.write_text(serialize_config(config), encoding="utf-8")
    return path


def test_simulate(small_config_file, tmp_path, capsys):
    """Test one episode writes the metric files."""
    out = tmp_path / "sim"
    code = main(
        ["simulate", "--config", str(small_config_file), "--out-dir", str(out)]
    )
    assert code == EXIT_OK
    assert "total_utility=" in capsys.readouterr().out
    assert len(pd.read_csv(out / EPISODES_FILE)) == 1
    assert len(pd.read_csv(out / STEPS_FILE)) == 6 * 2


def test_evaluate_with_seed(small_config_file, tmp_path):
    """Test evaluation episodes start at the given seed."""
    out = tmp_path / "eval"
    code = main(
        [
            "evaluate",
            "--config",
            str(small_config_file),
            "--policy",
            "proportional",
            "--episodes",
            "3",
            "--seed",
            "10",
            "--out-dir",
            str(out),
        ]
    )
    assert code == EXIT_OK
    assert pd.read_csv(out / EPISODES_FILE)["seed"].tolist() == [10, 11, 12]


def test_sweep(small_config_file, tmp_path, capsys):
    """Test the sweep writes per-episode and summary files."""
    out = tmp_path / "sweep"
    code = main(
        [
            "sweep",
            "--config",
            str(small_config_file),
            "--values",
            "0,50",
            "--episodes",
            "2",
            "--out-dir",
            str(out),
        ]
    )
    assert code == EXIT_OK
    assert len(pd.read_csv(out / SWEEP_FILE)) == 4
    assert len(pd.read_csv(out / SWEEP_SUMMARY_FILE)) == 2
    assert "servers_moved_trend=" in capsys.readouterr().out


def test_train_then_evaluate_agent(small_config_file, tmp_path):
    """Test a trained checkpoint drives the agent policy."""
    out = tmp_path / "train"
    code = main(
        [
            "train",
            "--config",
            str(small_config_file),
            "--mode",
            "single",
            "--episodes",
            "1",
            "--out-dir",
            str(out),
        ]
    )
    assert code == EXIT_OK
    checkpoint = out / "agents.npz"
    assert checkpoint.exists()
    assert len(pd.read_csv(out / CURVES_FILE)) == 2
    code = main(
        [
            "evaluate",
            "--config",
            str(small_config_file),
            "--policy",
            "agent",
            "--checkpoint",
            str(checkpoint),
            "--episodes",
            "1",
            "--out-dir",
            str(tmp_path / "agent"),
        ]
    )
    assert code == EXIT_OK


def test_invalid_config(tmp_path, capsys):
    """Test configuration errors exit with one error line."""
    path = tmp_path / "bad.ini"
    path.write_text("[region]\nnum_dcs = 1\n", encoding="utf-8")
    code = main(["simulate", "--config", str(path), "--out-dir", str(tmp_path)])
    assert code == EXIT_ERROR
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith("error: RasConfigError: Missing required keys")


def test_agent_needs_checkpoint(small_config_file, tmp_path, capsys):
    """Test the agent policy without a checkpoint is refused."""
    code = main(
        [
            "simulate",
            "--config",
            str(small_config_file),
            "--policy",
            "agent",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == EXIT_ERROR
    assert "error: RasConfigError: " in capsys.readouterr().err


def test_oracle_check_refuses_large_region(tmp_path, capsys):
    """Test the reference region is too large for the oracle."""
    code = main(["oracle-check", "--out-dir", str(tmp_path)])
    assert code == EXIT_ERROR
    assert "error: RasOracleSizeError: " in capsys.readouterr().err


def test_oracle_check(tiny_config_file, tmp_path, capsys):
    """Test every slot of a tiny region passes the oracle check."""
    code = main(
        [
            "oracle-check",
            "--config",
            str(tiny_config_file),
            "--episodes",
            "3",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == EXIT_OK
    frame = pd.read_csv(tmp_path / ORACLE_FILE)
    assert len(frame) == 3 * 3
    assert frame["dominated"].all()
    assert "oracle_failures=0" in capsys.readouterr().out


def test_failed_oracle_check_has_own_exit_code(
    tiny_config_file, tmp_path, capsys, monkeypatch
):
    """Test a failed oracle check exits with a code argparse never uses."""

    def beaten(self, policy, episodes=1, seed=None):
        return pd.DataFrame({"episode": [0], "step": [1], "dominated": [False]})

    monkeypatch.setattr("pyras.pyras.PyRas.oracle_check", beaten)
    argv = ["oracle-check", "--config", str(tiny_config_file)]
    code = main([*argv, "--out-dir", str(tmp_path)])
    assert code == EXIT_ORACLE_FAILED
    assert "error: OracleCheckFailed: " in capsys.readouterr().err

    with pytest.raises(SystemExit) as exc:
        main([*argv, "--episodes", "many"])
    assert exc.value.code == 2
    assert exc.value.code not in (EXIT_OK, EXIT_ERROR, EXIT_ORACLE_FAILED)


def test_parser_rejects_bad_values():
    """Test argparse validates choices and integer lists."""
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["simulate", "--policy", "greedy"])
    with pytest.raises(SystemExit):
        parser.parse_args(["sweep", "--values", "1,two"])
    args = parser.parse_args(["sweep", "--values", "0,5,50", "--log-level", "debug"])
    assert args.values == (0, 5, 50)
    assert args.log_level == "DEBUG"
