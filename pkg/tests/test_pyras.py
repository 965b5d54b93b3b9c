"""Tests for the PyRas front end."""

import logging
from dataclasses import replace

import pytest

from pyras import PyRas, RasConfigError, RasError, run_episode, write_trace
from pyras.__version import __version__
from pyras.engine import EpisodeRunner
from pyras.models import AgentParams
from pyras.policies import ProportionalPolicy, RandomPolicy, UniformPolicy
from pyras.rl.agent import PPOAgent, save_agents
from pyras.rl.policy import AgentPolicy
from pyras.rl.state import state_dim, state_scales
from pyras.topology import build_region


@pytest.fixture
def ras(small_config) -> PyRas:
    return PyRas(small_config)


def test_defaults_to_reference_config():
    """Test the bundled configuration is used without arguments."""
    ras = PyRas()
    assert ras.topology.num_servers == 1000
    assert ras.config.region.num_reservations == 20


def test_from_file(small_config_file, small_config):
    """Test a simulator can be built from a configuration file."""
    assert PyRas.from_file(small_config_file).config == small_config


def test_get_version(ras):
    """get_version() returns the package version string."""
    assert ras.get_version() == __version__


def test_set_log_level_valid(ras):
    """Valid log level names are accepted, in any case."""
    for level in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        ras.set_log_level(level.lower())
        assert logging.getLogger("pyras").level == getattr(logging, level)


def test_set_log_level_invalid(ras):
    """Unknown log level names raise ValueError."""
    with pytest.raises(ValueError, match="Invalid log level"):
        ras.set_log_level("VERBOSE")


def test_build_policy_by_name(ras):
    """Test baseline policies are created by name."""
    assert isinstance(ras.build_policy("random", seed=3), RandomPolicy)
    assert isinstance(ras.build_policy("uniform"), UniformPolicy)
    assert isinstance(ras.build_policy("proportional"), ProportionalPolicy)
    with pytest.raises(RasConfigError, match="Unknown policy 'greedy'"):
        ras.build_policy("greedy")
    with pytest.raises(RasConfigError, match="needs a checkpoint"):
        ras.build_policy("agent")


def test_build_agent_policy(ras, small_config, tmp_path):
    """Test checkpoints must match the configured state sizes and scales."""
    scales = state_scales(ras.topology)
    fitting = {e: PPOAgent(state_dim(6, 2), 7, AgentParams(), seed=e) for e in (0, 1)}
    path = save_agents(
        fitting,
        tmp_path / "ok.npz",
        mode="parallel",
        lookahead=2,
        num_types=2,
        scales=scales,
    )
    assert isinstance(ras.build_policy("agent", path), AgentPolicy)

    foreign = {0: PPOAgent(5, 7, AgentParams(), seed=0)}
    path = save_agents(
        foreign,
        tmp_path / "bad.npz",
        mode="parallel",
        lookahead=2,
        num_types=2,
        scales=scales,
    )
    with pytest.raises(RasConfigError, match="state size 5"):
        ras.build_policy("agent", path)

    larger = replace(small_config.region, rru=300)
    path = save_agents(
        fitting,
        tmp_path / "rescaled.npz",
        mode="parallel",
        lookahead=2,
        num_types=2,
        scales=state_scales(build_region(larger)),
    )
    with pytest.raises(RasConfigError, match="state scales"):
        ras.build_policy("agent", path)


def test_simulate_matches_run_episode(ras, small_config):
    """Test simulate runs the seeded episode."""
    report = ras.simulate(UniformPolicy(), seed=4)
    expected = run_episode(UniformPolicy(), small_config, 4)
    assert report.seed == 4
    assert report.total_utility == pytest.approx(expected.total_utility)


def test_simulate_replays_trace(ras, small_config, tmp_path):
    """Test a saved trace replays the episode it came from."""
    runner = EpisodeRunner(small_config)
    trace = runner.sample(5)
    path = tmp_path / "trace.txt"
    write_trace(trace, path)
    replay = ras.simulate(ProportionalPolicy(), seed=5, trace=path)
    original = runner.run(ProportionalPolicy(), 5)
    assert [s.utility for s in replay.steps] == [s.utility for s in original.steps]


def test_evaluate_seeds(ras):
    """Test evaluation seeds count up from the given seed."""
    result = ras.evaluate(UniformPolicy(), episodes=2, seed=7)
    assert [r.seed for r in result.episodes] == [7, 8]


def test_train_writes_checkpoint(small_config, tmp_path):
    """Test trained agents are saved and load back as a policy."""
    config = replace(small_config, agent=AgentParams(hidden_sizes=(8,)))
    ras = PyRas(config)
    path = tmp_path / "agents.npz"
    result = ras.train("parallel", episodes=1, seed=0, checkpoint=path)
    assert sorted(result.agents) == [0, 1]
    assert isinstance(ras.build_policy("agent", path), AgentPolicy)


def test_oracle_check_frame(config_factory):
    """Test the oracle check reports one dominated row per slot."""
    ras = PyRas(config_factory(horizon=2))
    frame = ras.oracle_check(UniformPolicy(), episodes=2)
    assert len(frame) == 4
    assert frame["dominated"].all()
    assert frame["seed"].tolist() == [0, 0, 1, 1]


def test_unexpected_errors_are_wrapped(ras, monkeypatch):
    """Unexpected exceptions surface as RasError."""

    def broken(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr("pyras.pyras.evaluate", broken)
    with pytest.raises(RasError, match="Unexpected error during evaluation: boom"):
        ras.evaluate(UniformPolicy(), episodes=1)
