"""High-level entry point of the simulator.

Provides the PyRas class, which owns one experiment configuration and runs
episodes, evaluations, training, the movement cost sweep and oracle checks
on it.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Final

import pandas as pd

from .__version import __version__
from .config_parser import load_reference_config, parse_config
from .const import (
    EVALUATION_EPISODES,
    LOG_LEVEL_MAP,
    SWEEP_EPISODES,
    SWEEP_MOVEMENT_COSTS,
)
from .engine import EpisodeRunner, EvaluationReport, evaluate
from .exception_classes import RasConfigError, RasError
from .models.config import ExperimentConfig
from .models.metrics import EpisodeReport
from .oracle import compare_with_pipeline
from .policies import Policy, ProportionalPolicy, RandomPolicy, UniformPolicy
from .reporting import SweepReport, sweep_movement_cost
from .rl.agent import load_agents, save_agents
from .rl.policy import SHARED_AGENT, AgentPolicy
from .rl.state import state_dim, state_scales
from .rl.trainer import MODE_PARALLEL, TrainingResult, train
from .topology import build_region
from .trace_parser import read_trace

_LOGGER: Final = logging.getLogger(__name__)

POLICY_NAMES: Final[tuple[str, ...]] = ("random", "uniform", "proportional", "agent")


class PyRas:
    """Simulator front end bound to one experiment configuration.

    Attributes:
        config: The experiment configuration.
    """

    def __init__(self, config: ExperimentConfig | None = None) -> None:
        """Initialize the simulator.

        Args:
            config: Experiment configuration; the bundled reference one if None.

        Raises:
            RasConfigError: If the region cannot be laid out.
        """
        self.config = config or load_reference_config()
        self.topology = build_region(self.config.region)
        _LOGGER.debug(
            "PyRas initialised with %d servers in %d racks",
            self.topology.num_servers,
            self.topology.num_racks,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> PyRas:
        """Build a simulator from a configuration file."""
        return cls(parse_config(path))

    def set_log_level(self, log_level: str) -> None:
        """Set the logging level for the entire pyras library.

        Args:
            log_level: One of "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL".

        Raises:
            ValueError: If the provided log_level is invalid.
        """
        level_int = LOG_LEVEL_MAP.get(log_level.upper())
        if level_int is None:
            _LOGGER.error("Invalid log level provided: '%s'", log_level)
            raise ValueError(
                f"Invalid log level: {log_level}. "
                f"Must be one of {list(LOG_LEVEL_MAP.keys())}"
            )
        package_logger = logging.getLogger(__name__.split(".")[0])
        package_logger.setLevel(level_int)
        package_logger.info("pyras log level set to %s", log_level.upper())

    def get_version(self) -> str:
        """Get the package version.

        Returns:
            Current version string.
        """
        return __version__

    def build_policy(
        self, name: str, checkpoint: str | Path | None = None, seed: int = 0
    ) -> Policy:
        """Create a policy by name.

        Args:
            name: One of POLICY_NAMES.
            checkpoint: Agent checkpoint, required for "agent".
            seed: Seed of the random policy.

        Raises:
            RasConfigError: If the name is unknown, the checkpoint is missing
                or its agents do not fit this configuration.
            RasParserError: If the checkpoint cannot be read.
        """
        if name == "random":
            return RandomPolicy(seed)
        if name == "uniform":
            return UniformPolicy()
        if name == "proportional":
            return ProportionalPolicy()
        if name != "agent":
            raise RasConfigError(
                f"Unknown policy '{name}'; expected one of {', '.join(POLICY_NAMES)}"
            )
        if checkpoint is None:
            raise RasConfigError("The agent policy needs a checkpoint")
        loaded = load_agents(checkpoint, self.config.agent, self.topology)
        region = self.config.region
        for key, agent in loaded.agents.items():
            expected = state_dim(
                region.num_msbs,
                self.config.episode.lookahead,
                region.num_types if key == SHARED_AGENT else None,
            )
            if agent.state_dim != expected or agent.action_dim != region.num_msbs + 1:
                raise RasConfigError(
                    f"Checkpoint agent {key} has state size {agent.state_dim}, "
                    f"the configuration needs {expected}"
                )
        return AgentPolicy(loaded.agents)

    def _run(self, action: str, func, *args, **kwargs):
        """Call func, logging failures and wrapping unexpected ones."""
        try:
            return func(*args, **kwargs)
        except RasError:
            _LOGGER.error("%s failed", action)
            raise
        except (ValueError, OSError):
            raise
        except Exception as err:
            _LOGGER.exception("Unexpected error during %s", action)
            raise RasError(f"Unexpected error during {action}: {err}") from err

    def simulate(
        self, policy: Policy, seed: int | None = None, trace: str | Path | None = None
    ) -> EpisodeReport:
        """Run one episode.

        Args:
            policy: Policy to run.
            seed: Episode seed; the configured one if None.
            trace: Trace file to replay instead of sampling.
        """
        seed = self.config.episode.seed if seed is None else seed
        replay = read_trace(trace) if trace is not None else None
        runner = EpisodeRunner(self.config, self.topology)
        return self._run("simulation", runner.run, policy, seed, trace=replay)

    def evaluate(
        self,
        policy: Policy,
        episodes: int = EVALUATION_EPISODES,
        seed: int | None = None,
    ) -> EvaluationReport:
        """Run seeded episodes; episode i uses seed + i."""
        seed = self.config.episode.seed if seed is None else seed
        seeds = [seed + i for i in range(episodes)]
        runner = EpisodeRunner(self.config, self.topology)
        return self._run(
            "evaluation", evaluate, policy, self.config, episodes, seeds, runner=runner
        )

    def train(
        self,
        mode: str = MODE_PARALLEL,
        episodes: int | None = None,
        seed: int | None = None,
        checkpoint: str | Path | None = None,
    ) -> TrainingResult:
        """Train agents and optionally save them.

        Args:
            mode: "single" or "parallel".
            episodes: Episodes per server type; the configured count if None.
            seed: Training seed; the configured one if None.
            checkpoint: Where to save the trained agents.
        """
        result = self._run(
            "training", train, self.config, mode, episodes=episodes, seed=seed
        )
        if checkpoint is not None:
            save_agents(
                result.agents,
                checkpoint,
                mode=result.mode,
                lookahead=self.config.episode.lookahead,
                num_types=self.config.region.num_types,
                scales=state_scales(self.topology),
            )
        return result

    def sweep(
        self,
        policy: Policy,
        values: Sequence[int] = SWEEP_MOVEMENT_COSTS,
        episodes: int | None = None,
        seed: int | None = None,
    ) -> SweepReport:
        """Evaluate a policy for every movement cost in values."""
        seed = self.config.episode.seed if seed is None else seed
        count = SWEEP_EPISODES if episodes is None else episodes
        seeds = [seed + i for i in range(count)]
        return self._run(
            "sweep", sweep_movement_cost, values, policy, self.config, count, seeds
        )

    def oracle_check(
        self, policy: Policy, episodes: int = 1, seed: int | None = None
    ) -> pd.DataFrame:
        """Compare every slot of seeded episodes with the exact optimum.

        Returns:
            One row per slot with both utilities and a `dominated` column.

        Raises:
            RasOracleSizeError: If the region is too large to enumerate.
        """
        seed = self.config.episode.seed if seed is None else seed
        seeds = [seed + i for i in range(episodes)]
        comparisons = self._run(
            "oracle check", compare_with_pipeline, policy, self.config, seeds
        )
        frame = pd.DataFrame([asdict(c) for c in comparisons])
        frame["dominated"] = [c.dominated for c in comparisons]
        return frame