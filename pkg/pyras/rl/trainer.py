"""Agent training.

Two modes are supported:

* single: one shared agent whose state carries the server type one-hot,
  trained on one server type after the other.
* parallel: one agent per server type, trained concurrently. Each trainer
  owns its agent, episode runner and random streams, so the result does not
  depend on scheduling.

Rewards follow a progressive schedule. Stage 1 only charges movement cost;
each later stage adds the next term (rack spread, MSB spread, largest MSB)
and the last stage adds the constraint penalties. A stage advances once the
moving average of the episode reward stops changing.
"""

from __future__ import annotations

import asyncio
import logging
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Final

import numpy as np
import pandas as pd

from ..const import CURRICULUM_STAGES, CURVE_COLUMNS
from ..engine import EpisodeRunner
from ..models.config import CurriculumParams, ExperimentConfig, RewardParams
from ..models.metrics import TypeMetrics
from ..models.topology import RegionTopology
from ..topology import build_region
from .agent import PPOAgent
from .buffer import RolloutBatch, Trajectory
from .policy import SHARED_AGENT, AgentPolicy
from .state import state_dim

_LOGGER: Final = logging.getLogger(__name__)

MODE_SINGLE: Final[str] = "single"
MODE_PARALLEL: Final[str] = "parallel"


def reward(
    metrics: TypeMetrics, l: int, params: RewardParams, stage: int = CURRICULUM_STAGES
) -> float:
    """Reward of reservation l once its type's slot mapping is done.

    The movement cost of the whole type is charged to every reservation.

    Args:
        metrics: Metrics of the type at the slot.
        l: Reservation id.
        params: Weights and penalties.
        stage: Curriculum stage; only the terms it has unlocked count.
    """
    w1, w2, w3, w4 = params.weights
    terms = (
        w1 * metrics.o1,
        w2 * float(metrics.o2[l]),
        w3 * float(metrics.o3[l]),
        w4 * float(metrics.o4[l]),
    )
    cost = sum(terms[: min(stage, len(terms))])
    if stage >= CURRICULUM_STAGES:
        if metrics.g2_slack[l] < 0:
            cost += params.redundancy_penalty
        for d in np.flatnonzero(metrics.g3_slack[:, l] < 0):
            cost += params.affinity_penalty(int(d))
    return -cost


class Curriculum:
    """Progressive reward schedule driven by the episode reward."""

    def __init__(self, params: CurriculumParams) -> None:
        self.params = params
        self.stage = params.start_stage
        self._history: list[float] = []

    @property
    def complete(self) -> bool:
        return self.stage >= CURRICULUM_STAGES

    def record(self, episode_reward: float) -> bool:
        """Add an episode reward; return True if the stage advanced.

        The moving average over the last `window` episodes is compared with
        the one `patience` episodes earlier.
        """
        if self.complete:
            return False
        self._history.append(episode_reward)
        window, patience = self.params.window, self.params.patience
        if len(self._history) < window + patience:
            return False
        recent = float(np.mean(self._history[-window:]))
        earlier = float(np.mean(self._history[-window - patience : -patience]))
        if abs(recent - earlier) > self.params.tolerance * max(abs(earlier), 1e-12):
            return False
        self.stage += 1
        self._history.clear()
        return True


class TrainingPolicy(AgentPolicy):
    """AgentPolicy that samples actions and stores transitions."""

    def __init__(
        self,
        agents: dict[int, PPOAgent],
        reward_params: RewardParams,
        curriculum: Curriculum,
    ) -> None:
        super().__init__(agents, deterministic=False)
        self.reward_params = reward_params
        self.curriculum = curriculum
        self.trajectory = Trajectory()

    def begin_episode(self) -> Trajectory:
        self.trajectory = Trajectory()
        return self.trajectory

    def _record(self, state, sample) -> None:
        self.trajectory.add(state, sample.action, sample.log_prob, sample.value)

    def observe(self, t: int, metrics: TypeMetrics) -> None:
        stage = self.curriculum.stage
        rewards = [
            reward(metrics, l, self.reward_params, stage)
            for l in range(len(metrics.o2))
        ]
        self.trajectory.assign_rewards(np.array(rewards))


@dataclass(frozen=True)
class CurvePoint:
    """One training episode of one agent on one server type."""

    agent: int
    server_type: int
    episode: int
    stage: int
    total_reward: float
    objective: float
    g2_violations: int
    g3_violations: int
    elapsed_s: float


@dataclass
class TrainingResult:
    """Trained agents and their learning curves."""

    agents: dict[int, PPOAgent]
    mode: str
    curves: list[CurvePoint] = field(default_factory=list)

    def curve_frame(self) -> pd.DataFrame:
        rows = [asdict(point) for point in self.curves]
        return pd.DataFrame(rows, columns=list(CURVE_COLUMNS))


def new_agent(
    config: ExperimentConfig, seed: int | Sequence[int], one_hot: bool
) -> PPOAgent:
    """Untrained agent sized for the configured region."""
    region = config.region
    dim = state_dim(
        region.num_msbs,
        config.episode.lookahead,
        region.num_types if one_hot else None,
    )
    return PPOAgent(dim, region.num_msbs + 1, config.agent, seed=seed)


def train_type(
    agent: PPOAgent,
    config: ExperimentConfig,
    e: int,
    *,
    episodes: int,
    seed: int,
    runner: EpisodeRunner,
    agent_key: int,
) -> list[CurvePoint]:
    """Train an agent on one server type.

    Args:
        agent: Agent to update in place.
        config: Experiment configuration.
        e: Server type.
        episodes: Training episodes.
        seed: Seed of episode 0; episode i uses seed + i.
        runner: Episode runner owned by this trainer.
        agent_key: Agent id written in the curves.

    Returns:
        One CurvePoint per episode.

    Raises:
        RasTrainingError: If an update diverges.
    """
    curriculum = Curriculum(config.curriculum)
    policy = TrainingPolicy({agent_key: agent}, config.reward, curriculum)
    pending: list[Trajectory] = []
    curves: list[CurvePoint] = []
    started = time.perf_counter()
    update_every = config.agent.update_every
    for i in range(episodes):
        trajectory = policy.begin_episode()
        stage = curriculum.stage
        report = runner.run(policy, seed + i, episode=i, types=(e,))
        pending.append(trajectory)
        if (i + 1) % update_every == 0 or i == episodes - 1:
            batch = RolloutBatch.from_trajectories(
                pending, config.reward.gamma, config.agent.gae_lambda
            )
            agent.ppo_update(batch)
            pending = []
        curves.append(
            CurvePoint(
                agent=agent_key,
                server_type=e,
                episode=i,
                stage=stage,
                total_reward=trajectory.total_reward,
                objective=report.total_utility,
                g2_violations=int(report.total("g2_violations")),
                g3_violations=int(report.total("g3_violations")),
                elapsed_s=time.perf_counter() - started,
            )
        )
        if curriculum.record(trajectory.total_reward):
            _LOGGER.debug(
                "Type %d: reward stage %d reached after episode %d",
                e,
                curriculum.stage,
                i,
            )
    _LOGGER.info(
        "Trained type %d for %d episodes (stage %d)", e, episodes, curriculum.stage
    )
    return curves


def _episodes(config: ExperimentConfig, episodes: int | None) -> int:
    count = config.agent.episodes if episodes is None else episodes
    if count < 0:
        raise ValueError(f"Episode count cannot be negative: {count}")
    return count


def train_single(
    config: ExperimentConfig,
    *,
    episodes: int | None = None,
    seed: int | None = None,
    types: Sequence[int] | None = None,
    topology: RegionTopology | None = None,
) -> TrainingResult:
    """Train one shared agent on every server type in turn."""
    seed = config.episode.seed if seed is None else seed
    count = _episodes(config, episodes)
    runner = EpisodeRunner(config, topology)
    types = range(runner.topology.num_types) if types is None else types
    agent = new_agent(config, seed, one_hot=True)
    result = TrainingResult(agents={SHARED_AGENT: agent}, mode=MODE_SINGLE)
    for e in types:
        result.curves.extend(
            train_type(
                agent,
                config,
                e,
                episodes=count,
                seed=seed,
                runner=runner,
                agent_key=SHARED_AGENT,
            )
        )
    return result


async def train_parallel(
    config: ExperimentConfig,
    *,
    episodes: int | None = None,
    seed: int | None = None,
    types: Sequence[int] | None = None,
    topology: RegionTopology | None = None,
    max_workers: int | None = None,
) -> TrainingResult:
    """Train one agent per server type concurrently.

    Agent e is seeded with (seed, e) and trained by its own runner in a
    worker thread.
    """
    seed = config.episode.seed if seed is None else seed
    count = _episodes(config, episodes)
    topology = topology or build_region(config.region)
    types = list(range(topology.num_types) if types is None else types)
    agents = {e: new_agent(config, (seed, e), one_hot=False) for e in types}

    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        jobs = [
            loop.run_in_executor(
                executor,
                lambda e=e: train_type(
                    agents[e],
                    config,
                    e,
                    episodes=count,
                    seed=seed,
                    runner=EpisodeRunner(config, topology),
                    agent_key=e,
                ),
            )
            for e in types
        ]
        curves = await asyncio.gather(*jobs)
    result = TrainingResult(agents=agents, mode=MODE_PARALLEL)
    for per_type in curves:
        result.curves.extend(per_type)
    return result


def train(
    config: ExperimentConfig,
    mode: str = MODE_PARALLEL,
    *,
    episodes: int | None = None,
    seed: int | None = None,
    types: Sequence[int] | None = None,
    max_workers: int | None = None,
) -> TrainingResult:
    """Train agents in single or parallel mode.

    Raises:
        ValueError: If the mode is unknown.
        RasTrainingError: If an update diverges.
    """
    if mode == MODE_SINGLE:
        return train_single(config, episodes=episodes, seed=seed, types=types)
    if mode == MODE_PARALLEL:
        return asyncio.run(
            train_parallel(
                config,
                episodes=episodes,
                seed=seed,
                types=types,
                max_workers=max_workers,
            )
        )
    raise ValueError(f"Unknown training mode '{mode}'")
