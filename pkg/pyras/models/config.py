"""Experiment configuration models.

The configuration is a tree of frozen dataclasses. `dataclasses.replace`
derives variants, e.g. the movement cost sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..const import (
    CURRICULUM_STAGES,
    DEFAULT_ACTION_HIGH,
    DEFAULT_ACTION_LOW,
    DEFAULT_AFFINITY_PENALTY,
    DEFAULT_CLIP_RATIO,
    DEFAULT_CURRICULUM_PATIENCE,
    DEFAULT_CURRICULUM_TOLERANCE,
    DEFAULT_CURRICULUM_WINDOW,
    DEFAULT_EPOCHS,
    DEFAULT_GAE_LAMBDA,
    DEFAULT_GAMMA,
    DEFAULT_HIDDEN_SIZES,
    DEFAULT_LEARNING_RATE,
    DEFAULT_LOG_STD_INIT,
    DEFAULT_LOOKAHEAD,
    DEFAULT_MINIBATCH_SIZE,
    DEFAULT_OMEGA,
    DEFAULT_REDUNDANCY_PENALTY,
    DEFAULT_REWARD_WEIGHTS,
    DEFAULT_SEED,
    DEFAULT_TRAINING_EPISODES,
    DEFAULT_UPDATE_EVERY,
    DEFAULT_ZETA,
)
from .metrics import CostWeights
from .request import ComboSpec
from .topology import ServerTypeSpec


@dataclass(frozen=True)
class RegionConfig:
    """Hierarchy counts, hardware rows and request combinations."""

    num_dcs: int
    num_msbs: int
    num_racks: int
    num_reservations: int
    num_servers: int
    rru: int
    movement_cost: int
    server_types: tuple[ServerTypeSpec, ...]
    combos: tuple[ComboSpec, ...]

    @property
    def num_types(self) -> int:
        return len(self.server_types)


@dataclass(frozen=True)
class ObjectiveConfig:
    """Spread goals, utility weights and affinity constraint parameters."""

    alpha_msb: Fraction
    alpha_rack: Fraction
    kappa: float
    beta: float
    affinity: float
    theta: float


@dataclass(frozen=True)
class EpisodeConfig:
    """Episode length, look-ahead window and base seed."""

    horizon: int
    lookahead: int = DEFAULT_LOOKAHEAD
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class ConverterParams:
    """Action converter parameters.

    Attributes:
        zeta: Softmax temperature; 0 gives uniform fractions.
        omega: Base of the over-provision factor, above 1.
        action_low: Lower clamp of the over-provision logit.
        action_high: Upper clamp of the over-provision logit.
    """

    zeta: float = DEFAULT_ZETA
    omega: float = DEFAULT_OMEGA
    action_low: float = DEFAULT_ACTION_LOW
    action_high: float = DEFAULT_ACTION_HIGH

    def __post_init__(self) -> None:
        if self.zeta < 0:
            raise ValueError(f"zeta cannot be negative: {self.zeta}")
        if self.omega <= 1:
            raise ValueError(f"omega must exceed 1: {self.omega}")
        if self.action_low > self.action_high:
            raise ValueError("action_low cannot exceed action_high")


@dataclass(frozen=True)
class RewardParams:
    """Reward weights, violation penalties and discount factor."""

    weights: tuple[float, float, float, float] = DEFAULT_REWARD_WEIGHTS
    redundancy_penalty: float = DEFAULT_REDUNDANCY_PENALTY
    affinity_penalties: tuple[float, ...] = (DEFAULT_AFFINITY_PENALTY,)
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self) -> None:
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1): {self.gamma}")
        if self.redundancy_penalty < 0 or min(self.affinity_penalties) < 0:
            raise ValueError("Penalties cannot be negative")

    def affinity_penalty(self, dc_id: int) -> float:
        """Penalty of one datacenter; a single value applies to every DC."""
        if len(self.affinity_penalties) == 1:
            return self.affinity_penalties[0]
        return self.affinity_penalties[dc_id]


@dataclass(frozen=True)
class AgentParams:
    """Network shape and update settings of the learned policy."""

    hidden_sizes: tuple[int, ...] = DEFAULT_HIDDEN_SIZES
    log_std_init: float = DEFAULT_LOG_STD_INIT
    clip_ratio: float = DEFAULT_CLIP_RATIO
    gae_lambda: float = DEFAULT_GAE_LAMBDA
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = DEFAULT_EPOCHS
    minibatch_size: int = DEFAULT_MINIBATCH_SIZE
    update_every: int = DEFAULT_UPDATE_EVERY
    episodes: int = DEFAULT_TRAINING_EPISODES

    def __post_init__(self) -> None:
        if not 0 < self.clip_ratio < 1:
            raise ValueError(f"clip_ratio must lie in (0, 1): {self.clip_ratio}")


@dataclass(frozen=True)
class CurriculumParams:
    """Progressive reward schedule.

    Attributes:
        window: Episodes in the reward moving average.
        patience: Episodes between the compared moving averages.
        tolerance: Relative change below which the reward has plateaued.
        start_stage: Stage to start from; CURRICULUM_STAGES means full reward.
    """

    window: int = DEFAULT_CURRICULUM_WINDOW
    patience: int = DEFAULT_CURRICULUM_PATIENCE
    tolerance: float = DEFAULT_CURRICULUM_TOLERANCE
    start_stage: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.start_stage <= CURRICULUM_STAGES:
            raise ValueError(f"start_stage out of [1, {CURRICULUM_STAGES}]")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete experiment setup."""

    region: RegionConfig
    objective: ObjectiveConfig
    episode: EpisodeConfig
    converter: ConverterParams = field(default_factory=ConverterParams)
    reward: RewardParams = field(default_factory=RewardParams)
    agent: AgentParams = field(default_factory=AgentParams)
    curriculum: CurriculumParams = field(default_factory=CurriculumParams)

    def cost_weights(self) -> CostWeights:
        """CostWeights with the configured affinity for every (d, l, e)."""
        return CostWeights.uniform(
            self.region.num_dcs,
            self.region.num_reservations,
            self.region.num_types,
            beta=self.objective.beta,
            kappa=self.objective.kappa,
            theta=self.objective.theta,
            alpha_rack=self.objective.alpha_rack,
            alpha_msb=self.objective.alpha_msb,
            affinity=self.objective.affinity,
        )
