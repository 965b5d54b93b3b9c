"""Constants for the pyras package.

This module contains all constant values used throughout the package,
including converter and agent defaults, report column orders and
logging helpers.

Constants:
    VERSION: Current version of the package
    DEFAULT_*: Defaults for values a configuration may leave out
    *_COLUMNS: CSV column orders
    LOG_LEVEL_MAP: Mapping from string log levels to Python logging constants.
"""

from __future__ import annotations

import logging
import math
from typing import Final

from .__version import __version__

# Version information
VERSION: Final[str] = __version__

# Workload
DEFAULT_LOOKAHEAD: Final[int] = 5
DEFAULT_SEED: Final[int] = 0
PROBABILITY_TOLERANCE: Final[float] = 1e-9

# Action converter
DEFAULT_ZETA: Final[float] = 1.0
DEFAULT_OMEGA: Final[float] = math.e
DEFAULT_ACTION_LOW: Final[float] = -3.0
DEFAULT_ACTION_HIGH: Final[float] = 0.0
# Absorbs float noise before the ceiling so exact server multiples stay exact
CEILING_TOLERANCE: Final[float] = 1e-9

# Reward and agent
DEFAULT_REWARD_WEIGHTS: Final[tuple[float, float, float, float]] = (1.0, 1.0, 1.0, 1.0)
DEFAULT_REDUNDANCY_PENALTY: Final[float] = 50.0
DEFAULT_AFFINITY_PENALTY: Final[float] = 50.0
DEFAULT_GAMMA: Final[float] = 0.99
DEFAULT_GAE_LAMBDA: Final[float] = 0.95
DEFAULT_CLIP_RATIO: Final[float] = 0.2
DEFAULT_LEARNING_RATE: Final[float] = 3e-4
DEFAULT_EPOCHS: Final[int] = 10
DEFAULT_MINIBATCH_SIZE: Final[int] = 64
DEFAULT_UPDATE_EVERY: Final[int] = 5
DEFAULT_HIDDEN_SIZES: Final[tuple[int, ...]] = (64, 64)
DEFAULT_LOG_STD_INIT: Final[float] = -0.5
DEFAULT_TRAINING_EPISODES: Final[int] = 400

# Progressive reward: o1, o2, o3, o4, penalties
CURRICULUM_STAGES: Final[int] = 5
DEFAULT_CURRICULUM_WINDOW: Final[int] = 50
DEFAULT_CURRICULUM_PATIENCE: Final[int] = 25
DEFAULT_CURRICULUM_TOLERANCE: Final[float] = 0.02

# Oracle enumeration bounds
ORACLE_MAX_SERVERS: Final[int] = 12
ORACLE_MAX_RESERVATIONS: Final[int] = 3
ORACLE_MAX_HORIZON: Final[int] = 3
# Per-type state count for the horizon search (transitions are quadratic in it)
ORACLE_MAX_HORIZON_STATES: Final[int] = 1024
ORACLE_CHUNK_SIZE: Final[int] = 1 << 18

# Experiments
SWEEP_MOVEMENT_COSTS: Final[tuple[int, ...]] = (5, 10, 25, 50)
SWEEP_EPISODES: Final[int] = 5
EVALUATION_EPISODES: Final[int] = 30

# Checkpoints
CHECKPOINT_FORMAT_VERSION: Final[int] = 2

# CSV schemas
STEP_COLUMNS: Final[tuple[str, ...]] = (
    "episode",
    "step",
    "server_type",
    "o1",
    "o2",
    "o3",
    "o4",
    "utility",
    "g2_violations",
    "g3_violations",
    "redundancy_slack_total",
)
EPISODE_COLUMNS: Final[tuple[str, ...]] = (
    "episode",
    "seed",
    "total_utility",
    "o1_total",
    "o2_total",
    "o3_total",
    "o4_total",
    "g2_violations",
    "g3_violations",
    "pretrim_g2_violations",
    "servers_moved",
    "shortfall",
)
TIMING_COLUMNS: Final[tuple[str, ...]] = ("episode", "seed", "wall_clock_s")
CDF_COLUMNS: Final[tuple[str, ...]] = ("total_utility", "percentile")
SWEEP_COLUMNS: Final[tuple[str, ...]] = (
    "movement_cost",
    "episode",
    "seed",
    "total_utility",
    "servers_moved",
    "o1_total",
    "o2_total",
    "o3_total",
    "o4_total",
    "g2_violations",
    "g3_violations",
    "redundancy_slack_total",
)
CURVE_COLUMNS: Final[tuple[str, ...]] = (
    "agent",
    "server_type",
    "episode",
    "stage",
    "total_reward",
    "objective",
    "g2_violations",
    "g3_violations",
    "elapsed_s",
)

# Logging
LOG_LEVEL_MAP: Final[dict[str, int]] = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}
