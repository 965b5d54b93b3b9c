"""Learned policy: state construction, agents and training."""

from .agent import (
    ActionSample,
    AgentCheckpoint,
    PPOAgent,
    UpdateDiagnostics,
    gaussian_log_prob,
    load_agents,
    save_agents,
)
from .buffer import RolloutBatch, Trajectory, compute_gae
from .network import Adam, Mlp
from .policy import SHARED_AGENT, AgentPolicy
from .state import build_state, state_dim, state_scales
from .trainer import (
    MODE_PARALLEL,
    MODE_SINGLE,
    Curriculum,
    CurvePoint,
    TrainingResult,
    new_agent,
    reward,
    train,
    train_parallel,
    train_single,
    train_type,
)

__all__ = [
    "MODE_PARALLEL",
    "MODE_SINGLE",
    "SHARED_AGENT",
    "ActionSample",
    "Adam",
    "AgentCheckpoint",
    "AgentPolicy",
    "Curriculum",
    "CurvePoint",
    "Mlp",
    "PPOAgent",
    "RolloutBatch",
    "TrainingResult",
    "Trajectory",
    "UpdateDiagnostics",
    "build_state",
    "compute_gae",
    "gaussian_log_prob",
    "load_agents",
    "new_agent",
    "reward",
    "save_agents",
    "state_dim",
    "state_scales",
    "train",
    "train_parallel",
    "train_single",
    "train_type",
]
