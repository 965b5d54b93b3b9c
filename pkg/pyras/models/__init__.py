"""Models for the pyras package.

This module provides the value types shared by every part of the simulator:

- ServerTypeSpec, Server, RegionTopology: the region hierarchy
- ComboSpec, CapacityRequest, EpisodeTrace, DemandState: the workload
- Assignment: the server-to-reservation mapping at one slot
- CostWeights, TypeMetrics, StepMetrics, EpisodeReport: objective results
- ExperimentConfig and its sections
"""

from __future__ import annotations

from .assignment import UNASSIGNED, Assignment
from .config import (
    AgentParams,
    ConverterParams,
    CurriculumParams,
    EpisodeConfig,
    ExperimentConfig,
    ObjectiveConfig,
    RegionConfig,
    RewardParams,
)
from .metrics import CostWeights, EpisodeReport, StepMetrics, TypeMetrics
from .request import CapacityRequest, ComboEntry, ComboSpec, DemandState, EpisodeTrace
from .topology import RegionTopology, Scope, Server, ServerTypeSpec

__all__ = [
    "UNASSIGNED",
    "AgentParams",
    "Assignment",
    "CapacityRequest",
    "ComboEntry",
    "ComboSpec",
    "ConverterParams",
    "CostWeights",
    "CurriculumParams",
    "DemandState",
    "EpisodeConfig",
    "EpisodeReport",
    "EpisodeTrace",
    "ExperimentConfig",
    "ObjectiveConfig",
    "RegionConfig",
    "RegionTopology",
    "RewardParams",
    "Scope",
    "Server",
    "ServerTypeSpec",
    "StepMetrics",
    "TypeMetrics",
]
