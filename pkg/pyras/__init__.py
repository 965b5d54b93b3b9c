"""Datacenter capacity reservation simulator.

Maps servers of a multi-datacenter region to reservations slot by slot:
policies decide per-MSB server shares, an action converter turns them into
server counts and a deterministic allocator picks the concrete servers.
Includes baseline policies, a PPO agent, an exact oracle for tiny regions
and CSV reporting.
"""

from __future__ import annotations

from typing import Final

from .__version import __version__
from .config_parser import (
    load_reference_config,
    parse_config,
    parse_config_text,
    serialize_config,
)
from .engine import EpisodeRunner, EvaluationReport, evaluate, run_episode
from .exception_classes import (
    RasAllocationError,
    RasConfigError,
    RasError,
    RasOracleSizeError,
    RasParserError,
    RasPolicyError,
    RasTrainingError,
)
from .models import (
    Assignment,
    CapacityRequest,
    EpisodeReport,
    EpisodeTrace,
    ExperimentConfig,
    RegionTopology,
    StepMetrics,
)
from .objective import ObjectiveEvaluator
from .policies import Policy, ProportionalPolicy, RandomPolicy, UniformPolicy
from .pyras import PyRas
from .reporting import emit_metrics, sweep_movement_cost
from .topology import build_region
from .trace_parser import read_trace
from .workload import sample_trace, write_trace

# Version information
VERSION: Final[str] = __version__

__all__ = [
    # Main entry point
    "PyRas",
    "VERSION",
    # Building blocks
    "EpisodeRunner",
    "EvaluationReport",
    "ObjectiveEvaluator",
    "build_region",
    "evaluate",
    "run_episode",
    "sample_trace",
    # Policies
    "Policy",
    "ProportionalPolicy",
    "RandomPolicy",
    "UniformPolicy",
    # Models
    "Assignment",
    "CapacityRequest",
    "EpisodeReport",
    "EpisodeTrace",
    "ExperimentConfig",
    "RegionTopology",
    "StepMetrics",
    # Files and reports
    "emit_metrics",
    "load_reference_config",
    "parse_config",
    "parse_config_text",
    "read_trace",
    "serialize_config",
    "sweep_movement_cost",
    "write_trace",
    # Exceptions
    "RasAllocationError",
    "RasConfigError",
    "RasError",
    "RasOracleSizeError",
    "RasParserError",
    "RasPolicyError",
    "RasTrainingError",
]
