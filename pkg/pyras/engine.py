"""Episode engine.

Drives one episode slot by slot. Within a slot every server type is handled
on its own: reservations decide in ascending order, each decision goes
through the action converter, and the allocator turns the type's requests
into servers. Metrics compare each slot with the previous one.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Final

import numpy as np
import pandas as pd

from .allocator import allocate_type
from .const import CDF_COLUMNS, CEILING_TOLERANCE
from .converter import ActionConverter
from .models.assignment import UNASSIGNED, Assignment
from .models.config import ExperimentConfig
from .models.metrics import EpisodeReport, StepMetrics
from .models.request import DemandState, EpisodeTrace
from .models.topology import RegionTopology
from .objective import ObjectiveEvaluator
from .policies import DecisionContext, Policy
from .topology import build_region
from .workload import demand_at, sample_trace

_LOGGER: Final = logging.getLogger(__name__)


@dataclass
class EnvState:
    """Mutable state of a running episode.

    Attributes:
        t: Last completed slot.
        trace: Requests of the episode.
        demand: Demand at slot t.
        assignment: Assignment committed at slot t.
        report: Metrics collected so far.
    """

    t: int
    trace: EpisodeTrace
    demand: DemandState
    assignment: Assignment
    report: EpisodeReport


@dataclass
class EvaluationReport:
    """Episodes of an evaluation run and their empirical CDF."""

    episodes: list[EpisodeReport] = field(default_factory=list)

    @property
    def totals(self) -> np.ndarray:
        return np.array([report.total_utility for report in self.episodes])

    @property
    def cdf(self) -> pd.DataFrame:
        return empirical_cdf(self.totals)

    @property
    def median(self) -> float:
        return float(np.median(self.totals))


def empirical_cdf(totals: Sequence[float]) -> pd.DataFrame:
    """Sorted totals with percentile i/N for the i-th smallest (1-based)."""
    values = np.sort(np.asarray(totals, dtype=float))
    percentile = np.arange(1, len(values) + 1) / max(len(values), 1)
    return pd.DataFrame({CDF_COLUMNS[0]: values, CDF_COLUMNS[1]: percentile})


def msb_counts(
    assignment: Assignment, e: int, topology: RegionTopology
) -> np.ndarray:
    """Type-e servers each reservation holds in each MSB, shape (L, F)."""
    counts = np.zeros((topology.num_reservations, topology.num_msbs), dtype=np.int64)
    mask = (topology.server_type == e) & (assignment.owner != UNASSIGNED)
    np.add.at(counts, (assignment.owner[mask], topology.server_msb[mask]), 1)
    return counts


def pretrim_redundancy_violations(
    requests: np.ndarray, demand: np.ndarray, mean_rru: float
) -> int:
    """g2 violations of the converter output before allocator trimming.

    Args:
        requests: Servers per (reservation, MSB).
        demand: Demand of each reservation for the type.
        mean_rru: RRU of one server of the type.
    """
    supply = requests * mean_rru
    slack = supply.sum(axis=1) - supply.max(axis=1, initial=0) - demand
    # the converter ceiling may undershoot exact multiples by float noise
    tolerance = CEILING_TOLERANCE * mean_rru * requests.shape[1]
    return int(np.count_nonzero(slack < -tolerance))


class EpisodeRunner:
    """Runs episodes of one experiment configuration.

    The topology, converter and evaluator are built once and shared by
    every episode.
    """

    def __init__(
        self, config: ExperimentConfig, topology: RegionTopology | None = None
    ) -> None:
        self.config = config
        self.topology = topology or build_region(config.region)
        self.evaluator = ObjectiveEvaluator(self.topology, config.cost_weights())
        self.converter = ActionConverter(self.topology, config.converter)

    def sample(self, seed: int) -> EpisodeTrace:
        region = self.config.region
        return sample_trace(
            region.server_types,
            region.combos,
            self.config.episode.horizon,
            seed,
            region.num_reservations,
        )

    def run(
        self,
        policy: Policy,
        seed: int,
        *,
        episode: int = 0,
        trace: EpisodeTrace | None = None,
        types: Sequence[int] | None = None,
    ) -> EpisodeReport:
        """Run one episode.

        Args:
            policy: Policy deciding every (reservation, type).
            seed: Seed of the trace and of the policy's own randomness.
            episode: Index stored in the report.
            trace: Replay this trace instead of sampling one.
            types: Server types to allocate; all types by default.

        Returns:
            The EpisodeReport with one StepMetrics per slot.
        """
        started = time.perf_counter()
        topo = self.topology
        report = EpisodeReport(episode=episode, seed=seed)
        if trace is None:
            if self.config.episode.horizon < 1:
                return report
            trace = self.sample(seed)
        types = tuple(range(topo.num_types)) if types is None else tuple(types)
        policy.reset(seed)

        state = EnvState(
            t=0,
            trace=trace,
            demand=demand_at(trace, 0),
            assignment=Assignment.empty(topo.num_servers),
            report=report,
        )
        for t in range(1, trace.horizon + 1):
            self.step(state, policy, t, types)

        report.wall_clock_s = time.perf_counter() - started
        _LOGGER.info(
            "Episode %d (seed %d, %s) utility %.1f in %.2fs",
            episode,
            seed,
            policy.name,
            report.total_utility,
            report.wall_clock_s,
        )
        return report

    def step(
        self, state: EnvState, policy: Policy, t: int, types: Sequence[int]
    ) -> StepMetrics:
        """Advance the episode to slot t and commit its assignment."""
        topo = self.topology
        demand = demand_at(state.trace, t)
        prev = state.assignment
        cur = prev
        per_type = []
        pretrim = 0
        shortfall = 0
        for e in types:
            requests = self._decide_type(policy, state.trace, demand, prev, t, e)
            pretrim += pretrim_redundancy_violations(
                requests, demand.demand[:, e], topo.type_mean_rru(e)
            )
            typed, matrix = allocate_type(requests, prev, e, topo)
            cur = cur.with_servers(topo.type_servers(e), typed)
            shortfall += matrix.total_shortfall
            metrics = self.evaluator.type_metrics(prev, cur, demand, e)
            policy.observe(t, metrics)
            per_type.append(metrics)

        step = StepMetrics(
            step=t,
            per_type=tuple(per_type),
            pretrim_g2_violations=pretrim,
            shortfall=shortfall,
        )
        if _LOGGER.isEnabledFor(logging.DEBUG):
            moves = cur.diff(prev)
            _LOGGER.debug(
                "Slot %d: utility %.1f, %d servers changed %s",
                t,
                step.utility,
                len(moves),
                moves,
            )
        state.t = t
        state.demand = demand
        state.assignment = cur
        state.report.add(step)
        return step

    def _decide_type(
        self,
        policy: Policy,
        trace: EpisodeTrace,
        demand: DemandState,
        prev: Assignment,
        t: int,
        e: int,
    ) -> np.ndarray:
        """Servers per (reservation, MSB) requested for type e at slot t."""
        topo = self.topology
        prev_counts = msb_counts(prev, e, topo)
        requests = np.zeros_like(prev_counts)
        for l in range(topo.num_reservations):
            context = DecisionContext(
                topology=topo,
                trace=trace,
                t=t,
                l=l,
                e=e,
                lookahead=self.config.episode.lookahead,
                demand=demand,
                prev_counts=prev_counts,
                current_counts=requests.copy(),
            )
            output = policy.decide(context)
            requests[l] = self.converter.convert(output, demand[l, e], e).n
        return requests


def run_episode(
    policy: Policy,
    config: ExperimentConfig,
    seed: int,
    *,
    trace: EpisodeTrace | None = None,
    types: Sequence[int] | None = None,
) -> EpisodeReport:
    """Run a single episode of `config` with `policy`."""
    return EpisodeRunner(config).run(policy, seed, trace=trace, types=types)


def evaluate(
    policy: Policy,
    config: ExperimentConfig,
    episodes: int,
    seeds: Sequence[int] | None = None,
    *,
    runner: EpisodeRunner | None = None,
) -> EvaluationReport:
    """Run seeded episodes and collect their reports.

    Args:
        policy: Policy to evaluate.
        config: Experiment configuration.
        episodes: Number of episodes N.
        seeds: Seed per episode; defaults to the configured seed + i.
        runner: Runner to reuse; one is built from config otherwise.

    Returns:
        The EvaluationReport with per-episode reports and the CDF.

    Raises:
        ValueError: If episodes is below one or seeds has the wrong length.
    """
    if episodes < 1:
        raise ValueError(f"At least one episode is required, got {episodes}")
    if seeds is None:
        seeds = [config.episode.seed + i for i in range(episodes)]
    if len(seeds) != episodes:
        raise ValueError(f"Got {len(seeds)} seeds for {episodes} episodes")
    runner = runner or EpisodeRunner(config)
    result = EvaluationReport()
    for i, seed in enumerate(seeds):
        result.episodes.append(runner.run(policy, int(seed), episode=i))
    _LOGGER.info(
        "Evaluated %s over %d episodes: median utility %.1f",
        policy.name,
        episodes,
        result.median,
    )
    return result
