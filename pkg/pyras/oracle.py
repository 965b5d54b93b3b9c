"""Exhaustive optimisation on tiny regions.

Every assignment of a type's servers is encoded as a base-(L+1) number with
server 0 as the most significant digit; digit 0 means unassigned and digit
l+1 means reservation l. Candidates are scanned in increasing code order, so
the first minimum found is also the lexicographically smallest one.

The utility and the constraints decompose per server type, so each type is
searched on its own and the per-type optima are combined.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from .const import (
    ORACLE_CHUNK_SIZE,
    ORACLE_MAX_HORIZON,
    ORACLE_MAX_HORIZON_STATES,
    ORACLE_MAX_RESERVATIONS,
    ORACLE_MAX_SERVERS,
)
from .engine import EnvState, EpisodeRunner
from .exception_classes import RasOracleSizeError
from .models.assignment import UNASSIGNED, Assignment
from .models.config import ExperimentConfig
from .models.metrics import CostWeights, EpisodeReport
from .models.request import DemandState, EpisodeTrace
from .models.topology import RegionTopology
from .objective import ObjectiveEvaluator
from .policies import Policy
from .workload import demand_at

_LOGGER: Final = logging.getLogger(__name__)

# Utilities are compared after rounding so float noise cannot break ties.
_DECIMALS: Final[int] = 9


@dataclass(frozen=True)
class OracleResult:
    """Optimal single-slot assignment.

    Attributes:
        assignment: The optimal assignment.
        utility: Its utility, recomputed by the objective evaluator.
        feasible: Whether it satisfies the redundancy and affinity
            constraints; False means none does and the cheapest overall
            assignment is returned.
    """

    assignment: Assignment
    utility: float
    feasible: bool


@dataclass(frozen=True)
class HorizonResult:
    """Assignment sequence over a short horizon.

    Attributes:
        assignments: Assignment of every slot 1..T.
        utilities: Utility of every slot.
        discounted_total: Sum of gamma ** (t - 1) times the slot utility.
        feasible: Whether every slot satisfies the constraints.
    """

    assignments: tuple[Assignment, ...]
    utilities: tuple[float, ...]
    discounted_total: float
    feasible: bool


def check_size(topology: RegionTopology, horizon: int | None = None) -> None:
    """Refuse instances above the enumeration bounds.

    Raises:
        RasOracleSizeError: If the region or horizon is too large.
    """
    if topology.num_servers > ORACLE_MAX_SERVERS:
        raise RasOracleSizeError(
            f"{topology.num_servers} servers exceed the oracle bound of "
            f"{ORACLE_MAX_SERVERS}"
        )
    if topology.num_reservations > ORACLE_MAX_RESERVATIONS:
        raise RasOracleSizeError(
            f"{topology.num_reservations} reservations exceed the oracle bound "
            f"of {ORACLE_MAX_RESERVATIONS}"
        )
    if horizon is not None and not 1 <= horizon <= ORACLE_MAX_HORIZON:
        raise RasOracleSizeError(
            f"Horizon {horizon} outside the oracle range [1, {ORACLE_MAX_HORIZON}]"
        )


class TypeSpace:
    """All assignments of the servers of one type.

    Attributes:
        servers: Server ids of the type, ascending.
        base: Number of choices per server (L + 1).
        size: Number of assignments.
    """

    def __init__(
        self, topology: RegionTopology, weights: CostWeights, type_id: int
    ) -> None:
        self.topology = topology
        self.weights = weights
        self.type_id = type_id
        self.servers = topology.type_servers(type_id)
        self.base = topology.num_reservations + 1
        self.size = self.base ** len(self.servers)
        self._powers = self.base ** np.arange(len(self.servers) - 1, -1, -1)
        self._rru = topology.server_rru[self.servers]
        self.movement_costs = topology.server_movement_cost[self.servers].astype(float)
        self._rack = np.eye(topology.num_racks, dtype=np.int64)[
            topology.server_rack[self.servers]
        ]
        self._msb = np.eye(topology.num_msbs, dtype=np.int64)[
            topology.server_msb[self.servers]
        ]
        self._dc = np.eye(topology.num_dcs, dtype=np.int64)[
            topology.server_dc[self.servers]
        ]

    def owners(self, start: int, stop: int) -> np.ndarray:
        """Owner rows (reservation or UNASSIGNED) of codes start..stop-1."""
        codes = np.arange(start, stop, dtype=np.int64)
        return (codes[:, None] // self._powers) % self.base - 1

    def evaluate(
        self, owners: np.ndarray, demand: DemandState, prev: np.ndarray | None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Utility and feasibility of candidate owner rows.

        Args:
            owners: Candidate rows, shape (N, servers of the type).
            demand: Demand of the slot.
            prev: Previous owners of the type's servers, or None to skip
                the movement cost.

        Returns:
            (utility, feasible), each of length N.
        """
        w = self.weights
        e = self.type_id
        n = len(owners)
        rack_num, rack_den = w.alpha_rack.numerator, w.alpha_rack.denominator
        msb_num, msb_den = w.alpha_msb.numerator, w.alpha_msb.denominator

        rack_excess = np.zeros(n, dtype=np.int64)
        msb_excess = np.zeros(n, dtype=np.int64)
        largest = np.zeros(n, dtype=np.int64)
        feasible = np.ones(n, dtype=bool)
        for l in range(self.topology.num_reservations):
            held = np.where(owners == l, self._rru, 0)
            rack = held @ self._rack
            msb = held @ self._msb
            c = int(demand[l, e])
            rack_excess += np.maximum(rack * rack_den - c * rack_num, 0).sum(axis=1)
            msb_excess += np.maximum(msb * msb_den - c * msb_num, 0).sum(axis=1)
            top = msb.max(axis=1, initial=0)
            largest += top
            feasible &= msb.sum(axis=1) - top - c >= 0
            if c > 0:
                share = (held @ self._dc) / c
                slack = w.theta - np.abs(share - w.affinity[:, l, e])
                feasible &= np.all(slack >= 0, axis=1)

        utility = (
            w.beta * (rack_excess / rack_den + msb_excess / msb_den)
            + w.kappa * largest
        )
        if prev is not None:
            moved = (prev != UNASSIGNED) & (owners != prev)
            utility = utility + moved @ self.movement_costs
        return np.round(utility, _DECIMALS), feasible

    def movement_matrix(self, owners: np.ndarray) -> np.ndarray:
        """Movement cost between every pair (from row, to row) of owners."""
        matrix = np.zeros((len(owners), len(owners)))
        for j, cost in enumerate(self.movement_costs):
            before = owners[:, j]
            moved = (before != UNASSIGNED)[:, None] & (
                before[:, None] != before[None, :]
            )
            matrix += cost * moved
        return matrix


def _best_of_type(
    space: TypeSpace, demand: DemandState, prev: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Lexicographically first optimum of one type (feasible ones first)."""
    best_feasible: tuple[float, int] | None = None
    best_any: tuple[float, int] | None = None
    for start in range(0, space.size, ORACLE_CHUNK_SIZE):
        stop = min(start + ORACLE_CHUNK_SIZE, space.size)
        utility, feasible = space.evaluate(space.owners(start, stop), demand, prev)
        i = int(np.argmin(utility))
        if best_any is None or utility[i] < best_any[0]:
            best_any = (float(utility[i]), start + i)
        if feasible.any():
            masked = np.where(feasible, utility, np.inf)
            i = int(np.argmin(masked))
            if best_feasible is None or masked[i] < best_feasible[0]:
                best_feasible = (float(masked[i]), start + i)
    assert best_any is not None
    code = best_feasible[1] if best_feasible is not None else best_any[1]
    return space.owners(code, code + 1)[0], best_feasible is not None


def exact_single_step(
    topology: RegionTopology,
    C: DemandState,
    prev: Assignment,
    weights: CostWeights,
) -> OracleResult:
    """Minimum-utility assignment of one slot by full enumeration.

    Args:
        topology: Region, at most ORACLE_MAX_SERVERS servers.
        C: Demand of the slot.
        prev: Assignment of the previous slot.
        weights: Utility weights and constraint parameters.

    Returns:
        The OracleResult.

    Raises:
        RasOracleSizeError: If the instance is above the enumeration bounds.
    """
    check_size(topology)
    owner = np.full(topology.num_servers, UNASSIGNED, dtype=np.int64)
    feasible = True
    for e in range(topology.num_types):
        space = TypeSpace(topology, weights, e)
        if not len(space.servers):
            continue
        best, ok = _best_of_type(space, C, prev.owner[space.servers])
        owner[space.servers] = best
        feasible &= ok
    assignment = Assignment(owner)
    utility = ObjectiveEvaluator(topology, weights).utility(prev, assignment, C).utility
    _LOGGER.debug("Oracle optimum %.3f (feasible %s)", utility, feasible)
    return OracleResult(assignment=assignment, utility=utility, feasible=feasible)


def _type_sequence(
    space: TypeSpace,
    demands: list[DemandState],
    prev: np.ndarray,
    gamma: float,
) -> tuple[list[np.ndarray], bool]:
    """Optimal owner sequence of one type by backward induction."""
    if space.size > ORACLE_MAX_HORIZON_STATES:
        raise RasOracleSizeError(
            f"Type {space.type_id} has {space.size} assignments, above the "
            f"horizon bound of {ORACLE_MAX_HORIZON_STATES}"
        )
    owners = space.owners(0, space.size)
    moves = space.movement_matrix(owners)
    start_moves = ((prev != UNASSIGNED) & (owners != prev)) @ space.movement_costs
    feasible = True
    slot_costs: list[tuple[float, np.ndarray, np.ndarray]] = []
    for t, demand in enumerate(demands):
        static, ok = space.evaluate(owners, demand, None)
        barrier = np.zeros(space.size)
        if ok.any():
            barrier[~ok] = np.inf
        else:
            feasible = False
        slot_costs.append((gamma**t, static, barrier))

    # future[s] = best discounted cost of slots t+1.. given state s at slot t
    future = np.zeros(space.size)
    futures = [future]
    for weight, static, barrier in reversed(slot_costs[1:]):
        total = weight * (moves + static[None, :]) + barrier[None, :] + future[None, :]
        future = total.min(axis=1)
        futures.append(future)
    futures.reverse()

    sequence: list[np.ndarray] = []
    state: int | None = None
    for t, (weight, static, barrier) in enumerate(slot_costs):
        incoming = start_moves if state is None else moves[state]
        total = weight * (incoming + static) + barrier + futures[t]
        state = int(np.argmin(np.round(total, _DECIMALS)))
        sequence.append(owners[state])
    return sequence, feasible


def _horizon_demands(trace: EpisodeTrace, horizon: int) -> list[DemandState]:
    if horizon > trace.horizon:
        raise ValueError(f"Horizon {horizon} exceeds the trace's {trace.horizon}")
    return [demand_at(trace, t) for t in range(1, horizon + 1)]


def _summarise(
    topology: RegionTopology,
    weights: CostWeights,
    demands: list[DemandState],
    assignments: list[Assignment],
    prev: Assignment,
    gamma: float,
    feasible: bool,
) -> HorizonResult:
    evaluator = ObjectiveEvaluator(topology, weights)
    utilities = []
    for t, (demand, x) in enumerate(zip(demands, assignments), start=1):
        utilities.append(evaluator.utility(prev, x, demand, step=t).utility)
        prev = x
    total = sum(gamma**t * u for t, u in enumerate(utilities))
    return HorizonResult(
        assignments=tuple(assignments),
        utilities=tuple(utilities),
        discounted_total=float(total),
        feasible=feasible,
    )


def exact_horizon(
    topology: RegionTopology,
    trace: EpisodeTrace,
    horizon: int,
    weights: CostWeights,
    gamma: float,
    prev: Assignment | None = None,
) -> HorizonResult:
    """Assignment sequence minimising the discounted utility of slots 1..T.

    Slot t is weighted by gamma ** (t - 1). Each slot keeps to constraint
    satisfying assignments when it has any. Ties go to the sequence whose
    earliest slots have the lowest codes.

    Raises:
        RasOracleSizeError: If the instance is above the enumeration bounds.
        ValueError: If the horizon is longer than the trace.
    """
    check_size(topology, horizon)
    prev = prev or Assignment.empty(topology.num_servers)
    demands = _horizon_demands(trace, horizon)
    owners = np.full((horizon, topology.num_servers), UNASSIGNED, dtype=np.int64)
    feasible = True
    for e in range(topology.num_types):
        space = TypeSpace(topology, weights, e)
        if not len(space.servers):
            continue
        sequence, ok = _type_sequence(space, demands, prev.owner[space.servers], gamma)
        for t, row in enumerate(sequence):
            owners[t, space.servers] = row
        feasible &= ok
    assignments = [Assignment(row) for row in owners]
    result = _summarise(topology, weights, demands, assignments, prev, gamma, feasible)
    _LOGGER.debug(
        "Horizon optimum %.3f over %d slots", result.discounted_total, horizon
    )
    return result


def myopic_sequence(
    topology: RegionTopology,
    trace: EpisodeTrace,
    horizon: int,
    weights: CostWeights,
    gamma: float,
    prev: Assignment | None = None,
) -> HorizonResult:
    """Chain single-slot optima, each starting from the previous one.

    Raises:
        RasOracleSizeError: If the instance is above the enumeration bounds.
    """
    check_size(topology, horizon)
    start = prev or Assignment.empty(topology.num_servers)
    demands = _horizon_demands(trace, horizon)
    assignments: list[Assignment] = []
    feasible = True
    current = start
    for demand in demands:
        result = exact_single_step(topology, demand, current, weights)
        assignments.append(result.assignment)
        feasible &= result.feasible
        current = result.assignment
    return _summarise(topology, weights, demands, assignments, start, gamma, feasible)


@dataclass(frozen=True)
class OracleComparison:
    """Pipeline and oracle utility of one slot, from the same previous state.

    Attributes:
        seed: Seed of the episode.
        step: Slot index.
        oracle_utility: Utility of the single-slot optimum.
        pipeline_utility: Utility the engine reported for its assignment.
        recomputed_utility: The pipeline assignment scored by the evaluator.
        oracle_feasible: Whether the optimum meets the constraints.
        pipeline_feasible: Whether the pipeline assignment meets them.
    """

    seed: int
    step: int
    oracle_utility: float
    pipeline_utility: float
    recomputed_utility: float
    oracle_feasible: bool
    pipeline_feasible: bool

    @property
    def dominated(self) -> bool:
        """Oracle at or below the pipeline wherever the bound applies.

        A feasible optimum only bounds feasible assignments, so an
        infeasible pipeline slot is not held against the oracle.
        """
        if self.oracle_feasible and not self.pipeline_feasible:
            return True
        return self.oracle_utility <= self.pipeline_utility + 10**-_DECIMALS


def compare_with_pipeline(
    policy: Policy,
    config: ExperimentConfig,
    seeds: Sequence[int],
    runner: EpisodeRunner | None = None,
) -> list[OracleComparison]:
    """Run episodes and score every slot against the single-slot optimum.

    Args:
        policy: Policy driving the pipeline.
        config: Configuration of a region within the enumeration bounds.
        seeds: One episode per seed.
        runner: Runner to reuse; one is built from config otherwise.

    Raises:
        RasOracleSizeError: If the region is above the enumeration bounds.
    """
    runner = runner or EpisodeRunner(config)
    topology = runner.topology
    check_size(topology)
    weights = config.cost_weights()
    types = tuple(range(topology.num_types))
    comparisons: list[OracleComparison] = []
    for i, seed in enumerate(seeds):
        trace = runner.sample(seed)
        policy.reset(seed)
        state = EnvState(
            t=0,
            trace=trace,
            demand=demand_at(trace, 0),
            assignment=Assignment.empty(topology.num_servers),
            report=EpisodeReport(episode=i, seed=seed),
        )
        for t in range(1, trace.horizon + 1):
            prev = state.assignment
            step = runner.step(state, policy, t, types)
            optimum = exact_single_step(topology, state.demand, prev, weights)
            recomputed = runner.evaluator.utility(
                prev, state.assignment, state.demand, step=t
            )
            comparisons.append(
                OracleComparison(
                    seed=seed,
                    step=t,
                    oracle_utility=optimum.utility,
                    pipeline_utility=step.utility,
                    recomputed_utility=recomputed.utility,
                    oracle_feasible=optimum.feasible,
                    pipeline_feasible=step.g2_violations + step.g3_violations == 0,
                )
            )
    failures = sum(not c.dominated for c in comparisons)
    if failures:
        _LOGGER.warning("Oracle above the pipeline on %d slot(s)", failures)
    _LOGGER.info("Compared %d slot(s) with the oracle", len(comparisons))
    return comparisons
