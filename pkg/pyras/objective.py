"""Cost terms, constraint slacks and utility of an assignment.

All terms are computed per server type, which is what makes the utility
decompose exactly into per-type utilities. Spread thresholds multiply the
demand by the numerator of the spread fraction before dividing by its
denominator, so integral RRU inputs give exact results.
"""

from __future__ import annotations

import logging
from typing import Final

import numpy as np

from .models.assignment import UNASSIGNED, Assignment
from .models.metrics import CostWeights, StepMetrics, TypeMetrics
from .models.request import DemandState
from .models.topology import RegionTopology

_LOGGER: Final = logging.getLogger(__name__)


class ObjectiveEvaluator:
    """Evaluates the utility of assignments on one region.

    Attributes:
        topology: Region the assignments live on.
        weights: Utility weights and constraint parameters.
    """

    def __init__(self, topology: RegionTopology, weights: CostWeights) -> None:
        self.topology = topology
        self.weights = weights

    # Supply tables

    def supply(
        self, x: Assignment, type_id: int, scope_of: np.ndarray, size: int
    ) -> np.ndarray:
        """RRU of one type each reservation gets from each scope cell.

        Args:
            x: Assignment to evaluate.
            type_id: Server type.
            scope_of: Scope cell of every server (rack, MSB or DC vector).
            size: Number of scope cells.

        Returns:
            Array of shape (L, size).
        """
        topo = self.topology
        table = np.zeros((topo.num_reservations, size), dtype=np.int64)
        mask = (topo.server_type == type_id) & (x.owner != UNASSIGNED)
        np.add.at(table, (x.owner[mask], scope_of[mask]), topo.server_rru[mask])
        return table

    def rack_supply(self, x: Assignment, type_id: int) -> np.ndarray:
        topo = self.topology
        return self.supply(x, type_id, topo.server_rack, topo.num_racks)

    def msb_supply(self, x: Assignment, type_id: int) -> np.ndarray:
        topo = self.topology
        return self.supply(x, type_id, topo.server_msb, topo.num_msbs)

    def dc_supply(self, x: Assignment, type_id: int) -> np.ndarray:
        return self.supply(x, type_id, self.topology.server_dc, self.topology.num_dcs)

    # Individual terms

    def movement_cost(
        self, prev: Assignment, cur: Assignment, type_id: int | None = None
    ) -> float:
        """Cost of servers leaving a reservation between two slots."""
        moved = self._moved(prev, cur, type_id)
        return float(self.topology.server_movement_cost[moved].sum())

    def _moved(
        self, prev: Assignment, cur: Assignment, type_id: int | None
    ) -> np.ndarray:
        moved = (prev.owner != UNASSIGNED) & (prev.owner != cur.owner)
        if type_id is not None:
            moved &= self.topology.server_type == type_id
        return moved

    def _threshold(self, demand: np.ndarray | int, alpha) -> np.ndarray:
        return np.asarray(demand) * alpha.numerator / alpha.denominator

    def rack_spread_cost(
        self, x: Assignment, C: DemandState, l: int, e: int
    ) -> float:
        """RRU of type e beyond the rack spread goal of reservation l."""
        goal = self._threshold(C[l, e], self.weights.alpha_rack)
        excess = self.rack_supply(x, e)[l] - goal
        return float(np.maximum(excess, 0).sum())

    def msb_spread_cost(
        self, x: Assignment, C: DemandState, l: int, e: int
    ) -> float:
        """RRU of type e beyond the MSB spread goal of reservation l."""
        goal = self._threshold(C[l, e], self.weights.alpha_msb)
        excess = self.msb_supply(x, e)[l] - goal
        return float(np.maximum(excess, 0).sum())

    def largest_msb(self, x: Assignment, l: int, e: int) -> float:
        """Largest RRU of type e reservation l gets from a single MSB."""
        return float(self.msb_supply(x, e)[l].max(initial=0))

    def capacity_redundancy(
        self, x: Assignment, C: DemandState, l: int, e: int
    ) -> float:
        """Supply left after losing the largest MSB, minus demand (g2 slack)."""
        per_msb = self.msb_supply(x, e)[l]
        return float(per_msb.sum() - per_msb.max(initial=0) - C[l, e])

    def network_affinity(
        self, x: Assignment, C: DemandState, d: int, l: int, e: int
    ) -> float:
        """theta minus the deviation of the DC share from its affinity (g3 slack).

        Zero demand carries no affinity requirement and returns theta.
        """
        demand = C[l, e]
        if demand == 0:
            return float(self.weights.theta)
        share = self.dc_supply(x, e)[l, d] / demand
        return float(self.weights.theta - abs(share - self.weights.affinity[d, l, e]))

    # Aggregates

    def type_metrics(
        self, prev: Assignment, cur: Assignment, C: DemandState, e: int
    ) -> TypeMetrics:
        """Every term of one server type, vectorised over reservations."""
        w = self.weights
        demand = C.demand[:, e]
        moved = self._moved(prev, cur, e)
        o1 = float(self.topology.server_movement_cost[moved].sum())

        rack = self.rack_supply(cur, e)
        msb = self.msb_supply(cur, e)
        dc = self.dc_supply(cur, e)

        rack_goal = self._threshold(demand, w.alpha_rack)[:, None]
        msb_goal = self._threshold(demand, w.alpha_msb)[:, None]
        o2 = np.maximum(rack - rack_goal, 0).sum(axis=1).astype(float)
        o3 = np.maximum(msb - msb_goal, 0).sum(axis=1).astype(float)
        o4 = msb.max(axis=1, initial=0).astype(float)
        g2 = (msb.sum(axis=1) - o4 - demand).astype(float)

        g3 = np.full((self.topology.num_dcs, len(demand)), float(w.theta))
        active = demand > 0
        if np.any(active):
            share = dc[active].T / demand[active]
            g3[:, active] = w.theta - np.abs(share - w.affinity[:, active, e])

        spread = float(o2.sum()) + float(o3.sum())
        utility = o1 + w.beta * spread + w.kappa * float(o4.sum())
        return TypeMetrics(
            type_id=e,
            o1=o1,
            o2=o2,
            o3=o3,
            o4=o4,
            g2_slack=g2,
            g3_slack=g3,
            servers_moved=int(np.count_nonzero(moved)),
            utility=utility,
        )

    def utility_per_type(
        self, prev: Assignment, cur: Assignment, C: DemandState, e: int
    ) -> float:
        """Utility restricted to the servers and demand of type e."""
        return self.type_metrics(prev, cur, C, e).utility

    def utility(
        self, prev: Assignment, cur: Assignment, C: DemandState, step: int = 0
    ) -> StepMetrics:
        """Metrics of a whole slot; utility is the sum of per-type utilities."""
        metrics = StepMetrics(
            step=step,
            per_type=tuple(
                self.type_metrics(prev, cur, C, e)
                for e in range(self.topology.num_types)
            ),
        )
        _LOGGER.debug(
            "Step %d utility %.1f (g2 violations %d, g3 violations %d)",
            step,
            metrics.utility,
            metrics.g2_violations,
            metrics.g3_violations,
        )
        return metrics
