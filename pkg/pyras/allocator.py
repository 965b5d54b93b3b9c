"""Low-level server allocator.

Per server type, the allocator turns per-MSB server counts into a concrete
server-to-reservation mapping in three steps:

1. `spread_across_racks` splits each MSB count evenly over the MSB's racks,
   favouring racks that already hold servers of the reservation.
2. `resolve_overflow` trims rack over-subscription and re-places the
   trimmed servers, same MSB first.
3. `materialize` keeps servers on their previous reservation where quotas
   allow and fills the remaining quotas with free servers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Final

import numpy as np

from .exception_classes import RasAllocationError
from .models.assignment import UNASSIGNED, Assignment
from .models.topology import RegionTopology

_LOGGER: Final = logging.getLogger(__name__)


@dataclass(frozen=True)
class RackRequestMatrix:
    """Servers of one type each reservation takes from each rack.

    Attributes:
        type_id: Server type.
        m: Request counts, shape (L, K).
        shortfall: Servers per reservation that could not be placed anywhere.
    """

    type_id: int
    m: np.ndarray
    shortfall: np.ndarray | None = None

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=np.int64)
        if m.ndim != 2:
            raise ValueError("Rack request matrix must have shape (L, K)")
        if np.any(m < 0):
            raise ValueError("Rack request counts cannot be negative")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        if self.shortfall is None:
            shortfall = np.zeros(m.shape[0], dtype=np.int64)
        else:
            shortfall = np.array(self.shortfall, dtype=np.int64)
        shortfall.setflags(write=False)
        object.__setattr__(self, "shortfall", shortfall)

    def overflow(self, capacity: np.ndarray) -> np.ndarray:
        """Requests beyond capacity in each rack (u_k, may be negative)."""
        return self.m.sum(axis=0) - capacity

    @property
    def total_shortfall(self) -> int:
        return int(self.shortfall.sum())


def previous_rack_counts(
    prev: Assignment, l: int, e: int, topology: RegionTopology
) -> np.ndarray:
    """Servers of type e each rack gave to reservation l in `prev`."""
    mask = (prev.owner == l) & (topology.server_type == e)
    return np.bincount(topology.server_rack[mask], minlength=topology.num_racks)


def spread_across_racks(
    n: np.ndarray,
    prev: Assignment,
    l: int,
    e: int,
    topology: RegionTopology,
) -> np.ndarray:
    """Split per-MSB server counts of one reservation over racks.

    In every MSB the racks are ranked by the servers they held for the
    reservation at the previous slot (descending, ties by rack id). Every
    rack gets floor(n_f / racks) and the first n_f mod racks get one more.

    Args:
        n: Servers to take from each MSB, length F.
        prev: Assignment of the previous slot.
        l: Reservation id.
        e: Server type.
        topology: Region layout.

    Returns:
        Server counts per rack, length K.
    """
    n = np.asarray(n, dtype=np.int64)
    held = previous_rack_counts(prev, l, e, topology)
    row = np.zeros(topology.num_racks, dtype=np.int64)
    for msb_id, racks in enumerate(topology.racks_by_msb):
        count = int(n[msb_id])
        if count <= 0:
            continue
        ranked = sorted(racks, key=lambda k: (-held[k], k))
        quotient, remainder = divmod(count, len(ranked))
        row[ranked] = quotient
        row[ranked[:remainder]] += 1
    return row


def _trim_global_excess(
    m: np.ndarray, capacity: np.ndarray, shortfall: np.ndarray
) -> None:
    """Drop requests above the total type capacity, highest reservation first.

    Units come out of the most over-subscribed rack holding the reservation.
    """
    excess = int(m.sum() - capacity.sum())
    for i in range(m.shape[0] - 1, -1, -1):
        while excess > 0 and m[i].sum() > 0:
            load = m.sum(axis=0) - capacity
            load[m[i] == 0] = np.iinfo(np.int64).min
            k = int(np.argmax(load))
            m[i, k] -= 1
            shortfall[i] += 1
            excess -= 1
        if excess == 0:
            break


def _place_unit(
    m: np.ndarray,
    capacity: np.ndarray,
    rack_msb: np.ndarray,
    reservation: int,
    origin: int,
) -> int | None:
    """Put one trimmed server into the rack with the most vacancy.

    Racks of the origin rack's MSB are tried first; ties go to the lowest
    rack id.
    """
    vacancy = capacity - m.sum(axis=0)
    for candidates in (rack_msb == rack_msb[origin], np.ones_like(vacancy, bool)):
        masked = np.where(candidates & (vacancy > 0), vacancy, 0)
        if masked.max(initial=0) > 0:
            k = int(np.argmax(masked))
            m[reservation, k] += 1
            return k
    return None


def resolve_overflow(
    matrix: RackRequestMatrix, topology: RegionTopology, type_id: int
) -> RackRequestMatrix:
    """Make a rack request matrix fit the type capacity of every rack.

    Requests above the total type capacity are dropped from the highest
    reservation ids and reported as shortfall. Every rack still above its
    capacity is then trimmed from reservation L-1 down to 0, and each
    trimmed server is re-placed one at a time.

    Args:
        matrix: Output of spread_across_racks for every reservation.
        topology: Region layout.
        type_id: Server type of the matrix.

    Returns:
        A feasible RackRequestMatrix carrying the per-reservation shortfall.
    """
    capacity = topology.rack_type_capacity(type_id)
    m = matrix.m.copy()
    shortfall = matrix.shortfall.copy()
    if m.sum() > capacity.sum():
        _trim_global_excess(m, capacity, shortfall)
        _LOGGER.warning(
            "Type %d requests exceed its %d servers; shortfall per reservation %s",
            type_id,
            int(capacity.sum()),
            shortfall.tolist(),
        )

    rack_msb = topology.rack_msb
    for k in range(topology.num_racks):
        overflow = int(m[:, k].sum() - capacity[k])
        if overflow <= 0:
            continue
        trimmed: list[int] = []
        for i in range(m.shape[0] - 1, -1, -1):
            take = min(int(m[i, k]), overflow)
            m[i, k] -= take
            overflow -= take
            trimmed.extend([i] * take)
            if overflow == 0:
                break
        for i in trimmed:
            target = _place_unit(m, capacity, rack_msb, i, k)
            if target is None:
                # Unreachable once the global excess is gone.
                shortfall[i] += 1
                continue
            _LOGGER.debug(
                "Type %d: moved a request of reservation %d from rack %d to %d",
                type_id,
                i,
                k,
                target,
            )
    return RackRequestMatrix(type_id=type_id, m=m, shortfall=shortfall)


def materialize(
    matrix: RackRequestMatrix,
    prev: Assignment,
    type_id: int,
    topology: RegionTopology,
) -> Assignment:
    """Map servers of one type to reservations from rack quotas.

    A sticky pass first keeps servers on their previous reservation while
    that reservation still has quota in the rack. Expensive movers are
    kept first and equal-cost servers are released lowest id first. A fill
    pass then hands the free servers of the rack to the remaining quotas in
    ascending server id, reservations in ascending id.

    Args:
        matrix: Feasible rack request matrix of the type.
        prev: Assignment of the previous slot.
        type_id: Server type.
        topology: Region layout.

    Returns:
        Assignment covering only servers of the type; others are free.

    Raises:
        RasAllocationError: If the matrix does not fit the racks.
    """
    capacity = topology.rack_type_capacity(type_id)
    if matrix.m.shape != (topology.num_reservations, topology.num_racks):
        raise RasAllocationError(
            f"Rack request matrix has shape {matrix.m.shape}, expected "
            f"{(topology.num_reservations, topology.num_racks)}"
        )
    over = np.flatnonzero(matrix.m.sum(axis=0) > capacity)
    if over.size:
        raise RasAllocationError(
            f"Type {type_id} requests exceed the capacity of racks {over.tolist()}"
        )

    owner = np.full(topology.num_servers, UNASSIGNED, dtype=np.int64)
    type_mask = topology.server_type == type_id
    for k in range(topology.num_racks):
        quota = matrix.m[:, k].copy()
        if not quota.any():
            continue
        rack_servers = np.flatnonzero(type_mask & (topology.server_rack == k))
        order = sorted(
            rack_servers, key=lambda b: (-topology.server_movement_cost[b], -b)
        )
        for b in order:
            l = prev.owner[b]
            if l != UNASSIGNED and quota[l] > 0:
                owner[b] = l
                quota[l] -= 1
        free = rack_servers[owner[rack_servers] == UNASSIGNED]
        cursor = 0
        for l in range(len(quota)):
            take = int(quota[l])
            owner[free[cursor : cursor + take]] = l
            cursor += take
    return Assignment(owner)


def allocate_type(
    requests: np.ndarray,
    prev: Assignment,
    type_id: int,
    topology: RegionTopology,
) -> tuple[Assignment, RackRequestMatrix]:
    """Run the three allocator steps for one server type.

    Args:
        requests: Servers per (reservation, MSB), shape (L, F).
        prev: Assignment of the previous slot.
        type_id: Server type.
        topology: Region layout.

    Returns:
        The type's assignment and the feasible rack request matrix.
    """
    spread = np.stack(
        [
            spread_across_racks(requests[l], prev, l, type_id, topology)
            for l in range(topology.num_reservations)
        ]
    )
    feasible = resolve_overflow(
        RackRequestMatrix(type_id=type_id, m=spread), topology, type_id
    )
    return materialize(feasible, prev, type_id, topology), feasible
