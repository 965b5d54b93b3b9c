"""Capacity request models.

Capacity requests arrive for a reservation, ask for RRU of one server type
and expire after a fixed duration. An episode trace holds every request of
an episode, sampled up front so future arrivals are observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..const import PROBABILITY_TOLERANCE


@dataclass(frozen=True)
class ComboEntry:
    """One (demand, probability, duration) option of a request combination."""

    demand: int
    probability: float
    duration: int

    def __post_init__(self) -> None:
        if self.demand <= 0:
            raise ValueError(f"Demand size must be positive: {self.demand}")
        if self.duration < 1:
            raise ValueError(f"Duration must be at least one slot: {self.duration}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"Probability out of [0, 1]: {self.probability}")


@dataclass(frozen=True)
class ComboSpec:
    """Capacity request combination type.

    Attributes:
        entries: Options drawn by probability when a request is generated.
    """

    entries: tuple[ComboEntry, ...]

    def __post_init__(self) -> None:
        """Validate the probabilities.

        Raises:
            ValueError: If there are no entries or probabilities do not sum to 1.
        """
        if not self.entries:
            raise ValueError("A combination needs at least one entry")
        total = math.fsum(entry.probability for entry in self.entries)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"Combination probabilities sum to {total}, not 1")

    @property
    def probabilities(self) -> np.ndarray:
        probs = np.array([entry.probability for entry in self.entries])
        return probs / probs.sum()


@dataclass(frozen=True, order=True)
class CapacityRequest:
    """A single capacity request.

    Ordering is by arrival time first so sorted traces replay in time order.

    Attributes:
        arrival_time: Slot the request becomes active.
        expiry_time: First slot the request is no longer active.
        reservation_id: Reservation asking for capacity.
        type_id: Server type asked for.
        demand: RRU asked for.
    """

    arrival_time: int
    expiry_time: int
    reservation_id: int
    type_id: int
    demand: int

    def __post_init__(self) -> None:
        if self.expiry_time <= self.arrival_time:
            raise ValueError(
                f"Request expires at {self.expiry_time}, not after arrival "
                f"{self.arrival_time}"
            )
        if self.demand < 0:
            raise ValueError(f"Demand cannot be negative: {self.demand}")

    @property
    def duration(self) -> int:
        return self.expiry_time - self.arrival_time

    def is_active(self, t: int) -> bool:
        return self.arrival_time <= t < self.expiry_time


@dataclass(frozen=True)
class DemandState:
    """Demand matrix C[l, e] at one slot, in RRU."""

    demand: np.ndarray

    def __post_init__(self) -> None:
        demand = np.array(self.demand, dtype=np.int64)
        if np.any(demand < 0):
            raise ValueError("Demand matrix cannot hold negative entries")
        demand.setflags(write=False)
        object.__setattr__(self, "demand", demand)

    def __getitem__(self, key: tuple[int, int]) -> int:
        return int(self.demand[key])

    @property
    def num_reservations(self) -> int:
        return self.demand.shape[0]

    @property
    def num_types(self) -> int:
        return self.demand.shape[1]

    @classmethod
    def zeros(cls, num_reservations: int, num_types: int) -> DemandState:
        return cls(np.zeros((num_reservations, num_types), dtype=np.int64))


@dataclass(frozen=True)
class EpisodeTrace:
    """Every capacity request of an episode, sorted by arrival.

    Attributes:
        requests: Requests sorted by arrival time.
        horizon: Number of slots T of the episode.
        num_reservations: Number of reservations L.
        num_types: Number of server types E.
        rng_seed: Seed the trace was sampled with.
    """

    requests: tuple[CapacityRequest, ...]
    horizon: int
    num_reservations: int
    num_types: int
    rng_seed: int = 0

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.requests, key=lambda r: r.arrival_time))
        object.__setattr__(self, "requests", ordered)
        for request in ordered:
            if not 0 <= request.reservation_id < self.num_reservations:
                raise ValueError(f"Reservation out of range in {request}")
            if not 0 <= request.type_id < self.num_types:
                raise ValueError(f"Server type out of range in {request}")

    @cached_property
    def _last_slot(self) -> int:
        last = max((r.expiry_time for r in self.requests), default=0)
        return max(self.horizon, last)

    @cached_property
    def arrivals(self) -> np.ndarray:
        """Demand arriving per slot, shape (slots, L, E)."""
        return self._per_slot(lambda r: r.arrival_time)

    @cached_property
    def expirations(self) -> np.ndarray:
        """Demand expiring per slot, shape (slots, L, E)."""
        return self._per_slot(lambda r: r.expiry_time)

    def _per_slot(self, slot_of) -> np.ndarray:
        table = np.zeros(
            (self._last_slot + 1, self.num_reservations, self.num_types), dtype=np.int64
        )
        for request in self.requests:
            table[slot_of(request), request.reservation_id, request.type_id] += (
                request.demand
            )
        table.setflags(write=False)
        return table

    @cached_property
    def demand_table(self) -> np.ndarray:
        """C[t, l, e] for every slot, arrivals counted before expirations."""
        table = np.cumsum(self.arrivals, axis=0) - np.cumsum(self.expirations, axis=0)
        table.setflags(write=False)
        return table

    def __len__(self) -> int:
        return len(self.requests)
