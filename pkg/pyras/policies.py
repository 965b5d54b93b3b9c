"""Allocation policies.

A policy sees one (reservation, type) decision at a time and returns a
PolicyOutput for the action converter. The heuristic baselines use the
converter's direct path; the random baseline and the learned agent use the
softmax path.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Final

import numpy as np

from .converter import PolicyOutput
from .exception_classes import RasConfigError, RasPolicyError
from .models.metrics import TypeMetrics
from .models.request import DemandState, EpisodeTrace
from .models.topology import RegionTopology

_LOGGER: Final = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionContext:
    """What a policy can observe when deciding for reservation l and type e.

    Attributes:
        topology: Region layout.
        trace: Episode trace, used for the look-ahead window.
        t: Current slot.
        l: Reservation deciding.
        e: Server type being allocated.
        lookahead: Look-ahead window h.
        demand: Aggregate demand at slot t.
        prev_counts: Type-e servers per (reservation, MSB) at slot t-1.
        current_counts: Servers per (reservation, MSB) already requested at
            slot t; rows of reservations after l are zero.
    """

    topology: RegionTopology
    trace: EpisodeTrace
    t: int
    l: int
    e: int
    lookahead: int
    demand: DemandState
    prev_counts: np.ndarray
    current_counts: np.ndarray

    @property
    def own_demand(self) -> int:
        return int(self.demand[self.l, self.e])

    def msb_usage(self) -> np.ndarray:
        """Type-e servers per MSB held by any reservation right now.

        Reservations that already decided at this slot count with their new
        request, the others with their previous holding.
        """
        l = self.l
        return self.current_counts[:l].sum(axis=0) + self.prev_counts[l:].sum(axis=0)

    def availability(self) -> MsbAvailability:
        """Type-e servers per MSB not held by other reservations."""
        capacity = self.topology.msb_type_capacity(self.e)
        others = self.msb_usage() - self.prev_counts[self.l]
        return MsbAvailability(np.maximum(capacity - others, 0))


@dataclass(frozen=True)
class MsbAvailability:
    """Free servers of one type in each MSB."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64)
        if np.any(counts < 0):
            raise ValueError("Availability counts cannot be negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def random_policy(rng: np.random.Generator, num_msbs: int) -> PolicyOutput:
    """F+1 raw action entries drawn uniformly from [-1, 1]."""
    return PolicyOutput(raw=rng.uniform(-1.0, 1.0, size=num_msbs + 1))


def uniform_policy(num_msbs: int) -> PolicyOutput:
    """Fraction 1/(F-1) on every MSB with no extra over-provision.

    Raises:
        RasConfigError: If there are fewer than two MSBs.
    """
    if num_msbs < 2:
        raise RasConfigError(
            f"The uniform policy needs at least two MSBs, got {num_msbs}"
        )
    return PolicyOutput(fractions=np.full(num_msbs, 1.0 / (num_msbs - 1)), z=0.0)


def proportional_policy(avail: MsbAvailability) -> PolicyOutput:
    """Fractions proportional to free servers, scaled by 1/(1 - largest share).

    The fractions stay in MSB order; only the largest share sets the scale.

    Raises:
        RasPolicyError: If nothing is available or every free server sits in
            one MSB.
    """
    total = avail.total
    if total <= 0:
        raise RasPolicyError("No free servers to split the demand over")
    delta = avail.counts / total
    largest = float(delta.max())
    if largest >= 1.0:
        raise RasPolicyError(
            "Every free server is in one MSB; the demand cannot survive its loss"
        )
    return PolicyOutput(fractions=delta / (1.0 - largest), z=0.0)


class Policy(ABC):
    """Decision maker for the high-level tier."""

    name: str = "policy"

    def reset(self, seed: int) -> None:
        """Prepare for a new episode sampled with `seed`."""

    @abstractmethod
    def decide(self, context: DecisionContext) -> PolicyOutput:
        """Policy output for one (reservation, type) decision."""

    def observe(self, t: int, metrics: TypeMetrics) -> None:
        """Receive the metrics of a type once its slot-t mapping is done."""


class RandomPolicy(Policy):
    """Uniform random softmax logits, reseeded every episode.

    Each episode stream is drawn from the policy seed and the episode seed.
    """

    name = "random"

    def __init__(self, seed: int = 0) -> None:
        self.seed = seed
        self._rng = np.random.default_rng([seed, 1])

    def reset(self, seed: int) -> None:
        self._rng = np.random.default_rng([seed, 1, self.seed])

    def decide(self, context: DecisionContext) -> PolicyOutput:
        return random_policy(self._rng, context.topology.num_msbs)


class UniformPolicy(Policy):
    name = "uniform"

    def decide(self, context: DecisionContext) -> PolicyOutput:
        return uniform_policy(context.topology.num_msbs)


class ProportionalPolicy(Policy):
    """Proportional baseline; falls back to uniform when it has no answer."""

    name = "proportional"

    def decide(self, context: DecisionContext) -> PolicyOutput:
        try:
            return proportional_policy(context.availability())
        except RasPolicyError as err:
            _LOGGER.warning(
                "Proportional policy fell back to uniform at t=%d l=%d e=%d: %s",
                context.t,
                context.l,
                context.e,
                err,
            )
            return uniform_policy(context.topology.num_msbs)
