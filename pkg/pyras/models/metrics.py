"""Cost weights and per-step metric models."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class CostWeights:
    """Weights of the utility and parameters of the constraints.

    Attributes:
        beta: Cost per RRU outside the rack and MSB spread goals.
        kappa: Cost per RRU of the largest MSB contribution.
        theta: Allowed deviation from the datacenter affinity.
        alpha_rack: Rack spread fraction.
        alpha_msb: MSB spread fraction.
        affinity: Affinity A[d, l, e] of reservations to datacenters.
    """

    beta: float
    kappa: float
    theta: float
    alpha_rack: Fraction
    alpha_msb: Fraction
    affinity: np.ndarray

    def __post_init__(self) -> None:
        for name in ("alpha_rack", "alpha_msb"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must lie in (0, 1]: {value}")
        if self.theta < 0:
            raise ValueError(f"theta cannot be negative: {self.theta}")
        affinity = np.array(self.affinity, dtype=float)
        affinity.setflags(write=False)
        object.__setattr__(self, "affinity", affinity)

    @classmethod
    def uniform(
        cls,
        num_dcs: int,
        num_reservations: int,
        num_types: int,
        *,
        beta: float,
        kappa: float,
        theta: float,
        alpha_rack: Fraction,
        alpha_msb: Fraction,
        affinity: float,
    ) -> CostWeights:
        """Weights with the same affinity for every (d, l, e)."""
        return cls(
            beta=beta,
            kappa=kappa,
            theta=theta,
            alpha_rack=Fraction(alpha_rack),
            alpha_msb=Fraction(alpha_msb),
            affinity=np.full((num_dcs, num_reservations, num_types), affinity),
        )


@dataclass(frozen=True)
class TypeMetrics:
    """Cost terms and constraint slacks of one server type at one slot.

    Attributes:
        type_id: Server type.
        o1: Movement cost of the type's servers.
        o2: Rack spread cost per reservation.
        o3: MSB spread cost per reservation.
        o4: Largest MSB supply per reservation.
        g2_slack: Capacity redundancy slack per reservation.
        g3_slack: Affinity slack per (datacenter, reservation).
        servers_moved: Servers that left a reservation.
        utility: o1 + beta (sum o2 + sum o3) + kappa sum o4.
    """

    type_id: int
    o1: float
    o2: np.ndarray
    o3: np.ndarray
    o4: np.ndarray
    g2_slack: np.ndarray
    g3_slack: np.ndarray
    servers_moved: int
    utility: float

    @property
    def o2_total(self) -> float:
        return float(self.o2.sum())

    @property
    def o3_total(self) -> float:
        return float(self.o3.sum())

    @property
    def o4_total(self) -> float:
        return float(self.o4.sum())

    @property
    def g2_violations(self) -> int:
        return int(np.count_nonzero(self.g2_slack < 0))

    @property
    def g3_violations(self) -> int:
        return int(np.count_nonzero(self.g3_slack < 0))

    @property
    def redundancy_slack_total(self) -> float:
        return float(self.g2_slack.sum())


@dataclass(frozen=True)
class StepMetrics:
    """Metrics of one slot over every server type.

    Attributes:
        step: Slot index.
        per_type: Metrics of each server type, by type id.
        pretrim_g2_violations: Redundancy violations of the converter output
            before allocator trimming.
        shortfall: Servers trimmed by the allocator and not re-placed.
    """

    step: int
    per_type: tuple[TypeMetrics, ...]
    pretrim_g2_violations: int = 0
    shortfall: int = 0

    @property
    def o1_total(self) -> float:
        return sum(m.o1 for m in self.per_type)

    @property
    def o2_total(self) -> float:
        return sum(m.o2_total for m in self.per_type)

    @property
    def o3_total(self) -> float:
        return sum(m.o3_total for m in self.per_type)

    @property
    def o4_total(self) -> float:
        return sum(m.o4_total for m in self.per_type)

    @property
    def g2_violations(self) -> int:
        return sum(m.g2_violations for m in self.per_type)

    @property
    def g3_violations(self) -> int:
        return sum(m.g3_violations for m in self.per_type)

    @property
    def servers_moved(self) -> int:
        return sum(m.servers_moved for m in self.per_type)

    @property
    def redundancy_slack(self) -> np.ndarray:
        """g2 slack per (l, e)."""
        return np.stack([m.g2_slack for m in self.per_type], axis=1)

    @property
    def redundancy_slack_total(self) -> float:
        return sum(m.redundancy_slack_total for m in self.per_type)

    @property
    def utility(self) -> float:
        return sum(m.utility for m in self.per_type)


@dataclass
class EpisodeReport:
    """Per-step metrics of one episode plus its running totals.

    Attributes:
        episode: Episode index within an evaluation.
        seed: Seed the episode trace was sampled with.
        steps: Metrics of every slot.
        wall_clock_s: Seconds spent running the episode.
    """

    episode: int
    seed: int
    steps: list[StepMetrics] = field(default_factory=list)
    wall_clock_s: float = 0.0
    cumulative_utility: float = 0.0

    def add(self, metrics: StepMetrics) -> None:
        self.steps.append(metrics)
        self.cumulative_utility += metrics.utility

    @property
    def total_utility(self) -> float:
        return sum(step.utility for step in self.steps)

    def total(self, name: str) -> float:
        """Sum of one StepMetrics attribute over the episode."""
        return sum(getattr(step, name) for step in self.steps)
