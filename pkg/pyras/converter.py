"""Action converter.

Turns a policy output into integer server counts per MSB: softmax fractions
with temperature zeta, an over-provision factor omega ** a, per-MSB RRU
amounts and finally server counts rounded up.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Final

import numpy as np

from .const import CEILING_TOLERANCE
from .models.config import ConverterParams
from .models.topology import RegionTopology

_LOGGER: Final = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyOutput:
    """Output of a policy for one (reservation, type) decision.

    Exactly one of `raw` (softmax path) or `fractions` (direct path) is set.

    Attributes:
        raw: Length F+1 vector: F MSB logits and the over-provision logit.
        fractions: Length F vector of demand fractions per MSB.
        z: Over-provision factor used with the direct path.
    """

    raw: np.ndarray | None = None
    fractions: np.ndarray | None = None
    z: float = 0.0

    def __post_init__(self) -> None:
        if (self.raw is None) == (self.fractions is None):
            raise ValueError("Exactly one of raw or fractions must be given")
        if self.raw is not None and not np.all(np.isfinite(self.raw)):
            raise ValueError("Raw action entries must be finite")
        if self.fractions is not None and np.any(np.asarray(self.fractions) < 0):
            raise ValueError("Direct-path fractions cannot be negative")
        if self.z < 0:
            raise ValueError(f"Over-provision factor cannot be negative: {self.z}")


@dataclass(frozen=True)
class MsbRequestVector:
    """Converter result for one (reservation, type).

    Attributes:
        n: Servers to take from each MSB.
        z: Over-provision factor.
        y: RRU to take from each MSB.
    """

    n: np.ndarray
    z: float
    y: np.ndarray


def softmax_fractions(a_msb: np.ndarray, zeta: float) -> np.ndarray:
    """Softmax of the MSB logits with temperature zeta.

    Raises:
        ValueError: If zeta is negative.
    """
    if zeta < 0:
        raise ValueError(f"zeta cannot be negative: {zeta}")
    scaled = zeta * np.asarray(a_msb, dtype=float)
    scaled -= scaled.max()
    weights = np.exp(scaled)
    return weights / weights.sum()


def over_provision(
    a_last: float, omega: float, low: float = -3.0, high: float = 0.0
) -> float:
    """Over-provision factor omega ** clamp(a_last, low, high).

    Raises:
        ValueError: If omega is not above 1.
    """
    if omega <= 1:
        raise ValueError(f"omega must exceed 1: {omega}")
    return float(omega ** min(max(float(a_last), low), high))


def to_server_counts(
    fractions: np.ndarray,
    z: float,
    demand: int | float,
    type_id: int,
    topology: RegionTopology,
) -> MsbRequestVector:
    """Servers of one type to take from each MSB.

    y_f = fraction_f (1 + z) C and n_f = ceil(y_f / mean RRU of the type).
    Rounding up never supplies less than the (1 + z) C target.
    """
    fractions = np.asarray(fractions, dtype=float)
    if demand <= 0:
        zeros = np.zeros(len(fractions))
        return MsbRequestVector(n=zeros.astype(np.int64), z=z, y=zeros)
    y = fractions * (1.0 + z) * demand
    mean_rru = topology.type_mean_rru(type_id)
    if mean_rru == 0:
        return MsbRequestVector(n=np.zeros(len(y), dtype=np.int64), z=z, y=y)
    n = np.ceil(y / mean_rru - CEILING_TOLERANCE).astype(np.int64)
    return MsbRequestVector(n=np.maximum(n, 0), z=z, y=y)


class ActionConverter:
    """Routes policy outputs through the softmax or direct path."""

    def __init__(self, topology: RegionTopology, params: ConverterParams) -> None:
        self.topology = topology
        self.params = params
        _LOGGER.debug("Action converter with %s", params)

    def convert(
        self, output: PolicyOutput, demand: int, type_id: int
    ) -> MsbRequestVector:
        """Server counts per MSB for one reservation and type."""
        if output.raw is not None:
            raw = np.asarray(output.raw, dtype=float)
            fractions = softmax_fractions(raw[:-1], self.params.zeta)
            z = over_provision(
                raw[-1],
                self.params.omega,
                self.params.action_low,
                self.params.action_high,
            )
        else:
            fractions = np.asarray(output.fractions, dtype=float)
            z = output.z
        if not math.isfinite(z):
            raise ValueError(f"Over-provision factor is not finite: {z}")
        return to_server_counts(fractions, z, demand, type_id, self.topology)
