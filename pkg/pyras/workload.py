"""Capacity request generation and aggregation.

Requests arrive per server type as a Poisson process; each one draws a
(demand, duration) option from its type's combination and a reservation
uniformly at random. The whole episode is sampled up front.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Final

import numpy as np

from .models.request import CapacityRequest, ComboSpec, DemandState, EpisodeTrace
from .models.topology import ServerTypeSpec

_LOGGER: Final = logging.getLogger(__name__)


def sample_trace(
    specs: Sequence[ServerTypeSpec],
    combos: Sequence[ComboSpec],
    horizon: int,
    seed: int,
    num_reservations: int,
) -> EpisodeTrace:
    """Sample every capacity request of an episode.

    Draw order is fixed (slot, then type, then request), so a seed always
    yields the same trace.

    Args:
        specs: Server type rows with arrival rates and combination types.
        combos: Request combinations indexed by ServerTypeSpec.combo_type.
        horizon: Number of slots T.
        seed: Seed of the episode generator.
        num_reservations: Number of reservations L.

    Returns:
        The sampled EpisodeTrace.

    Raises:
        ValueError: If the horizon is below one or there are no reservations.
    """
    if horizon < 1:
        raise ValueError(f"Horizon must be at least one slot: {horizon}")
    if num_reservations < 1:
        raise ValueError("At least one reservation is required")

    rng = np.random.default_rng(seed)
    requests: list[CapacityRequest] = []
    for t in range(1, horizon + 1):
        for spec in specs:
            if spec.mean_arrival_rate <= 0:
                continue
            combo = combos[spec.combo_type]
            for _ in range(int(rng.poisson(spec.mean_arrival_rate))):
                pick = rng.choice(len(combo.entries), p=combo.probabilities)
                entry = combo.entries[int(pick)]
                requests.append(
                    CapacityRequest(
                        arrival_time=t,
                        expiry_time=t + entry.duration,
                        reservation_id=int(rng.integers(num_reservations)),
                        type_id=spec.type_id,
                        demand=entry.demand,
                    )
                )
    _LOGGER.debug(
        "Sampled %d requests over %d slots (seed %d)", len(requests), horizon, seed
    )
    return EpisodeTrace(
        requests=tuple(requests),
        horizon=horizon,
        num_reservations=num_reservations,
        num_types=len(specs),
        rng_seed=seed,
    )


def demand_at(trace: EpisodeTrace, t: int) -> DemandState:
    """Aggregate demand C[l, e] at slot t.

    A request counts while arrival_time <= t < expiry_time.

    Raises:
        ValueError: If t is outside [0, T].
    """
    if not 0 <= t <= trace.horizon:
        raise ValueError(f"Slot {t} outside [0, {trace.horizon}]")
    return DemandState(trace.demand_table[t])


def lookahead(
    trace: EpisodeTrace, l: int, e: int, t: int, h: int
) -> tuple[np.ndarray, np.ndarray]:
    """Demand of (l, e) expiring and arriving in slots t+1 .. t+h.

    Slots past the sampled range report zero.

    Returns:
        (expiring, arriving), each of length h.
    """
    expiring = np.zeros(h, dtype=np.int64)
    arriving = np.zeros(h, dtype=np.int64)
    last = trace.arrivals.shape[0] - 1
    for j in range(1, h + 1):
        slot = t + j
        if slot > last:
            break
        expiring[j - 1] = trace.expirations[slot, l, e]
        arriving[j - 1] = trace.arrivals[slot, l, e]
    return expiring, arriving


def lookahead_all(
    trace: EpisodeTrace, e: int, t: int, h: int
) -> tuple[np.ndarray, np.ndarray]:
    """lookahead for every reservation at once, shapes (L, h)."""
    expiring = np.zeros((trace.num_reservations, h), dtype=np.int64)
    arriving = np.zeros((trace.num_reservations, h), dtype=np.int64)
    stop = min(t + h, trace.arrivals.shape[0] - 1)
    if stop > t:
        expiring[:, : stop - t] = trace.expirations[t + 1 : stop + 1, :, e].T
        arriving[:, : stop - t] = trace.arrivals[t + 1 : stop + 1, :, e].T
    return expiring, arriving


def write_trace(trace: EpisodeTrace, path: str | Path) -> None:
    """Export a trace, one request per line: l e demand arrival expiry.

    Raises:
        OSError: If the file cannot be written.
    """
    lines = [
        f"# horizon={trace.horizon} reservations={trace.num_reservations} "
        f"types={trace.num_types} seed={trace.rng_seed}"
    ]
    lines.extend(
        f"{r.reservation_id} {r.type_id} {r.demand} {r.arrival_time} {r.expiry_time}"
        for r in trace.requests
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _LOGGER.debug("Wrote %d requests to %s", len(trace), path)
