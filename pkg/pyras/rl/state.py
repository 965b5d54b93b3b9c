"""State vector of the learned policy.

Layout, for reservation l and type e:

    l / L | MSB usage (F) | own demand | own previous counts (F)
    | own expiring (h) | own arriving (h) | others' mean demand
    | others' mean previous counts (F) | others' mean expiring (h)
    | others' mean arriving (h) | type one-hot (E, single-agent mode)

Demands and look-aheads are divided by the total RRU of the type; server
counts by the type's servers in each MSB. Every entry is clipped to [-1, 1].
"""

from __future__ import annotations

import numpy as np

from ..models.topology import RegionTopology
from ..policies import DecisionContext
from ..workload import lookahead_all


def state_dim(num_msbs: int, lookahead: int, num_types: int | None = None) -> int:
    """Length of the state vector; num_types adds the one-hot block."""
    return 3 + 3 * num_msbs + 4 * lookahead + (num_types or 0)


def state_scales(topology: RegionTopology) -> dict[str, list]:
    """Normalisation constants of every server type.

    Returns:
        "demand": total RRU per type; "msb_capacity": servers of each type
        per MSB.
    """
    return {
        "demand": [topology.type_rru_total(e) for e in range(topology.num_types)],
        "msb_capacity": [
            topology.msb_type_capacity(e).tolist() for e in range(topology.num_types)
        ],
    }


def _safe_ratio(values: np.ndarray, scale: np.ndarray | float) -> np.ndarray:
    scale = np.asarray(scale, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, values / np.where(scale > 0, scale, 1.0), 0.0)
    return ratio


def build_state(context: DecisionContext, one_hot: bool = False) -> np.ndarray:
    """State vector of one (reservation, type) decision.

    Args:
        context: Decision context from the episode engine.
        one_hot: Append the server type one-hot (single-agent mode).

    Returns:
        Finite float vector of length state_dim(F, h, E if one_hot).
    """
    topo = context.topology
    l, e, h = context.l, context.e, context.lookahead
    num_res = topo.num_reservations
    demand_scale = float(topo.type_rru_total(e))
    msb_capacity = topo.msb_type_capacity(e)

    demand = context.demand.demand[:, e].astype(float)
    expiring, arriving = lookahead_all(context.trace, e, context.t, h)
    others = np.arange(num_res) != l

    parts = [
        np.array([l / num_res]),
        _safe_ratio(context.msb_usage(), msb_capacity),
        _safe_ratio(demand[l : l + 1], demand_scale),
        _safe_ratio(context.prev_counts[l], msb_capacity),
        _safe_ratio(expiring[l], demand_scale),
        _safe_ratio(arriving[l], demand_scale),
    ]
    if others.any():
        parts += [
            _safe_ratio(demand[others].mean(keepdims=True), demand_scale),
            _safe_ratio(context.prev_counts[others].mean(axis=0), msb_capacity),
            _safe_ratio(expiring[others].mean(axis=0), demand_scale),
            _safe_ratio(arriving[others].mean(axis=0), demand_scale),
        ]
    else:
        parts.append(np.zeros(1 + topo.num_msbs + 2 * h))
    if one_hot:
        parts.append(np.eye(topo.num_types)[e])
    return np.clip(np.concatenate(parts), -1.0, 1.0)
