"""Region builder.

Lays servers out over datacenters, MSBs and racks. Racks are split evenly
over MSBs and MSBs over datacenters; servers are dealt round-robin over racks
in ascending type order, so each rack holds floor(B/K) or ceil(B/K) servers
and per-type counts per rack differ by at most one.
"""

from __future__ import annotations

import logging
from typing import Final

from .exception_classes import RasConfigError
from .models.config import RegionConfig
from .models.topology import RegionTopology, Server

_LOGGER: Final = logging.getLogger(__name__)


def _check_divisible(outer: str, outer_count: int, inner: str, inner_count: int) -> int:
    if outer_count <= 0 or inner_count <= 0:
        raise RasConfigError(
            f"Hierarchy counts must be positive: {outer}={outer_count}, "
            f"{inner}={inner_count}"
        )
    if inner_count % outer_count:
        raise RasConfigError(
            f"Cannot distribute {inner_count} {inner} evenly over "
            f"{outer_count} {outer} ({inner}/{outer} is not integral)"
        )
    return inner_count // outer_count


def build_region(config: RegionConfig) -> RegionTopology:
    """Build the region hierarchy from its configuration.

    Args:
        config: Hierarchy counts and per-type server rows.

    Returns:
        The immutable RegionTopology.

    Raises:
        RasConfigError: If the hierarchy cannot be laid out evenly, type
            counts do not add up to the server count, or a type points to a
            missing request combination.
    """
    msbs_per_dc = _check_divisible("dcs", config.num_dcs, "msbs", config.num_msbs)
    racks_per_msb = _check_divisible(
        "msbs", config.num_msbs, "racks", config.num_racks
    )

    type_total = sum(spec.count for spec in config.server_types)
    if type_total != config.num_servers:
        raise RasConfigError(
            f"Server type counts sum to {type_total}, expected {config.num_servers}"
        )
    for expected_id, spec in enumerate(config.server_types):
        if spec.type_id != expected_id:
            raise RasConfigError(
                f"Server types must be numbered 0..E-1 in order, got {spec.type_id} "
                f"at position {expected_id}"
            )
        if spec.combo_type >= len(config.combos):
            raise RasConfigError(
                f"Server type {spec.type_id} uses missing combination "
                f"{spec.combo_type}"
            )
    if config.rru <= 0:
        raise RasConfigError(f"Server RRU must be positive: {config.rru}")
    if config.num_servers % config.num_racks:
        _LOGGER.debug(
            "%d servers over %d racks is not integral; low racks take one extra.",
            config.num_servers,
            config.num_racks,
        )

    servers: list[Server] = []
    ordinal = 0
    for spec in config.server_types:
        for _ in range(spec.count):
            rack_id = ordinal % config.num_racks
            msb_id = rack_id // racks_per_msb
            servers.append(
                Server(
                    server_id=ordinal,
                    type_id=spec.type_id,
                    rru=config.rru,
                    rack_id=rack_id,
                    msb_id=msb_id,
                    dc_id=msb_id // msbs_per_dc,
                    movement_cost=config.movement_cost,
                )
            )
            ordinal += 1

    topology = RegionTopology(
        num_dcs=config.num_dcs,
        num_msbs=config.num_msbs,
        num_racks=config.num_racks,
        num_reservations=config.num_reservations,
        num_types=config.num_types,
        servers=tuple(servers),
        racks_by_msb=tuple(
            tuple(range(f * racks_per_msb, (f + 1) * racks_per_msb))
            for f in range(config.num_msbs)
        ),
        msbs_by_dc=tuple(
            tuple(range(d * msbs_per_dc, (d + 1) * msbs_per_dc))
            for d in range(config.num_dcs)
        ),
    )
    _LOGGER.info("Built region: %r", topology)
    return topology
