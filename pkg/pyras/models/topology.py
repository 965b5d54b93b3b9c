"""Region topology models.

A region is a strict hierarchy: datacenters hold MSBs (independent power and
network fault domains), MSBs hold racks and racks hold servers. Every server
has a hardware type, a capacity in RRU and a movement cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

import numpy as np


class Scope(StrEnum):
    """Physical scope used to look up a partition cell."""

    RACK = "rack"
    MSB = "msb"
    DC = "dc"


@dataclass(frozen=True)
class ServerTypeSpec:
    """Hardware type row of the region setup.

    Attributes:
        type_id: Index of the type in [0, E).
        count: Number of servers of this type.
        mean_arrival_rate: Poisson rate of capacity requests per slot.
        combo_type: Index of the request combination drawn for this type.
    """

    type_id: int
    count: int
    mean_arrival_rate: float
    combo_type: int

    def __post_init__(self) -> None:
        """Validate the row.

        Raises:
            ValueError: If a field is negative.
        """
        if self.type_id < 0 or self.count < 0 or self.combo_type < 0:
            raise ValueError(f"Server type fields cannot be negative: {self}")
        if self.mean_arrival_rate < 0:
            raise ValueError(
                f"Arrival rate cannot be negative: {self.mean_arrival_rate}"
            )


@dataclass(frozen=True)
class Server:
    """A single server placed in the region.

    Attributes:
        server_id: Index in [0, B).
        type_id: Hardware type.
        rru: Capacity in relative resource units.
        rack_id: Rack holding the server.
        msb_id: MSB holding the rack.
        dc_id: Datacenter holding the MSB.
        movement_cost: Cost charged when the server leaves a reservation.
    """

    server_id: int
    type_id: int
    rru: int
    rack_id: int
    msb_id: int
    dc_id: int
    movement_cost: int

    def __post_init__(self) -> None:
        if self.rru <= 0:
            raise ValueError(f"Server RRU must be positive: {self.rru}")


@dataclass(frozen=True)
class RegionTopology:
    """Immutable region hierarchy with its partition indexes.

    The tuple fields are the canonical data; the numpy arrays are derived
    views used by the vectorised objective and allocator code.

    Attributes:
        num_dcs: Number of datacenters.
        num_msbs: Number of MSBs.
        num_racks: Number of racks.
        num_reservations: Number of reservations.
        num_types: Number of server types.
        servers: Servers ordered by server_id.
        racks_by_msb: Racks of each MSB, ascending.
        msbs_by_dc: MSBs of each datacenter, ascending.
    """

    num_dcs: int
    num_msbs: int
    num_racks: int
    num_reservations: int
    num_types: int
    servers: tuple[Server, ...]
    racks_by_msb: tuple[tuple[int, ...], ...]
    msbs_by_dc: tuple[tuple[int, ...], ...]

    @property
    def num_servers(self) -> int:
        """Total number of servers in the region."""
        return len(self.servers)

    @cached_property
    def servers_by_rack(self) -> tuple[tuple[int, ...], ...]:
        """Servers of each rack, ascending by server_id."""
        return self._partition(self.num_racks, lambda s: s.rack_id)

    @cached_property
    def servers_by_msb(self) -> tuple[tuple[int, ...], ...]:
        """Servers of each MSB, ascending by server_id."""
        return self._partition(self.num_msbs, lambda s: s.msb_id)

    @cached_property
    def servers_by_dc(self) -> tuple[tuple[int, ...], ...]:
        """Servers of each datacenter, ascending by server_id."""
        return self._partition(self.num_dcs, lambda s: s.dc_id)

    def _partition(self, size: int, key) -> tuple[tuple[int, ...], ...]:
        cells: list[list[int]] = [[] for _ in range(size)]
        for server in self.servers:
            cells[key(server)].append(server.server_id)
        return tuple(tuple(cell) for cell in cells)

    # Vectorised views

    @cached_property
    def server_type(self) -> np.ndarray:
        return self._frozen([s.type_id for s in self.servers])

    @cached_property
    def server_rru(self) -> np.ndarray:
        return self._frozen([s.rru for s in self.servers])

    @cached_property
    def server_rack(self) -> np.ndarray:
        return self._frozen([s.rack_id for s in self.servers])

    @cached_property
    def server_msb(self) -> np.ndarray:
        return self._frozen([s.msb_id for s in self.servers])

    @cached_property
    def server_dc(self) -> np.ndarray:
        return self._frozen([s.dc_id for s in self.servers])

    @cached_property
    def server_movement_cost(self) -> np.ndarray:
        return self._frozen([s.movement_cost for s in self.servers])

    @cached_property
    def rack_msb(self) -> np.ndarray:
        """MSB of each rack."""
        owners = np.empty(self.num_racks, dtype=np.int64)
        for msb_id, racks in enumerate(self.racks_by_msb):
            owners[list(racks)] = msb_id
        owners.setflags(write=False)
        return owners

    @staticmethod
    def _frozen(values: list[int]) -> np.ndarray:
        array = np.asarray(values, dtype=np.int64)
        array.setflags(write=False)
        return array

    def servers_in(
        self, scope: Scope | str, scope_id: int, type_id: int | None = None
    ) -> tuple[int, ...]:
        """Return the servers of one rack, MSB or datacenter.

        Args:
            scope: Which partition to look in.
            scope_id: Index of the rack, MSB or datacenter.
            type_id: Optional server type filter.

        Returns:
            Server ids ascending.

        Raises:
            ValueError: If the scope is unknown or the id is out of range.
        """
        cells = {
            Scope.RACK: self.servers_by_rack,
            Scope.MSB: self.servers_by_msb,
            Scope.DC: self.servers_by_dc,
        }[Scope(scope)]
        if not 0 <= scope_id < len(cells):
            raise ValueError(
                f"{Scope(scope).value} id {scope_id} out of range [0, {len(cells)})"
            )
        cell = cells[scope_id]
        if type_id is None:
            return cell
        return tuple(b for b in cell if self.servers[b].type_id == type_id)

    def type_servers(self, type_id: int) -> np.ndarray:
        """Server ids of one type, ascending."""
        return np.flatnonzero(self.server_type == type_id)

    def rack_type_capacity(self, type_id: int) -> np.ndarray:
        """Number of servers of one type physically in each rack."""
        return np.bincount(
            self.server_rack[self.server_type == type_id], minlength=self.num_racks
        )

    def msb_type_capacity(self, type_id: int) -> np.ndarray:
        """Number of servers of one type in each MSB."""
        return np.bincount(
            self.server_msb[self.server_type == type_id], minlength=self.num_msbs
        )

    def type_rru_total(self, type_id: int) -> int:
        """Total RRU of one server type."""
        return int(self.server_rru[self.server_type == type_id].sum())

    def type_mean_rru(self, type_id: int) -> float:
        """Mean server RRU of one type (|B_e| / sum U_b inverted)."""
        count = int(np.count_nonzero(self.server_type == type_id))
        if count == 0:
            return 0.0
        return self.type_rru_total(type_id) / count

    def dump(self) -> str:
        """Serialise the topology to a deterministic text dump."""
        lines = [
            f"region dcs={self.num_dcs} msbs={self.num_msbs} racks={self.num_racks} "
            f"servers={self.num_servers} reservations={self.num_reservations} "
            f"types={self.num_types}"
        ]
        for dc_id, msbs in enumerate(self.msbs_by_dc):
            lines.append(f"dc {dc_id} msbs={','.join(map(str, msbs))}")
        for msb_id, racks in enumerate(self.racks_by_msb):
            lines.append(f"msb {msb_id} racks={','.join(map(str, racks))}")
        for s in self.servers:
            lines.append(
                f"server {s.server_id} type={s.type_id} rru={s.rru} rack={s.rack_id} "
                f"msb={s.msb_id} dc={s.dc_id} move={s.movement_cost}"
            )
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return (
            f"<RegionTopology dcs={self.num_dcs} msbs={self.num_msbs} "
            f"racks={self.num_racks} servers={self.num_servers}>"
        )
