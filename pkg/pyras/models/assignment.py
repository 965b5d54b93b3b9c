"""Server-to-reservation assignment model."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Final

import numpy as np

UNASSIGNED: Final[int] = -1


class Assignment:
    """Mapping of servers to at most one reservation at one slot.

    Each server holds either a reservation id or UNASSIGNED, so a server can
    never be assigned twice. Instances are immutable.

    Attributes:
        owner: Reservation of every server, UNASSIGNED for free servers.

    Example:
        ```python
        x = Assignment.from_mapping(4, {0: 1, 3: 0})
        x.get(0)  # 1
        x.get(1)  # None
        ```
    """

    __slots__ = ("owner",)

    def __init__(self, owner: Iterable[int] | np.ndarray) -> None:
        """Initialize an assignment from an owner vector.

        Args:
            owner: Reservation id per server, or UNASSIGNED.

        Raises:
            ValueError: If an entry is below UNASSIGNED.
        """
        array = np.array(owner, dtype=np.int64)
        if array.ndim != 1:
            raise ValueError("Owner vector must be one-dimensional")
        if array.size and array.min() < UNASSIGNED:
            raise ValueError("Owner entries must be reservation ids or UNASSIGNED")
        array.setflags(write=False)
        self.owner: np.ndarray = array

    @classmethod
    def empty(cls, num_servers: int) -> Assignment:
        return cls(np.full(num_servers, UNASSIGNED, dtype=np.int64))

    @classmethod
    def from_mapping(cls, num_servers: int, mapping: Mapping[int, int]) -> Assignment:
        """Build an assignment from a sparse server to reservation mapping."""
        owner = np.full(num_servers, UNASSIGNED, dtype=np.int64)
        for server_id, reservation_id in mapping.items():
            owner[server_id] = reservation_id
        return cls(owner)

    @property
    def num_servers(self) -> int:
        return int(self.owner.size)

    def get(self, server_id: int) -> int | None:
        """Reservation holding a server, or None."""
        value = int(self.owner[server_id])
        return None if value == UNASSIGNED else value

    def as_dict(self) -> dict[int, int]:
        """Sparse form: only assigned servers."""
        return {int(b): int(l) for b, l in enumerate(self.owner) if l != UNASSIGNED}

    def restricted_to(self, server_ids: np.ndarray) -> Assignment:
        """Keep only the given servers, releasing every other server."""
        owner = np.full(self.num_servers, UNASSIGNED, dtype=np.int64)
        owner[server_ids] = self.owner[server_ids]
        return Assignment(owner)

    def with_servers(self, server_ids: np.ndarray, other: Assignment) -> Assignment:
        """Copy of this assignment where the given servers follow `other`."""
        owner = self.owner.copy()
        owner[server_ids] = other.owner[server_ids]
        return Assignment(owner)

    def diff(self, prev: Assignment) -> list[tuple[int, int | None, int | None]]:
        """Servers whose reservation changed since `prev`.

        Returns:
            (server_id, previous reservation, current reservation) triples.
        """
        changed = np.flatnonzero(self.owner != prev.owner)
        return [(int(b), prev.get(int(b)), self.get(int(b))) for b in changed]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.owner, other.owner)

    def __hash__(self) -> int:
        return hash(self.owner.tobytes())

    def __repr__(self) -> str:
        assigned = int(np.count_nonzero(self.owner != UNASSIGNED))
        return f"<Assignment {assigned}/{self.num_servers} servers assigned>"
