"""Parser for exported episode traces.

A trace file starts with a metadata line

    # horizon=30 reservations=20 types=10 seed=0

followed by one request per line: `l e demand arrival expiry`, separated by
whitespace. Files written by `workload.write_trace` read back unchanged.
"""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import Final

import pandas as pd

from .exception_classes import RasParserError
from .models.request import CapacityRequest, EpisodeTrace

_LOGGER: Final = logging.getLogger(__name__)

TRACE_COLUMNS: Final[tuple[str, ...]] = (
    "reservation_id",
    "type_id",
    "demand",
    "arrival_time",
    "expiry_time",
)
REQUIRED_HEADER_KEYS: Final[frozenset[str]] = frozenset(
    {"horizon", "reservations", "types"}
)


class TraceParser:
    """Reads an EpisodeTrace from the line format.

    Attributes:
        text: Content of the trace file.
        source: Name used in messages.
    """

    def __init__(self, text: str, source: str = "<string>") -> None:
        """Store the text and read its metadata line.

        Raises:
            RasParserError: If the metadata line is missing or malformed.
        """
        self.text = text
        self.source = source
        self.header = self._parse_header()
        _LOGGER.debug("TraceParser initialised for %s: %s", source, self.header)

    def _parse_header(self) -> dict[str, int]:
        """Read `key=value` pairs from the first line.

        Returns:
            Metadata values; seed defaults to 0.

        Raises:
            RasParserError: If a required key is missing or not an integer.
        """
        first = self.text.lstrip().splitlines()[0] if self.text.strip() else ""
        if not first.startswith("#"):
            raise RasParserError(f"Trace {self.source} has no '#' metadata line")
        header: dict[str, int] = {"seed": 0}
        for token in first.lstrip("#").split():
            key, sep, value = token.partition("=")
            if not sep:
                raise RasParserError(f"Bad metadata token '{token}' in {self.source}")
            try:
                header[key] = int(value)
            except ValueError as err:
                raise RasParserError(
                    f"Metadata {key} must be an integer in {self.source}, got '{value}'"
                ) from err
        missing = REQUIRED_HEADER_KEYS - set(header)
        if missing:
            raise RasParserError(
                f"Trace {self.source} metadata lacks: {', '.join(sorted(missing))}"
            )
        return header

    def _read_frame(self) -> pd.DataFrame:
        try:
            frame = pd.read_csv(
                io.StringIO(self.text),
                sep=r"\s+",
                comment="#",
                header=None,
                names=list(TRACE_COLUMNS),
                dtype="int64",
            )
        except pd.errors.EmptyDataError:
            return pd.DataFrame(columns=list(TRACE_COLUMNS), dtype="int64")
        except (ValueError, pd.errors.ParserError) as err:
            _LOGGER.error("Failed to read trace rows from %s", self.source)
            raise RasParserError(
                f"Malformed trace rows in {self.source}: {err}"
            ) from err
        if frame.isna().any().any():
            raise RasParserError(
                f"Trace rows in {self.source} need {len(TRACE_COLUMNS)} fields"
            )
        return frame

    def parse(self) -> EpisodeTrace:
        """Build the trace.

        Raises:
            RasParserError: If a row is malformed or out of range.
        """
        frame = self._read_frame()
        try:
            requests = tuple(
                CapacityRequest(
                    arrival_time=int(row.arrival_time),
                    expiry_time=int(row.expiry_time),
                    reservation_id=int(row.reservation_id),
                    type_id=int(row.type_id),
                    demand=int(row.demand),
                )
                for row in frame.itertuples(index=False)
            )
            trace = EpisodeTrace(
                requests=requests,
                horizon=self.header["horizon"],
                num_reservations=self.header["reservations"],
                num_types=self.header["types"],
                rng_seed=self.header["seed"],
            )
        except ValueError as err:
            raise RasParserError(f"Invalid request in {self.source}: {err}") from err
        _LOGGER.debug("Read %d requests from %s", len(trace), self.source)
        return trace


def read_trace(path: str | Path) -> EpisodeTrace:
    """Read a trace file written by `write_trace`.

    Raises:
        RasParserError: If the file cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise RasParserError(f"Cannot read trace {path}: {err}") from err
    return TraceParser(text, str(path)).parse()
