"""Tests for the trace file parser."""

import pytest

from pyras.engine import EpisodeRunner
from pyras.exception_classes import RasParserError
from pyras.trace_parser import TraceParser, read_trace
from pyras.workload import write_trace

HEADER = "# horizon=5 reservations=2 types=1 seed=7\n"


def test_round_trip(small_config, tmp_path):
    """Test an exported trace reads back unchanged."""
    trace = EpisodeRunner(small_config).sample(3)
    assert len(trace) > 0
    path = tmp_path / "trace.txt"
    write_trace(trace, path)
    assert read_trace(path) == trace


def test_parse_rows():
    """Test rows map to requests sorted by arrival."""
    trace = TraceParser(HEADER + "1 0 300 3 5\n0 0 150 1 4\n").parse()
    assert trace.horizon == 5
    assert trace.rng_seed == 7
    assert [r.arrival_time for r in trace.requests] == [1, 3]
    assert trace.requests[1].reservation_id == 1
    assert trace.requests[1].demand == 300


def test_header_only():
    """Test a trace without requests is empty."""
    trace = TraceParser(HEADER).parse()
    assert len(trace) == 0
    assert trace.num_reservations == 2


def test_seed_defaults_to_zero():
    """Test the seed is optional in the metadata line."""
    parser = TraceParser("# horizon=5 reservations=2 types=1\n")
    assert parser.header["seed"] == 0


def test_missing_metadata():
    """Test the metadata line is required and complete."""
    with pytest.raises(RasParserError, match="no '#' metadata line"):
        TraceParser("0 0 150 1 4\n")
    with pytest.raises(RasParserError, match="no '#' metadata line"):
        TraceParser("")
    with pytest.raises(RasParserError, match="lacks: types"):
        TraceParser("# horizon=5 reservations=2\n")
    with pytest.raises(RasParserError, match="must be an integer"):
        TraceParser("# horizon=five reservations=2 types=1\n")
    with pytest.raises(RasParserError, match="Bad metadata token"):
        TraceParser("# horizon 5\n")


def test_malformed_rows():
    """Test short and non-numeric rows are refused."""
    with pytest.raises(RasParserError):
        TraceParser(HEADER + "0 0 150 1\n").parse()
    with pytest.raises(RasParserError, match="Malformed trace rows"):
        TraceParser(HEADER + "0 0 lots 1 4\n").parse()


def test_invalid_requests():
    """Test requests failing validation are reported with the source."""
    with pytest.raises(RasParserError, match="not after arrival"):
        TraceParser(HEADER + "0 0 150 4 4\n", "t.txt").parse()
    with pytest.raises(RasParserError, match="Reservation out of range"):
        TraceParser(HEADER + "2 0 150 1 4\n").parse()


def test_missing_file(tmp_path):
    """Test an unreadable file is reported."""
    with pytest.raises(RasParserError, match="Cannot read trace"):
        read_trace(tmp_path / "absent.txt")
