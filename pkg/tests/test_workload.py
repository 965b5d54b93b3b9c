"""Tests for request sampling and demand aggregation."""

import numpy as np
import pytest

from pyras.models import CapacityRequest, EpisodeTrace
from pyras.workload import demand_at, lookahead, lookahead_all, sample_trace


def _single_request_trace() -> EpisodeTrace:
    return EpisodeTrace(
        requests=(
            CapacityRequest(
                arrival_time=3, expiry_time=13, reservation_id=2, type_id=1, demand=300
            ),
        ),
        horizon=15,
        num_reservations=3,
        num_types=2,
    )


def test_fixed_combo_requests(reference_config):
    """Test a type with a single combo entry only asks 150 RRU for 15 slots."""
    region = reference_config.region
    type_3 = [
        r
        for seed in range(5)
        for r in sample_trace(region.server_types, region.combos, 30, seed, 20)
        if r.type_id == 3
    ]
    assert type_3
    assert all(r.demand == 150 and r.duration == 15 for r in type_3)


def test_zero_rates_give_empty_trace(config_factory):
    """Test zero arrival rates produce no requests."""
    region = config_factory(types=((4, 0.0, 0),)).region
    trace = sample_trace(region.server_types, region.combos, 10, 0, 1)
    assert len(trace) == 0
    assert not trace.demand_table.any()


def test_arrival_count_matches_rate(reference_config):
    """Test the mean request count of type 0 over 30 slots is near 2.0 * 30."""
    region = reference_config.region
    specs = region.server_types[:1]
    counts = [
        len(sample_trace(specs, region.combos, 30, seed, 20)) for seed in range(200)
    ]
    standard_error = np.sqrt(60.0) / np.sqrt(len(counts))
    assert abs(np.mean(counts) - 60.0) <= 3 * standard_error


def test_same_seed_same_trace(small_config):
    """Test sampling is reproducible."""
    region = small_config.region
    first = sample_trace(region.server_types, region.combos, 6, 11, 4)
    second = sample_trace(region.server_types, region.combos, 6, 11, 4)
    assert first == second


def test_horizon_must_be_positive(small_config):
    """Test sampling an empty horizon fails."""
    region = small_config.region
    with pytest.raises(ValueError, match="Horizon"):
        sample_trace(region.server_types, region.combos, 0, 0, 4)


def test_demand_of_single_request():
    """Test a request counts from its arrival up to, not including, expiry."""
    trace = _single_request_trace()
    assert demand_at(trace, 2)[2, 1] == 0
    for t in range(3, 13):
        assert demand_at(trace, t)[2, 1] == 300
    assert demand_at(trace, 13)[2, 1] == 0
    assert demand_at(trace, 8).demand.sum() == 300


def test_demand_outside_horizon():
    """Test slots outside [0, T] are refused."""
    trace = _single_request_trace()
    with pytest.raises(ValueError, match="outside"):
        demand_at(trace, 16)
    with pytest.raises(ValueError):
        demand_at(trace, -1)


def test_demand_matches_brute_force(small_config):
    """Test aggregated demand against re-summing the active requests."""
    region = small_config.region
    rng = np.random.default_rng(5)
    for seed in range(20):
        trace = sample_trace(region.server_types, region.combos, 6, seed, 4)
        for t in rng.integers(0, 7, size=5):
            expected = np.zeros((4, 2), dtype=np.int64)
            for r in trace.requests:
                if r.is_active(int(t)):
                    expected[r.reservation_id, r.type_id] += r.demand
            assert np.array_equal(demand_at(trace, int(t)).demand, expected)


def test_demand_conservation(small_config):
    """Test demand changes by arrivals minus expirations between slots."""
    region = small_config.region
    trace = sample_trace(region.server_types, region.combos, 6, 3, 4)
    table = trace.demand_table
    for t in range(table.shape[0] - 1):
        step = table[t + 1] - table[t]
        assert np.array_equal(step, trace.arrivals[t + 1] - trace.expirations[t + 1])


def test_lookahead_window():
    """Test arrivals and expirations in the next slots are reported."""
    trace = _single_request_trace()
    expiring, arriving = lookahead(trace, 2, 1, 1, 3)
    assert arriving.tolist() == [0, 300, 0]
    assert expiring.tolist() == [0, 0, 0]
    expiring, arriving = lookahead(trace, 2, 1, 11, 3)
    assert expiring.tolist() == [0, 300, 0]
    assert arriving.tolist() == [0, 0, 0]


def test_lookahead_without_requests():
    """Test an empty window reports zeros."""
    trace = _single_request_trace()
    expiring, arriving = lookahead(trace, 0, 0, 1, 4)
    assert not expiring.any() and not arriving.any()


def test_lookahead_all_matches_single(small_config):
    """Test the vectorised window against the per-reservation one."""
    region = small_config.region
    trace = sample_trace(region.server_types, region.combos, 6, 9, 4)
    for t in range(0, 7):
        expiring, arriving = lookahead_all(trace, 1, t, 3)
        for l in range(4):
            single = lookahead(trace, l, 1, t, 3)
            assert np.array_equal(expiring[l], single[0])
            assert np.array_equal(arriving[l], single[1])
