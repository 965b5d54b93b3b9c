"""Tests for the baseline policies."""

import logging

import numpy as np
import pytest

from pyras.converter import to_server_counts
from pyras.engine import pretrim_redundancy_violations
from pyras.exception_classes import RasConfigError, RasPolicyError
from pyras.models import DemandState, EpisodeTrace
from pyras.policies import (
    DecisionContext,
    MsbAvailability,
    ProportionalPolicy,
    RandomPolicy,
    UniformPolicy,
    proportional_policy,
    random_policy,
    uniform_policy,
)
from pyras.topology import build_region


def _context(topology, prev_counts, current_counts=None, l=1, e=0, demand=300):
    table = np.zeros((topology.num_reservations, topology.num_types), dtype=np.int64)
    table[l, e] = demand
    return DecisionContext(
        topology=topology,
        trace=EpisodeTrace(
            requests=(),
            horizon=3,
            num_reservations=topology.num_reservations,
            num_types=topology.num_types,
        ),
        t=1,
        l=l,
        e=e,
        lookahead=2,
        demand=DemandState(table),
        prev_counts=np.asarray(prev_counts),
        current_counts=(
            np.zeros_like(prev_counts) if current_counts is None else current_counts
        ),
    )


def test_random_policy_range():
    """Test raw actions are drawn from [-1, 1] with mean near 0."""
    rng = np.random.default_rng(0)
    draws = np.stack([random_policy(rng, 15).raw for _ in range(2000)])
    assert draws.shape == (2000, 16)
    assert draws.min() >= -1.0 and draws.max() <= 1.0
    assert abs(draws.mean()) < 0.02


def test_random_policy_is_seeded(small_topology):
    """Test resetting with a seed replays the same actions."""
    policy = RandomPolicy()
    context = _context(small_topology, np.zeros((4, 6), dtype=np.int64))
    policy.reset(3)
    first = [policy.decide(context).raw for _ in range(5)]
    policy.reset(3)
    second = [policy.decide(context).raw for _ in range(5)]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))


def test_random_policy_seed_changes_actions(small_topology):
    """Test the constructor seed is mixed into every episode reset."""
    context = _context(small_topology, np.zeros((4, 6), dtype=np.int64))
    actions = {}
    for seed in (0, 1):
        policy = RandomPolicy(seed)
        policy.reset(3)
        actions[seed] = policy.decide(context).raw
    assert not np.array_equal(actions[0], actions[1])
    again = RandomPolicy(1)
    again.reset(3)
    assert np.array_equal(again.decide(context).raw, actions[1])


def test_uniform_policy():
    """Test every MSB gets 1/(F-1) of the demand."""
    output = uniform_policy(15)
    assert np.allclose(output.fractions, 1 / 14)
    assert output.z == 0.0
    assert uniform_policy(2).fractions.tolist() == [1.0, 1.0]


def test_uniform_policy_needs_two_msbs():
    """Test a single MSB cannot provide redundancy."""
    with pytest.raises(RasConfigError, match="two MSBs"):
        uniform_policy(1)


def test_proportional_policy():
    """Test fractions follow the free servers scaled by the largest share."""
    output = proportional_policy(MsbAvailability(np.array([400, 300, 300])))
    assert output.fractions == pytest.approx([2 / 3, 0.5, 0.5])
    equal = proportional_policy(MsbAvailability(np.full(5, 10)))
    assert equal.fractions == pytest.approx([0.25] * 5)


def test_proportional_policy_without_servers():
    """Test no free servers, or all in one MSB, cannot be split."""
    with pytest.raises(RasPolicyError, match="No free servers"):
        proportional_policy(MsbAvailability(np.zeros(3)))
    with pytest.raises(RasPolicyError, match="one MSB"):
        proportional_policy(MsbAvailability(np.array([0, 7, 0])))


def test_availability_counts_other_reservations(small_topology):
    """Test servers held by other reservations are not available."""
    prev = np.zeros((4, 6), dtype=np.int64)
    prev[0] = [1, 0, 0, 0, 0, 0]
    prev[1] = [2, 2, 0, 0, 0, 0]
    prev[3] = [0, 0, 6, 0, 0, 0]
    current = np.zeros((4, 6), dtype=np.int64)
    current[0] = [3, 0, 0, 0, 0, 0]
    context = _context(small_topology, prev, current)
    assert context.msb_usage().tolist() == [5, 2, 6, 0, 0, 0]
    assert context.availability().counts.tolist() == [3, 6, 0, 6, 6, 6]
    assert context.own_demand == 300


def test_proportional_fallback_logs(config_factory, caplog):
    """Test the proportional baseline falls back to uniform when stuck."""
    topology = build_region(config_factory(num_reservations=2).region)
    current = np.array([[2, 2], [0, 0]])
    context = _context(topology, np.zeros((2, 2), dtype=np.int64), current)
    assert context.availability().total == 0
    with caplog.at_level(logging.WARNING, logger="pyras"):
        output = ProportionalPolicy().decide(context)
    assert output.fractions.tolist() == [1.0, 1.0]
    assert "fell back to uniform" in caplog.text


@pytest.mark.parametrize("policy", [UniformPolicy(), ProportionalPolicy()])
def test_heuristics_meet_redundancy_before_trimming(reference_topology, policy):
    """Test the heuristic requests survive the loss of their largest MSB."""
    rng = np.random.default_rng(1)
    for _ in range(50):
        prev = rng.integers(0, 3, size=(20, 15))
        demand = int(rng.integers(1, 30)) * 150
        context = _context(reference_topology, prev, demand=demand)
        output = policy.decide(context)
        vector = to_server_counts(
            output.fractions, output.z, demand, 0, reference_topology
        )
        assert pretrim_redundancy_violations(vector.n[None, :], demand, 150.0) == 0
