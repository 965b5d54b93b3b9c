"""Tests for the numpy network, Adam and rollout storage."""

import numpy as np
import pytest

from pyras.rl.buffer import RolloutBatch, Trajectory, compute_gae
from pyras.rl.network import Adam, Mlp


def test_forward_shapes():
    """Test batch and single inputs give one output row each."""
    net = Mlp((4, 8, 8, 3), np.random.default_rng(0))
    assert net(np.zeros((5, 4))).shape == (5, 3)
    assert net(np.zeros(4)).shape == (1, 3)
    assert net.num_params == 4 * 8 + 8 + 8 * 8 + 8 + 8 * 3 + 3


def test_backward_matches_finite_differences():
    """Test the analytic gradient of sum(out * g) against central differences."""
    rng = np.random.default_rng(1)
    net = Mlp((3, 5, 2), rng)
    x = rng.normal(size=(4, 3))
    g = rng.normal(size=(4, 2))
    out, cache = net.forward(x)
    analytic = np.concatenate([p.ravel() for p in net.backward(cache, g)])

    flat = net.get_flat()
    numeric = np.zeros_like(flat)
    step = 1e-6
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] += step
        net.set_flat(bumped)
        up = float(np.sum(net(x) * g))
        bumped[i] -= 2 * step
        net.set_flat(bumped)
        down = float(np.sum(net(x) * g))
        numeric[i] = (up - down) / (2 * step)
    net.set_flat(flat)
    assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-7)


def test_set_flat_updates_in_place():
    """Test set_flat keeps the parameter arrays optimisers hold."""
    net = Mlp((2, 3, 1), np.random.default_rng(2))
    arrays = list(net.params)
    net.set_flat(np.arange(net.num_params, dtype=float))
    assert all(a is b for a, b in zip(arrays, net.params))
    assert np.array_equal(net.get_flat(), np.arange(net.num_params))


def test_network_needs_two_sizes():
    """Test a network needs an input and an output layer."""
    with pytest.raises(ValueError, match="input and an output"):
        Mlp((3,), np.random.default_rng(0))


def test_adam_minimises_quadratic():
    """Test Adam drives a quadratic to its minimum."""
    target = np.array([1.0, -2.0, 0.5])
    params = [np.zeros(3)]
    optimiser = Adam(params, learning_rate=0.05)
    for _ in range(2000):
        optimiser.step([2.0 * (params[0] - target)])
    assert np.allclose(params[0], target, atol=1e-2)


def test_adam_state_restore():
    """Test restoring the optimiser state replays the same step."""
    params = [np.ones(2)]
    optimiser = Adam(params, learning_rate=0.1)
    optimiser.step([np.array([1.0, -1.0])])
    saved_params = params[0].copy()
    state = optimiser.state()
    optimiser.step([np.array([0.5, 0.5])])
    first = params[0].copy()
    params[0][...] = saved_params
    optimiser.restore(state)
    optimiser.step([np.array([0.5, 0.5])])
    assert np.array_equal(params[0], first)


def test_gae_single_step():
    """Test one transition: advantage = reward - value."""
    advantages, returns = compute_gae(np.array([1.0]), np.array([0.25]), 0.99, 0.95)
    assert advantages.tolist() == [0.75]
    assert returns.tolist() == [1.0]


def test_gae_lambda_one_is_discounted_return():
    """Test lambda = 1 gives the discounted return minus the value."""
    rewards = np.array([1.0, 2.0, 3.0])
    values = np.array([0.5, 0.5, 0.5])
    advantages, returns = compute_gae(rewards, values, 0.9, 1.0)
    expected = np.array([1 + 0.9 * 2 + 0.81 * 3, 2 + 0.9 * 3, 3.0])
    assert np.allclose(returns, expected)
    assert np.allclose(advantages, expected - values)


def test_trajectory_rewards_must_match_pending():
    """Test rewards are attached to exactly the pending decisions."""
    trajectory = Trajectory()
    trajectory.add(np.zeros(2), np.zeros(3), -1.0, 0.0)
    trajectory.add(np.zeros(2), np.zeros(3), -1.0, 0.0)
    with pytest.raises(ValueError, match="pending"):
        trajectory.assign_rewards(np.array([1.0]))
    trajectory.assign_rewards(np.array([1.0, -3.0]))
    assert len(trajectory) == 2
    assert trajectory.total_reward == -2.0


def test_batch_from_trajectories():
    """Test trajectories are stacked and incomplete ones refused."""
    done = Trajectory()
    for _ in range(3):
        done.add(np.ones(2), np.ones(3), -0.5, 0.1)
    done.assign_rewards(np.array([1.0, 0.0, 1.0]))
    batch = RolloutBatch.from_trajectories([done, Trajectory()], 0.99, 0.95)
    assert len(batch) == 3
    assert batch.states.shape == (3, 2)
    assert len(batch.subset(np.array([0, 2]))) == 2

    pending = Trajectory()
    pending.add(np.ones(2), np.ones(3), -0.5, 0.1)
    pending.assign_rewards(np.array([1.0]))
    pending.add(np.ones(2), np.ones(3), -0.5, 0.1)
    with pytest.raises(ValueError, match="without reward"):
        RolloutBatch.from_trajectories([done, pending], 0.99, 0.95)
    with pytest.raises(ValueError, match="complete trajectory"):
        RolloutBatch.from_trajectories([Trajectory()], 0.99, 0.95)
