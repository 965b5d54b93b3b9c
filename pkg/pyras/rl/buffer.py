"""Rollout storage and advantage estimation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Trajectory:
    """Transitions of one episode for one server type, in decision order.

    Decisions run slot by slot and reservation by reservation within a
    slot. Rewards of a slot are filled once its mapping is done, so
    `pending` counts decisions still waiting for their reward.
    """

    states: list[np.ndarray] = field(default_factory=list)
    actions: list[np.ndarray] = field(default_factory=list)
    log_probs: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    pending: int = 0

    def add(
        self, state: np.ndarray, action: np.ndarray, log_prob: float, value: float
    ) -> None:
        self.states.append(state)
        self.actions.append(action)
        self.log_probs.append(log_prob)
        self.values.append(value)
        self.pending += 1

    def assign_rewards(self, rewards: np.ndarray) -> None:
        """Attach the rewards of the latest slot's pending decisions.

        Raises:
            ValueError: If the reward count does not match the pending count.
        """
        if len(rewards) != self.pending:
            raise ValueError(
                f"Got {len(rewards)} rewards for {self.pending} pending decisions"
            )
        self.rewards.extend(float(r) for r in rewards)
        self.pending = 0

    def __len__(self) -> int:
        return len(self.rewards)

    @property
    def total_reward(self) -> float:
        return float(np.sum(self.rewards))


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    gamma: float,
    lam: float,
    last_value: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Generalised advantage estimates of one finished trajectory.

    delta_i = r_i + gamma V_{i+1} - V_i and A_i = delta_i + gamma lam A_{i+1},
    with V after the last transition equal to `last_value`.

    Returns:
        (advantages, returns) where returns = advantages + values.
    """
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    next_values = np.append(values[1:], last_value)
    deltas = rewards + gamma * next_values - values
    advantages = np.zeros_like(rewards)
    running = 0.0
    for i in range(len(rewards) - 1, -1, -1):
        running = deltas[i] + gamma * lam * running
        advantages[i] = running
    return advantages, advantages + values


@dataclass
class RolloutBatch:
    """Flat training batch built from finished trajectories."""

    states: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return len(self.states)

    @classmethod
    def from_trajectories(
        cls, trajectories: list[Trajectory], gamma: float, lam: float
    ) -> RolloutBatch:
        """Concatenate trajectories after computing their advantages.

        Raises:
            ValueError: If there is no transition or a trajectory still has
                decisions without reward.
        """
        done = [traj for traj in trajectories if len(traj)]
        if not done:
            raise ValueError("At least one complete trajectory is required")
        if any(traj.pending for traj in done):
            raise ValueError("Trajectory has decisions without reward")
        advantages, returns = zip(
            *(compute_gae(traj.rewards, traj.values, gamma, lam) for traj in done)
        )
        return cls(
            states=np.vstack([np.vstack(traj.states) for traj in done]),
            actions=np.vstack([np.vstack(traj.actions) for traj in done]),
            log_probs=np.concatenate([traj.log_probs for traj in done]),
            advantages=np.concatenate(advantages),
            returns=np.concatenate(returns),
        )

    def subset(self, index: np.ndarray) -> RolloutBatch:
        return RolloutBatch(
            states=self.states[index],
            actions=self.actions[index],
            log_probs=self.log_probs[index],
            advantages=self.advantages[index],
            returns=self.returns[index],
        )
