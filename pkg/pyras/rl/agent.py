"""Actor-critic agent trained with the clipped surrogate objective.

The actor outputs the mean of a diagonal Gaussian over the raw action; the
log standard deviation is a learned vector shared by every state. The
critic is a separate network with the same hidden shape and one output.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Final

import numpy as np

from ..const import CHECKPOINT_FORMAT_VERSION
from ..exception_classes import RasConfigError, RasParserError, RasTrainingError
from ..models.config import AgentParams
from ..models.topology import RegionTopology
from .buffer import RolloutBatch
from .network import Adam, Mlp
from .state import state_scales

_LOGGER: Final = logging.getLogger(__name__)

_LOG_2PI: Final[float] = float(np.log(2.0 * np.pi))
_ADV_EPS: Final[float] = 1e-8


@dataclass(frozen=True)
class ActionSample:
    """Action drawn by the agent with its log-probability and value."""

    action: np.ndarray
    log_prob: float
    value: float


@dataclass(frozen=True)
class UpdateDiagnostics:
    """Averages over the minibatches of one update."""

    surrogate_loss: float
    approx_kl: float
    value_loss: float
    batch_size: int


def gaussian_log_prob(
    actions: np.ndarray, mean: np.ndarray, log_std: np.ndarray
) -> np.ndarray:
    """Log density of diagonal Gaussian samples, one value per row."""
    z = (np.atleast_2d(actions) - np.atleast_2d(mean)) / np.exp(log_std)
    return -0.5 * np.sum(z**2, axis=1) - np.sum(log_std) - 0.5 * len(log_std) * _LOG_2PI


class PPOAgent:
    """Gaussian policy with a separate value network.

    Attributes:
        state_dim: Length of the state vector.
        action_dim: Length of the raw action (F + 1).
        params: Network and update settings.
        actor: Mean network.
        log_std: State-independent log standard deviation.
        critic: Value network.
    """

    def __init__(
        self,
        state_dim: int,
        action_dim: int,
        params: AgentParams | None = None,
        seed: int | Sequence[int] = 0,
    ) -> None:
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.params = params or AgentParams()
        self.rng = np.random.default_rng(seed)
        hidden = tuple(self.params.hidden_sizes)
        self.actor = Mlp((state_dim, *hidden, action_dim), self.rng, output_scale=0.01)
        self.critic = Mlp((state_dim, *hidden, 1), self.rng)
        self.log_std = np.full(action_dim, float(self.params.log_std_init))
        lr = self.params.learning_rate
        self._actor_opt = Adam([*self.actor.params, self.log_std], lr)
        self._critic_opt = Adam(self.critic.params, lr)
        self.updates = 0

    # Acting

    def value(self, states: np.ndarray) -> np.ndarray:
        return self.critic(states)[:, 0]

    def act(self, state: np.ndarray, deterministic: bool = False) -> ActionSample:
        """Action for one state; the mean in deterministic mode."""
        mean = self.actor(state)[0]
        if deterministic:
            action = mean.copy()
        else:
            action = mean + np.exp(self.log_std) * self.rng.standard_normal(
                self.action_dim
            )
        return ActionSample(
            action=action,
            log_prob=float(gaussian_log_prob(action, mean, self.log_std)[0]),
            value=float(self.value(state)[0]),
        )

    # Surrogate objective

    def policy_params(self) -> np.ndarray:
        """Actor weights followed by the log standard deviation."""
        return np.concatenate([self.actor.get_flat(), self.log_std])

    def set_policy_params(self, flat: np.ndarray) -> None:
        split = self.actor.num_params
        self.actor.set_flat(flat[:split])
        self.log_std[...] = flat[split:]

    def surrogate(self, batch: RolloutBatch) -> tuple[float, list[np.ndarray], float]:
        """Clipped surrogate loss and its gradient.

        The loss is the negated mean of min(ratio A, clip(ratio) A). Samples
        where the clipped term is smaller contribute no gradient.

        Returns:
            (loss, gradients of actor params then log_std, approximate KL).
        """
        eps = self.params.clip_ratio
        mean, cache = self.actor.forward(batch.states)
        std = np.exp(self.log_std)
        log_prob = gaussian_log_prob(batch.actions, mean, self.log_std)
        ratio = np.exp(log_prob - batch.log_probs)
        adv = batch.advantages
        unclipped = ratio * adv
        clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps) * adv
        n = len(adv)
        loss = -float(np.mean(np.minimum(unclipped, clipped)))

        # d(-min)/d(log_prob) where the unclipped term is active
        active = unclipped <= clipped
        coeff = np.where(active, -adv * ratio / n, 0.0)
        diff = batch.actions - mean
        grad_mean = coeff[:, None] * diff / std**2
        grad_log_std = (coeff[:, None] * (diff**2 / std**2 - 1.0)).sum(axis=0)
        grads = self.actor.backward(cache, grad_mean)
        approx_kl = float(np.mean(batch.log_probs - log_prob))
        return loss, [*grads, grad_log_std], approx_kl

    def surrogate_at(self, flat: np.ndarray, batch: RolloutBatch) -> float:
        """Surrogate loss with the policy parameters set to `flat`."""
        saved = self.policy_params()
        self.set_policy_params(flat)
        try:
            return self.surrogate(batch)[0]
        finally:
            self.set_policy_params(saved)

    def surrogate_gradient(self, flat: np.ndarray, batch: RolloutBatch) -> np.ndarray:
        """Flat surrogate gradient with the policy parameters set to `flat`."""
        saved = self.policy_params()
        self.set_policy_params(flat)
        try:
            grads = self.surrogate(batch)[1]
        finally:
            self.set_policy_params(saved)
        return np.concatenate([g.ravel() for g in grads])

    def value_loss(self, batch: RolloutBatch) -> tuple[float, list[np.ndarray]]:
        """Mean squared error of the critic and its gradient."""
        values, cache = self.critic.forward(batch.states)
        err = values[:, 0] - batch.returns
        grads = self.critic.backward(cache, (2.0 * err / len(err))[:, None])
        return float(np.mean(err**2)), grads

    # Update

    def ppo_update(self, batch: RolloutBatch) -> UpdateDiagnostics:
        """Run the configured epochs of minibatch updates on a batch.

        Advantages are normalised over the whole batch first.

        Raises:
            RasTrainingError: If a loss or gradient turns non-finite; the
                weights from before the update are restored.
        """
        if len(batch) == 0:
            raise ValueError("Cannot update on an empty batch")
        adv = batch.advantages
        if len(adv) > 1:
            adv = (adv - adv.mean()) / (adv.std() + _ADV_EPS)
        batch = RolloutBatch(
            states=batch.states,
            actions=batch.actions,
            log_probs=batch.log_probs,
            advantages=adv,
            returns=batch.returns,
        )

        snapshot = self._snapshot()
        losses, kls, value_losses = [], [], []
        size = self.params.minibatch_size
        for _ in range(self.params.epochs):
            order = self.rng.permutation(len(batch))
            for start in range(0, len(batch), size):
                mini = batch.subset(order[start : start + size])
                loss, grads, kl = self.surrogate(mini)
                v_loss, v_grads = self.value_loss(mini)
                finite = np.isfinite([loss, v_loss, kl]).all() and all(
                    np.all(np.isfinite(g)) for g in (*grads, *v_grads)
                )
                if not finite:
                    self._restore(snapshot)
                    _LOGGER.error("Non-finite loss after %d updates", self.updates)
                    raise RasTrainingError(
                        f"Non-finite loss (surrogate {loss}, value {v_loss}); "
                        "weights restored, consider a lower learning rate"
                    )
                self._actor_opt.step(grads)
                self._critic_opt.step(v_grads)
                losses.append(loss)
                kls.append(kl)
                value_losses.append(v_loss)
        self.updates += 1
        diagnostics = UpdateDiagnostics(
            surrogate_loss=float(np.mean(losses)),
            approx_kl=float(np.mean(kls)),
            value_loss=float(np.mean(value_losses)),
            batch_size=len(batch),
        )
        _LOGGER.debug("Update %d: %s", self.updates, diagnostics)
        return diagnostics

    def _snapshot(self) -> tuple:
        return (
            self.actor.copy_params(),
            self.log_std.copy(),
            self.critic.copy_params(),
            self._actor_opt.state(),
            self._critic_opt.state(),
        )

    def _restore(self, snapshot: tuple) -> None:
        actor, log_std, critic, actor_opt, critic_opt = snapshot
        for dst, src in zip(self.actor.params, actor):
            dst[...] = src
        self.log_std[...] = log_std
        for dst, src in zip(self.critic.params, critic):
            dst[...] = src
        self._actor_opt.restore(actor_opt)
        self._critic_opt.restore(critic_opt)


def save_agents(
    agents: dict[int, PPOAgent],
    path: str | Path,
    *,
    mode: str,
    lookahead: int,
    num_types: int,
    scales: dict[str, list],
) -> Path:
    """Write agents to a versioned .npz checkpoint.

    Args:
        agents: Agent per server type; single-agent mode uses key -1.
        path: Output file.
        mode: "single" or "parallel".
        lookahead: Look-ahead window the states were built with.
        num_types: Number of server types of the region.
        scales: State normalisation constants of the region (state_scales).

    Returns:
        Path of the written file.
    """
    meta = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "mode": mode,
        "lookahead": lookahead,
        "num_types": num_types,
        "scales": scales,
        "agents": {
            str(key): {
                "state_dim": agent.state_dim,
                "action_dim": agent.action_dim,
                "hidden_sizes": list(agent.params.hidden_sizes),
                "updates": agent.updates,
            }
            for key, agent in agents.items()
        },
    }
    arrays: dict[str, np.ndarray] = {"meta": np.array(json.dumps(meta, sort_keys=True))}
    for key, agent in agents.items():
        for i, p in enumerate(agent.actor.params):
            arrays[f"{key}/actor/{i}"] = p
        for i, p in enumerate(agent.critic.params):
            arrays[f"{key}/critic/{i}"] = p
        arrays[f"{key}/log_std"] = agent.log_std
    path = Path(path)
    with path.open("wb") as handle:
        np.savez(handle, **arrays)
    _LOGGER.info("Saved %d agent(s) to %s", len(agents), path)
    return path


@dataclass(frozen=True)
class AgentCheckpoint:
    """Agents read back from a checkpoint."""

    agents: dict[int, PPOAgent]
    mode: str
    lookahead: int
    num_types: int
    scales: dict[str, list]


def load_agents(
    path: str | Path,
    params: AgentParams | None = None,
    topology: RegionTopology | None = None,
) -> AgentCheckpoint:
    """Read agents written by save_agents.

    Args:
        path: Checkpoint file.
        params: Agent hyperparameters; hidden sizes come from the file.
        topology: Region the agents will run on; its state normalisation
            must equal the one the agents were trained with.

    Raises:
        RasParserError: If the file is missing, malformed or of another
            format version.
        RasConfigError: If the agents were trained on a region with other
            state normalisation constants.
    """
    try:
        with np.load(Path(path), allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            if meta.get("format_version") != CHECKPOINT_FORMAT_VERSION:
                raise RasParserError(
                    f"Checkpoint format {meta.get('format_version')} is not "
                    f"{CHECKPOINT_FORMAT_VERSION}"
                )
            agents: dict[int, PPOAgent] = {}
            for key, info in meta["agents"].items():
                agent_params = replace(
                    params or AgentParams(),
                    hidden_sizes=tuple(info["hidden_sizes"]),
                )
                agent = PPOAgent(info["state_dim"], info["action_dim"], agent_params)
                for i, p in enumerate(agent.actor.params):
                    p[...] = data[f"{key}/actor/{i}"]
                for i, p in enumerate(agent.critic.params):
                    p[...] = data[f"{key}/critic/{i}"]
                agent.log_std[...] = data[f"{key}/log_std"]
                agent.updates = int(info["updates"])
                agents[int(key)] = agent
            scales = meta["scales"]
    except (OSError, KeyError, ValueError) as err:
        raise RasParserError(f"Cannot read checkpoint {path}: {err}") from err
    if topology is not None and scales != state_scales(topology):
        raise RasConfigError(
            f"Checkpoint {path} was trained with state scales {scales}, "
            f"the region needs {state_scales(topology)}"
        )
    _LOGGER.info("Loaded %d agent(s) from %s", len(agents), path)
    return AgentCheckpoint(
        agents=agents,
        mode=meta["mode"],
        lookahead=int(meta["lookahead"]),
        num_types=int(meta["num_types"]),
        scales=scales,
    )
