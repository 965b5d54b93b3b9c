"""Policy backed by trained agents."""

from __future__ import annotations

from collections.abc import Mapping

from ..converter import PolicyOutput
from ..policies import DecisionContext, Policy
from .agent import PPOAgent
from .state import build_state

SHARED_AGENT: int = -1


class AgentPolicy(Policy):
    """Queries one agent per server type, or one shared agent.

    With a single shared agent (key SHARED_AGENT) the state carries the
    server type one-hot.
    """

    name = "agent"

    def __init__(
        self, agents: Mapping[int, PPOAgent], deterministic: bool = True
    ) -> None:
        if not agents:
            raise ValueError("AgentPolicy needs at least one agent")
        self.agents = dict(agents)
        self.deterministic = deterministic

    @property
    def shared(self) -> bool:
        return SHARED_AGENT in self.agents

    def agent_for(self, e: int) -> PPOAgent:
        return self.agents[SHARED_AGENT] if self.shared else self.agents[e]

    def decide(self, context: DecisionContext) -> PolicyOutput:
        state = build_state(context, one_hot=self.shared)
        sample = self.agent_for(context.e).act(state, self.deterministic)
        self._record(state, sample)
        return PolicyOutput(raw=sample.action)

    def _record(self, state, sample) -> None:
        """Hook for training subclasses."""
