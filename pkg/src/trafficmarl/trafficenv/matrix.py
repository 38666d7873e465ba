"""Single-state matrix games behind the same environment interface.

One step ends the episode. Observations are a constant vector, so the
fixture isolates the learning machinery from any state dynamics.
"""

import numpy as np

from .env import MetricsRecord


class MatrixGameEnv:
    def __init__(self, payoff, n_agents, n_actions, seed=None, horizon=1):
        payoff = np.asarray(payoff, dtype=np.float64)
        shared_shape = tuple([n_actions] * n_agents)
        if payoff.shape == shared_shape:
            self.payoff = payoff
            self.per_agent = False
        elif payoff.shape == shared_shape + (n_agents,):
            self.payoff = payoff
            self.per_agent = True
        else:
            raise ValueError(
                f"payoff shape {payoff.shape} does not match {n_agents} agents "
                f"x {n_actions} actions")
        del horizon  # episodes are always exactly one step
        self.n_agents = n_agents
        self.n_actions = n_actions
        self.t = 0
        self.horizon = 1
        self.agent_ids = list(range(n_agents))

    @property
    def phase_counts(self):
        return [self.n_actions] * self.n_agents

    @property
    def obs_dims(self):
        return [1] * self.n_agents

    @property
    def done(self):
        return self.t >= 1

    def observe(self, i):
        return np.ones(1)

    def observe_all(self):
        return [self.observe(i) for i in self.agent_ids]

    def step(self, joint_action):
        if self.done:
            raise RuntimeError("step() called on a finished episode")
        if len(joint_action) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} actions")
        idx = tuple(int(a) for a in joint_action)
        for a in idx:
            if not 0 <= a < self.n_actions:
                raise ValueError(f"action {a} out of range")
        if self.per_agent:
            rewards = np.array(self.payoff[idx], dtype=np.float64)
        else:
            rewards = np.full(self.n_agents, float(self.payoff[idx]))
        self.t = 1
        metrics = MetricsRecord(
            scope="step", total_queue=0, mean_queue_per_lane=0.0,
            total_wait=0.0, completed_trips=0, mean_delay=0.0,
            flow_per_minute=0.0, per_agent_reward=rewards.tolist())
        return self.observe_all(), rewards, metrics, True

    def best_joint_action(self):
        """Exhaustive-enumeration optimum of the summed reward."""
        best, best_val = None, -np.inf
        it = np.ndindex(*[self.n_actions] * self.n_agents)
        for idx in it:
            val = (float(self.payoff[idx].sum()) if self.per_agent
                   else self.n_agents * float(self.payoff[idx]))
            if val > best_val:
                best, best_val = idx, val
        return best, best_val


def make_matrix_game(payoff, n_agents, n_actions, seed=None):
    return MatrixGameEnv(payoff, n_agents, n_actions, seed=seed)
