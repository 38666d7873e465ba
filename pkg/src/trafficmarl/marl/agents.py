"""Agent containers: actor/critic pairs with targets and per-sub-policy
replay buffers, plus the action head shared by acting and training."""

from dataclasses import dataclass

import numpy as np

from ..netcore import AdamState, LayerSpec, forward_infer, mlp_init
from ..netcore import kernels
from .buffer import ReplayBuffer


def actor_specs(obs_dim, n_phases, fc1, fc2):
    """Two leaky-ReLU hidden layers, batch norm, linear logits head.

    The softmax over phases is applied outside the network so that
    exploration noise can be injected on the logits.
    """
    return [LayerSpec(obs_dim, fc1, "leaky_relu"),
            LayerSpec(fc1, fc2, "leaky_relu"),
            LayerSpec(fc2, n_phases, "linear", has_batch_norm_before=True)]


def critic_specs(in_dim, fc1, fc2):
    return [LayerSpec(in_dim, fc1, "leaky_relu"),
            LayerSpec(fc1, fc2, "leaky_relu"),
            LayerSpec(fc2, 1, "linear")]


@dataclass
class DdpgPair:
    actor: object
    critic: object
    target_actor: object
    target_critic: object
    actor_opt: AdamState
    critic_opt: AdamState

    @classmethod
    def build(cls, obs_dim, n_phases, critic_in, hyper, seed_seq):
        actor_seed, critic_seed = seed_seq.spawn(2)
        actor = mlp_init(actor_specs(obs_dim, n_phases, hyper.fc1, hyper.fc2),
                         seed=actor_seed)
        critic = mlp_init(critic_specs(critic_in, hyper.fc1, hyper.fc2),
                          seed=critic_seed)
        return cls(actor=actor, critic=critic,
                   target_actor=actor.copy(), target_critic=critic.copy(),
                   actor_opt=AdamState.for_net(actor),
                   critic_opt=AdamState.for_net(critic))

    def nets(self):
        return {"actor": self.actor, "critic": self.critic,
                "target_actor": self.target_actor,
                "target_critic": self.target_critic}


class MaddpgAgent:
    """One intersection's learner: an ensemble of K sub-policies, each with
    its own replay buffer; the active sub-policy is resampled per episode."""

    def __init__(self, index, obs_dim, n_phases, critic_in, hyper, seed_seq,
                 x_dim, act_dim, n_rewards):
        self.index = index
        self.obs_dim = obs_dim
        self.n_phases = n_phases
        self.ensemble_size = hyper.ensemble_size
        self.pairs = [DdpgPair.build(obs_dim, n_phases, critic_in, hyper, ss)
                      for ss in seed_seq.spawn(hyper.ensemble_size)]
        self.buffers = [ReplayBuffer(hyper.buffer_capacity, x_dim, act_dim,
                                     n_rewards)
                        for _ in range(hyper.ensemble_size)]
        self.active = 0

    @property
    def pair(self):
        return self.pairs[self.active]

    @property
    def buffer(self):
        return self.buffers[self.active]

    def select_subpolicy(self, rng):
        """Uniform draw over sub-policies; K=1 short-circuits without
        consuming randomness."""
        if self.ensemble_size > 1:
            self.active = int(rng.integers(self.ensemble_size))
        else:
            self.active = 0
        return self.active


def action_from_logits(logits, explore, rng, sigma):
    """Softmax action vector and executed phase from actor logits.

    Exploration adds i.i.d. N(0, sigma) noise on the logits; sigma=0 or
    explore=False leave them untouched. Argmax ties break to the lowest
    index.
    """
    logits = np.asarray(logits, dtype=np.float64).reshape(1, -1)
    if explore and sigma > 0.0:
        logits = logits + rng.normal(0.0, sigma, size=logits.shape)
    vec = kernels.active().softmax_forward(np.ascontiguousarray(logits))[0]
    return vec, int(np.argmax(vec))


def select_action(agent, obs, explore, rng, sigma):
    """Act from the local observation with the active sub-policy."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape != (agent.obs_dim,):
        raise ValueError(f"observation width {obs.shape} != ({agent.obs_dim},)")
    logits = forward_infer(agent.pair.actor, obs[None, :])[0]
    return action_from_logits(logits, explore, rng, sigma)
