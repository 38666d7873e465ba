"""Training hyperparameters and their defaults.

Field <-> symbol map: buffer_capacity=M, batch_size=B, discount=gamma,
tau=tau, actor_lr=eps_a, critic_lr=eps_c, weight_decay=w, reward_scale=r_c,
noise_std=sigma, learn_every=l, grad_clip/grad_clip_value=g_c/g_v,
fc1/fc2=FC1/FC2, ensemble_size=K.
"""

from dataclasses import dataclass, replace


@dataclass
class Hyperparameters:
    buffer_capacity: int = 100_000
    batch_size: int = 512
    discount: float = 0.95
    tau: float = 0.01
    actor_lr: float = 0.001
    critic_lr: float = 0.001
    weight_decay: float = 0.0
    reward_scale: float = 1.0
    noise_std: float = 0.01
    learn_every: int = 1
    grad_clip: bool = True
    grad_clip_value: float = 1.0
    fc1: int = 64
    fc2: int = 64
    ensemble_size: int = 1
    warmup_steps: int = None   # defaults to batch_size (one full minibatch)
    episodes: int = 1000

    def __post_init__(self):
        if self.warmup_steps is None:
            self.warmup_steps = self.batch_size
        self.validate()

    def validate(self):
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.batch_size > self.buffer_capacity:
            raise ValueError("batch_size cannot exceed buffer_capacity")
        for name in ("buffer_capacity", "batch_size", "actor_lr", "critic_lr",
                     "reward_scale", "learn_every", "grad_clip_value",
                     "fc1", "fc2", "ensemble_size", "episodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.weight_decay < 0 or self.noise_std < 0 or self.warmup_steps < 0:
            raise ValueError("weight_decay, noise_std, warmup_steps must be >= 0")

    def with_overrides(self, **kw):
        return replace(self, **kw)
