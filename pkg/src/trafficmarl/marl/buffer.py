"""FIFO experience replay with uniform with-replacement sampling."""

from typing import NamedTuple

import numpy as np


class Minibatch(NamedTuple):
    states: np.ndarray        # (B, x_dim)
    actions: np.ndarray       # (B, act_dim)
    rewards: np.ndarray       # (B, n_rewards)
    next_states: np.ndarray   # (B, x_dim)
    step_index: np.ndarray    # (B,)


class ReplayBuffer:
    """Ring storage; insertion beyond capacity evicts the oldest entry."""

    def __init__(self, capacity, x_dim, act_dim, n_rewards):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.x_dim = int(x_dim)
        self.act_dim = int(act_dim)
        self.n_rewards = int(n_rewards)
        self._x = np.zeros((self.capacity, self.x_dim))
        self._a = np.zeros((self.capacity, self.act_dim))
        self._r = np.zeros((self.capacity, self.n_rewards))
        self._xp = np.zeros((self.capacity, self.x_dim))
        self._t = np.zeros(self.capacity, dtype=np.int64)
        self._cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def store(self, x, a, r, xp, step_index):
        x = np.asarray(x, dtype=np.float64)
        a = np.asarray(a, dtype=np.float64)
        r = np.asarray(r, dtype=np.float64)
        xp = np.asarray(xp, dtype=np.float64)
        if x.shape != (self.x_dim,) or xp.shape != (self.x_dim,):
            raise ValueError(f"state width mismatch: {x.shape} vs ({self.x_dim},)")
        if a.shape != (self.act_dim,):
            raise ValueError(f"action width mismatch: {a.shape} vs ({self.act_dim},)")
        if r.shape != (self.n_rewards,):
            raise ValueError(f"reward width mismatch: {r.shape}")
        if not np.all(np.isfinite(r)):
            raise ValueError("non-finite reward")
        i = self._cursor
        self._x[i] = x
        self._a[i] = a
        self._r[i] = r
        self._xp[i] = xp
        self._t[i] = step_index
        self._cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size, rng):
        """Uniform i.i.d. indices with replacement over current contents."""
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=batch_size)
        return Minibatch(self._x[idx], self._a[idx], self._r[idx],
                         self._xp[idx], self._t[idx])

    def contents(self):
        """Stored rows in insertion order (oldest first)."""
        if self.size < self.capacity:
            order = np.arange(self.size)
        else:
            order = np.roll(np.arange(self.capacity), -self._cursor)
        return Minibatch(self._x[order], self._a[order], self._r[order],
                         self._xp[order], self._t[order])

    def state_dict(self):
        # physical layout is preserved so that resumed sampling maps RNG
        # indices onto identical rows
        n = self.size
        return {"x": self._x[:n].copy(), "a": self._a[:n].copy(),
                "r": self._r[:n].copy(), "xp": self._xp[:n].copy(),
                "t": self._t[:n].copy(),
                "cursor": np.int64(self._cursor), "size": np.int64(n)}

    def load_state_dict(self, d):
        n = int(d["size"])
        if n > self.capacity:
            raise ValueError("checkpoint buffer larger than capacity")
        self._x[:n] = d["x"]
        self._a[:n] = d["a"]
        self._r[:n] = d["r"]
        self._xp[:n] = d["xp"]
        self._t[:n] = d["t"]
        self.size = n
        self._cursor = int(d["cursor"])
