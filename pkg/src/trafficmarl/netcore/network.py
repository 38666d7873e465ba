"""Minimal feed-forward network engine.

A network is a chain of fully connected layers, each optionally preceded
by a (parameter-free) batch normalization site and followed by one of
three activations: leaky ReLU, linear, or a final row-softmax. Everything
is float64. Forward returns a cache that backward consumes to produce
exact reverse-mode gradients for all parameters and for the input batch.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError

ACTIVATIONS = ("leaky_relu", "linear", "softmax")
LEAKY_SLOPE = 0.01
BN_MOMENTUM = 0.9
BN_EPSILON = 1e-5
FINAL_LAYER_BOUND = 3e-3
# Keeps running variances strictly positive under long runs of zero batch
# variance (constant inputs); smallest positive normal double.
BN_VAR_FLOOR = float(np.finfo(np.float64).tiny)


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str = "linear"
    has_batch_norm_before: bool = False


@dataclass
class BatchNormState:
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = BN_MOMENTUM
    epsilon: float = BN_EPSILON


@dataclass
class Mlp:
    specs: tuple
    weights: list        # per layer, (out_dim, in_dim)
    biases: list         # per layer, (out_dim,)
    bn: list             # per layer, BatchNormState or None

    @property
    def in_dim(self):
        return self.specs[0].in_dim

    @property
    def out_dim(self):
        return self.specs[-1].out_dim

    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self):
        return Mlp(
            specs=self.specs,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            bn=[None if s is None else BatchNormState(
                s.running_mean.copy(), s.running_var.copy(), s.momentum, s.epsilon)
                for s in self.bn],
        )

    def same_structure(self, other):
        return self.specs == other.specs


@dataclass
class GradBundle:
    weight_grads: list
    bias_grads: list
    input_grad: np.ndarray = None

    def check_congruent(self, net):
        if len(self.weight_grads) != len(net.weights):
            raise ValueError("gradient bundle layer count does not match network")
        for gw, gb, w, b in zip(self.weight_grads, self.bias_grads,
                                net.weights, net.biases):
            if gw.shape != w.shape or gb.shape != b.shape:
                raise ValueError(
                    f"gradient shape {gw.shape}/{gb.shape} does not match "
                    f"parameter shape {w.shape}/{b.shape}")


@dataclass
class ForwardCache:
    net: Mlp
    mode: str
    layers: list = field(default_factory=list)


def validate_specs(specs):
    if not specs:
        raise ValueError("network needs at least one layer")
    for i, s in enumerate(specs):
        if s.in_dim <= 0 or s.out_dim <= 0:
            raise ValueError(f"layer {i}: dimensions must be positive, got {s}")
        if s.activation not in ACTIVATIONS:
            raise ValueError(f"layer {i}: unknown activation {s.activation!r}")
        if s.activation == "softmax" and i != len(specs) - 1:
            raise ValueError("softmax is allowed only on the final layer")
    for i in range(1, len(specs)):
        if specs[i].in_dim != specs[i - 1].out_dim:
            raise ValueError(
                f"layer {i} in_dim {specs[i].in_dim} does not chain from "
                f"layer {i - 1} out_dim {specs[i - 1].out_dim}")


def mlp_init(specs, seed):
    """Build a network with fan-in uniform init and a small-uniform head.

    Hidden layers draw weights uniformly in [-1/sqrt(in_dim), +1/sqrt(in_dim)];
    the final layer in [-3e-3, +3e-3]. Biases start at zero. Deterministic
    for a given seed.
    """
    specs = tuple(specs)
    validate_specs(specs)
    rng = np.random.default_rng(seed)
    weights, biases, bn = [], [], []
    for i, s in enumerate(specs):
        bound = FINAL_LAYER_BOUND if i == len(specs) - 1 else 1.0 / np.sqrt(s.in_dim)
        weights.append(rng.uniform(-bound, bound, size=(s.out_dim, s.in_dim)))
        biases.append(np.zeros(s.out_dim))
        if s.has_batch_norm_before:
            bn.append(BatchNormState(np.zeros(s.in_dim), np.ones(s.in_dim)))
        else:
            bn.append(None)
    return Mlp(specs=specs, weights=weights, biases=biases, bn=bn)


def forward(net, x, mode="train"):
    """Run the network on a batch. Returns (output, cache).

    mode "train" normalizes with batch statistics at batch-norm sites and
    updates their running stats; "infer" uses running stats only. Train
    mode needs batch size >= 2 wherever a batch-norm site exists.
    """
    if mode not in ("train", "infer"):
        raise ValueError(f"unknown mode {mode!r}")
    K = kernels.active()
    x = np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if x.shape[1] != net.in_dim:
        raise ValueError(f"input width {x.shape[1]} != network in_dim {net.in_dim}")
    cache = ForwardCache(net=net, mode=mode)
    h = x
    for i, spec in enumerate(net.specs):
        entry = {}
        bn = net.bn[i]
        if bn is not None:
            if mode == "train":
                if h.shape[0] < 2:
                    raise ValueError(
                        "train-mode batch norm needs batch size >= 2 "
                        "(batch variance undefined for a single sample)")
                xhat, mean, var, invstd = K.bn_train_forward(h, bn.epsilon)
                K.ema_update_(bn.running_mean, mean, bn.momentum, -np.inf)
                K.ema_update_(bn.running_var, var, bn.momentum, BN_VAR_FLOOR)
                entry["bn_xhat"] = xhat
                entry["bn_invstd"] = invstd
                h = xhat
            else:
                h = K.bn_infer_forward(h, bn.running_mean, bn.running_var, bn.epsilon)
        entry["lin_in"] = h
        z = h @ net.weights[i].T + net.biases[i]
        entry["z"] = z
        if spec.activation == "leaky_relu":
            h = K.leaky_forward(z, LEAKY_SLOPE)
        elif spec.activation == "softmax":
            h = K.softmax_forward(z)
            entry["softmax_out"] = h
        else:
            h = z
        cache.layers.append(entry)
    return h, cache


def backward(net, cache, upstream):
    """Reverse-mode gradients of <upstream, output> w.r.t. parameters and input.

    The cache must come from a forward call on the same network instance.
    """
    if cache.net is not net:
        raise ValueError("cache was produced by a different network")
    K = kernels.active()
    da = np.ascontiguousarray(np.atleast_2d(np.asarray(upstream, dtype=np.float64)))
    if da.shape != cache.layers[-1]["z"].shape:
        raise ValueError(
            f"upstream gradient shape {da.shape} does not match output shape "
            f"{cache.layers[-1]['z'].shape}")
    weight_grads = [None] * len(net.specs)
    bias_grads = [None] * len(net.specs)
    for i in range(len(net.specs) - 1, -1, -1):
        spec = net.specs[i]
        entry = cache.layers[i]
        if spec.activation == "leaky_relu":
            dz = K.leaky_backward(entry["z"], da, LEAKY_SLOPE)
        elif spec.activation == "softmax":
            dz = K.softmax_backward(entry["softmax_out"], da)
        else:
            dz = da
        weight_grads[i] = dz.T @ entry["lin_in"]
        bias_grads[i] = dz.sum(axis=0)
        da = dz @ net.weights[i]
        bn = net.bn[i]
        if bn is not None:
            if cache.mode == "train":
                da = K.bn_train_backward(entry["bn_xhat"], entry["bn_invstd"], da)
            else:
                da = K.bn_infer_backward(bn.running_var, bn.epsilon, da)
    grads = GradBundle(weight_grads=weight_grads, bias_grads=bias_grads,
                       input_grad=da)
    grads.check_congruent(net)
    return grads


def forward_infer(net, x):
    """Inference-only forward without cache construction (hot path)."""
    K = kernels.active()
    h = np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if h.shape[1] != net.in_dim:
        raise ValueError(f"input width {h.shape[1]} != network in_dim {net.in_dim}")
    for i, spec in enumerate(net.specs):
        bn = net.bn[i]
        if bn is not None:
            h = K.bn_infer_forward(h, bn.running_mean, bn.running_var, bn.epsilon)
        z = h @ net.weights[i].T + net.biases[i]
        if spec.activation == "leaky_relu":
            h = K.leaky_forward(z, LEAKY_SLOPE)
        elif spec.activation == "softmax":
            h = K.softmax_forward(z)
        else:
            h = z
    return h


def check_finite(net):
    for w, b in zip(net.weights, net.biases):
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise DivergenceError("network parameters contain NaN/Inf")
