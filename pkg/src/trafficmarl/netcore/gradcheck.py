"""Finite-difference verification of the analytic gradients.

The scalar objective is <upstream, output> for a fixed random upstream
matrix; central differences with step h approximate its gradient with
respect to every parameter and every input entry, independently of the
backward pass being checked.
"""

from dataclasses import dataclass

import numpy as np

from .network import LayerSpec, backward, forward, mlp_init

FD_STEP = 1e-5


def _objective(net, x, upstream, mode):
    out, _ = forward(net, x, mode=mode)
    return float(np.sum(upstream * out))


def fd_param_grads(net, x, upstream, mode, h=FD_STEP):
    """Central-difference gradients for every weight and bias entry."""
    grads_w, grads_b = [], []
    for arr_list, grads in ((net.weights, grads_w), (net.biases, grads_b)):
        for arr in arr_list:
            g = np.zeros_like(arr)
            flat = arr.reshape(-1)
            gflat = g.reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + h
                hi = _objective(net, x, upstream, mode)
                flat[j] = orig - h
                lo = _objective(net, x, upstream, mode)
                flat[j] = orig
                gflat[j] = (hi - lo) / (2 * h)
            grads.append(g)
    return grads_w, grads_b


def fd_input_grad(net, x, upstream, mode, h=FD_STEP):
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for j in range(flat.size):
        orig = flat[j]
        flat[j] = orig + h
        hi = _objective(net, x, upstream, mode)
        flat[j] = orig - h
        lo = _objective(net, x, upstream, mode)
        flat[j] = orig
        gflat[j] = (hi - lo) / (2 * h)
    return g


def rel_error(a, b):
    """Elementwise |a-b| relative to magnitude, floored at 1."""
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.abs(a - b) / denom


@dataclass
class GradCheckCase:
    description: str
    max_rel_error: float


def check_case(specs, seed, batch, mode):
    """Compare analytic and finite-difference gradients for one network."""
    rng = np.random.default_rng(seed)
    net = mlp_init(specs, seed=seed)
    # Shift weights away from the tiny head init so FD signals are O(1).
    for w in net.weights:
        w += rng.uniform(-0.5, 0.5, size=w.shape)
    x = rng.uniform(-1.0, 1.0, size=(batch, specs[0].in_dim))
    upstream = rng.uniform(-1.0, 1.0, size=(batch, specs[-1].out_dim))
    if mode == "infer":
        for bn in net.bn:
            if bn is not None:
                bn.running_mean[:] = rng.uniform(-0.5, 0.5, bn.running_mean.shape)
                bn.running_var[:] = rng.uniform(0.5, 2.0, bn.running_var.shape)
    # Forward mutates running stats in train mode; FD must see the same
    # stats on every evaluation, so snapshot and restore around the
    # analytic pass, then freeze for the FD sweeps.
    bn_snapshot = [(None if bn is None else
                    (bn.running_mean.copy(), bn.running_var.copy()))
                   for bn in net.bn]

    def restore():
        for bn, snap in zip(net.bn, bn_snapshot):
            if bn is not None:
                bn.running_mean[:] = snap[0]
                bn.running_var[:] = snap[1]

    _, cache = forward(net, x, mode=mode)
    analytic = backward(net, cache, upstream)
    restore()

    worst = 0.0
    fd_w, fd_b = fd_param_grads(net, x, upstream, mode)
    restore()
    for a, b in zip(analytic.weight_grads, fd_w):
        worst = max(worst, float(rel_error(a, b).max()))
    for a, b in zip(analytic.bias_grads, fd_b):
        worst = max(worst, float(rel_error(a, b).max()))
    fd_x = fd_input_grad(net, x, upstream, mode)
    restore()
    worst = max(worst, float(rel_error(analytic.input_grad, fd_x).max()))
    return worst


def random_architecture(rng, max_dim=8):
    """A random layer stack covering all activation/batch-norm combinations."""
    depth = int(rng.integers(1, 4))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(depth + 1)]
    specs = []
    for i in range(depth):
        last = i == depth - 1
        if last:
            act = str(rng.choice(["leaky_relu", "linear", "softmax"]))
        else:
            act = str(rng.choice(["leaky_relu", "linear"]))
        specs.append(LayerSpec(dims[i], dims[i + 1], act,
                               has_batch_norm_before=bool(rng.integers(0, 2))))
    return specs


def run_suite(n_cases=50, seed=20240, max_dim=8):
    """Gradient-check n_cases random architectures in both modes.

    Returns (max error over all cases, list of GradCheckCase).
    """
    rng = np.random.default_rng(seed)
    results = []
    worst = 0.0
    for k in range(n_cases):
        specs = random_architecture(rng, max_dim=max_dim)
        batch = int(rng.integers(2, 7))
        mode = "train" if k % 2 == 0 else "infer"
        err = check_case(specs, seed=int(rng.integers(0, 2**31)), batch=batch,
                         mode=mode)
        desc = "->".join(
            f"{s.in_dim}x{s.out_dim}:{s.activation}"
            + ("+bn" if s.has_batch_norm_before else "")
            for s in specs)
        results.append(GradCheckCase(f"{desc} [{mode}, B={batch}]", err))
        worst = max(worst, err)
    return worst, results
