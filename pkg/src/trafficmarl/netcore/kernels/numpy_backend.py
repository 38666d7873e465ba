"""Vectorized numpy implementations of the numeric inner-loop kernels.

All kernels operate on C-contiguous float64 arrays. Functions ending in
``_`` mutate their first argument(s) in place.
"""

import numpy as np

NAME = "numpy"


def leaky_forward(z, slope):
    return np.where(z >= 0.0, z, slope * z)


def leaky_backward(z, da, slope):
    return np.where(z >= 0.0, da, slope * da)


def softmax_forward(z):
    """Row-wise softmax of a 2-D array; rows sum to 1."""
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_backward(y, dy):
    """Gradient through row-wise softmax given its output y."""
    dot = (dy * y).sum(axis=1, keepdims=True)
    return y * (dy - dot)


def bn_train_forward(x, eps):
    """Normalize by batch statistics. Returns (xhat, mean, invstd).

    Variance is the biased (1/N) batch variance.
    """
    mean = x.mean(axis=0)
    var = x.var(axis=0)
    invstd = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean) * invstd
    return xhat, mean, var, invstd


def bn_infer_forward(x, running_mean, running_var, eps):
    invstd = 1.0 / np.sqrt(running_var + eps)
    return (x - running_mean) * invstd


def bn_train_backward(xhat, invstd, dy):
    n = dy.shape[0]
    sum_dy = dy.sum(axis=0)
    sum_dy_xhat = (dy * xhat).sum(axis=0)
    return (invstd / n) * (n * dy - sum_dy - xhat * sum_dy_xhat)


def bn_infer_backward(running_var, eps, dy):
    return dy / np.sqrt(running_var + eps)


def ema_update_(running, batch_stat, momentum, floor):
    """running <- momentum*running + (1-momentum)*batch, floored elementwise.

    The floor keeps running variances strictly positive even when batch
    variance is exactly zero for thousands of consecutive updates.
    """
    np.maximum(momentum * running + (1.0 - momentum) * batch_stat, floor,
               out=running)


def adam_update_(w, m, v, g, lr, beta1, beta2, eps, bc1, bc2, decay):
    """One Adam step on a single parameter array, in place.

    bc1/bc2 are the bias corrections (1 - beta^t). decay adds decay*w to
    the gradient before the moment updates.
    """
    geff = g + decay * w if decay != 0.0 else g
    m *= beta1
    m += (1.0 - beta1) * geff
    v *= beta2
    v += (1.0 - beta2) * (geff * geff)
    w -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def blend_(target, source, tau):
    """target <- tau*source + (1-tau)*target, elementwise exact."""
    target *= 1.0 - tau
    target += tau * source


def sq_norm(g):
    flat = g.reshape(-1)
    return float(flat @ flat)


def scale_(g, factor):
    g *= factor
