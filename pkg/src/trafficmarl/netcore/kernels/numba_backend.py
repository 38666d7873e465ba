"""numba @njit implementations of the numeric inner-loop kernels.

Loop bodies apply the same per-element arithmetic as the numpy backend, so
the two backends agree elementwise; reductions (batch statistics, norms,
softmax denominators) may differ from numpy's pairwise summation in the
last bits. Each backend is individually deterministic.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def leaky_forward(z, slope):
    out = np.empty_like(z)
    zf = z.reshape(-1)
    of = out.reshape(-1)
    for i in range(zf.size):
        v = zf[i]
        of[i] = v if v >= 0.0 else slope * v
    return out


@njit(cache=True)
def leaky_backward(z, da, slope):
    out = np.empty_like(z)
    zf = z.reshape(-1)
    df = da.reshape(-1)
    of = out.reshape(-1)
    for i in range(zf.size):
        of[i] = df[i] if zf[i] >= 0.0 else slope * df[i]
    return out


@njit(cache=True)
def softmax_forward(z):
    n, k = z.shape
    out = np.empty_like(z)
    for r in range(n):
        mx = z[r, 0]
        for c in range(1, k):
            if z[r, c] > mx:
                mx = z[r, c]
        s = 0.0
        for c in range(k):
            e = np.exp(z[r, c] - mx)
            out[r, c] = e
            s += e
        for c in range(k):
            out[r, c] /= s
    return out


@njit(cache=True)
def softmax_backward(y, dy):
    n, k = y.shape
    out = np.empty_like(y)
    for r in range(n):
        dot = 0.0
        for c in range(k):
            dot += dy[r, c] * y[r, c]
        for c in range(k):
            out[r, c] = y[r, c] * (dy[r, c] - dot)
    return out


@njit(cache=True)
def bn_train_forward(x, eps):
    n, k = x.shape
    mean = np.empty(k)
    var = np.empty(k)
    invstd = np.empty(k)
    for c in range(k):
        s = 0.0
        for r in range(n):
            s += x[r, c]
        mu = s / n
        sq = 0.0
        for r in range(n):
            d = x[r, c] - mu
            sq += d * d
        mean[c] = mu
        var[c] = sq / n
        invstd[c] = 1.0 / np.sqrt(var[c] + eps)
    xhat = np.empty_like(x)
    for r in range(n):
        for c in range(k):
            xhat[r, c] = (x[r, c] - mean[c]) * invstd[c]
    return xhat, mean, var, invstd


@njit(cache=True)
def bn_infer_forward(x, running_mean, running_var, eps):
    n, k = x.shape
    out = np.empty_like(x)
    for c in range(k):
        inv = 1.0 / np.sqrt(running_var[c] + eps)
        for r in range(n):
            out[r, c] = (x[r, c] - running_mean[c]) * inv
    return out


@njit(cache=True)
def bn_train_backward(xhat, invstd, dy):
    n, k = dy.shape
    out = np.empty_like(dy)
    for c in range(k):
        sum_dy = 0.0
        sum_dy_xhat = 0.0
        for r in range(n):
            sum_dy += dy[r, c]
            sum_dy_xhat += dy[r, c] * xhat[r, c]
        coef = invstd[c] / n
        for r in range(n):
            out[r, c] = coef * (n * dy[r, c] - sum_dy - xhat[r, c] * sum_dy_xhat)
    return out


@njit(cache=True)
def bn_infer_backward(running_var, eps, dy):
    n, k = dy.shape
    out = np.empty_like(dy)
    for c in range(k):
        inv = 1.0 / np.sqrt(running_var[c] + eps)
        for r in range(n):
            out[r, c] = dy[r, c] * inv
    return out


@njit(cache=True)
def ema_update_(running, batch_stat, momentum, floor):
    for i in range(running.size):
        v = momentum * running[i] + (1.0 - momentum) * batch_stat[i]
        running[i] = v if v > floor else floor


@njit(cache=True)
def adam_update_(w, m, v, g, lr, beta1, beta2, eps, bc1, bc2, decay):
    wf = w.reshape(-1)
    mf = m.reshape(-1)
    vf = v.reshape(-1)
    gf = g.reshape(-1)
    for i in range(wf.size):
        gi = gf[i] + decay * wf[i] if decay != 0.0 else gf[i]
        mf[i] = beta1 * mf[i] + (1.0 - beta1) * gi
        vf[i] = beta2 * vf[i] + (1.0 - beta2) * (gi * gi)
        wf[i] -= lr * (mf[i] / bc1) / (np.sqrt(vf[i] / bc2) + eps)


@njit(cache=True)
def blend_(target, source, tau):
    tf = target.reshape(-1)
    sf = source.reshape(-1)
    for i in range(tf.size):
        tf[i] = (1.0 - tau) * tf[i] + tau * sf[i]


@njit(cache=True)
def sq_norm(g):
    gf = g.reshape(-1)
    s = 0.0
    for i in range(gf.size):
        s += gf[i] * gf[i]
    return s


@njit(cache=True)
def scale_(g, factor):
    gf = g.reshape(-1)
    for i in range(gf.size):
        gf[i] *= factor
