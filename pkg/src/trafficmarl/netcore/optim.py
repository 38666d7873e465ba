"""Adam optimization, gradient clipping, and soft target updates."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError
from .network import check_finite

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    m_weights: list
    v_weights: list
    m_biases: list
    v_biases: list
    step_count: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps_hat: float = ADAM_EPS

    @classmethod
    def for_net(cls, net, beta1=ADAM_BETA1, beta2=ADAM_BETA2, eps_hat=ADAM_EPS):
        return cls(
            m_weights=[np.zeros_like(w) for w in net.weights],
            v_weights=[np.zeros_like(w) for w in net.weights],
            m_biases=[np.zeros_like(b) for b in net.biases],
            v_biases=[np.zeros_like(b) for b in net.biases],
            beta1=beta1, beta2=beta2, eps_hat=eps_hat,
        )


def global_grad_norm(grads):
    """Global L2 norm over all parameter gradients (input_grad excluded)."""
    K = kernels.active()
    total = 0.0
    for g in grads.weight_grads:
        total += K.sq_norm(g)
    for g in grads.bias_grads:
        total += K.sq_norm(g)
    return float(np.sqrt(total))


def clip_global_norm(grads, clip_value):
    """Scale parameter gradients so their global L2 norm is at most clip_value.

    A no-op below the threshold. NaN gradients signal training divergence.
    """
    if clip_value <= 0:
        raise ValueError("clip value must be positive")
    norm = global_grad_norm(grads)
    if not np.isfinite(norm):
        raise DivergenceError("gradient norm is not finite")
    if norm > clip_value:
        K = kernels.active()
        factor = clip_value / norm
        for g in grads.weight_grads:
            K.scale_(g, factor)
        for g in grads.bias_grads:
            K.scale_(g, factor)
    return grads


def adam_step(state, net, grads, lr, l2_decay=0.0):
    """Apply one bias-corrected Adam step in place.

    l2_decay adds decay*theta to the gradient before the moment updates
    (vanishes at the default decay of 0).
    """
    grads.check_congruent(net)
    K = kernels.active()
    state.step_count += 1
    bc1 = 1.0 - state.beta1 ** state.step_count
    bc2 = 1.0 - state.beta2 ** state.step_count
    for w, m, v, g in zip(net.weights, state.m_weights, state.v_weights,
                          grads.weight_grads):
        K.adam_update_(w, m, v, g, lr, state.beta1, state.beta2,
                       state.eps_hat, bc1, bc2, l2_decay)
    for b, m, v, g in zip(net.biases, state.m_biases, state.v_biases,
                          grads.bias_grads):
        K.adam_update_(b, m, v, g, lr, state.beta1, state.beta2,
                       state.eps_hat, bc1, bc2, l2_decay)
    check_finite(net)


def soft_update(target, source, tau):
    """target <- tau*source + (1-tau)*target on every parameter, exactly.

    Batch-norm running statistics are blended identically.
    """
    if not (0.0 <= tau <= 1.0):
        raise ValueError("tau must lie in [0, 1]")
    if not target.same_structure(source):
        raise ValueError("target and source networks differ structurally")
    K = kernels.active()
    for tw, sw in zip(target.weights, source.weights):
        K.blend_(tw, sw, tau)
    for tb, sb in zip(target.biases, source.biases):
        K.blend_(tb, sb, tau)
    for tb, sb in zip(target.bn, source.bn):
        if tb is not None:
            K.blend_(tb.running_mean, sb.running_mean, tau)
            K.blend_(tb.running_var, sb.running_var, tau)
    return target
