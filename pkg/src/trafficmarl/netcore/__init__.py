"""Feed-forward network engine: forward/backward, batch norm, Adam,
gradient clipping, soft target updates, and binary serialization."""

from .errors import CheckpointFormatError, DivergenceError
from .network import (
    ACTIVATIONS,
    BN_EPSILON,
    BN_MOMENTUM,
    LEAKY_SLOPE,
    BatchNormState,
    ForwardCache,
    GradBundle,
    LayerSpec,
    Mlp,
    backward,
    check_finite,
    forward,
    forward_infer,
    mlp_init,
    validate_specs,
)
from .optim import (
    AdamState,
    adam_step,
    clip_global_norm,
    global_grad_norm,
    soft_update,
)
from .serialize import deserialize, serialize

__all__ = [
    "ACTIVATIONS", "BN_EPSILON", "BN_MOMENTUM", "LEAKY_SLOPE",
    "BatchNormState", "ForwardCache", "GradBundle", "LayerSpec", "Mlp",
    "AdamState", "CheckpointFormatError", "DivergenceError",
    "adam_step", "backward", "check_finite", "clip_global_norm",
    "deserialize", "forward", "forward_infer", "global_grad_norm",
    "mlp_init", "serialize", "soft_update", "validate_specs",
]
