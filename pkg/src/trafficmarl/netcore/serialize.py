"""Binary network checkpoint format.

Versioned key-value layout, little-endian throughout:

    magic b"TMNC" | version u32 | n_layers u32
    per layer: index u32 | in_dim u32 | out_dim u32 | activation u8 | bn u8
               | weights f8[out*in] row-major | biases f8[out]
               | if bn: momentum f8 | epsilon f8 | running_mean f8[in]
                        | running_var f8[in]
    crc32 u32 over everything above

Round-trips are bit-exact, including batch-norm running statistics.
"""

import struct
import zlib

import numpy as np

from .errors import CheckpointFormatError
from .network import ACTIVATIONS, BatchNormState, LayerSpec, Mlp

MAGIC = b"TMNC"
VERSION = 1

_ACT_CODE = {name: i for i, name in enumerate(ACTIVATIONS)}
_ACT_NAME = {i: name for name, i in _ACT_CODE.items()}


def _arr_bytes(a):
    return np.ascontiguousarray(a, dtype="<f8").tobytes()


def serialize(net):
    parts = [MAGIC, struct.pack("<II", VERSION, len(net.specs))]
    for i, spec in enumerate(net.specs):
        parts.append(struct.pack("<IIIBB", i, spec.in_dim, spec.out_dim,
                                 _ACT_CODE[spec.activation],
                                 1 if spec.has_batch_norm_before else 0))
        parts.append(_arr_bytes(net.weights[i]))
        parts.append(_arr_bytes(net.biases[i]))
        bn = net.bn[i]
        if bn is not None:
            parts.append(struct.pack("<dd", bn.momentum, bn.epsilon))
            parts.append(_arr_bytes(bn.running_mean))
            parts.append(_arr_bytes(bn.running_var))
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise CheckpointFormatError("truncated network checkpoint")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, count):
        raw = self.take(count * 8)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).copy()


def deserialize(data):
    if len(data) < 4 + 8 + 4:
        raise CheckpointFormatError("truncated network checkpoint")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise CheckpointFormatError("network checkpoint checksum mismatch")
    r = _Reader(body)
    if r.take(4) != MAGIC:
        raise CheckpointFormatError("bad magic; not a network checkpoint")
    version, n_layers = r.unpack("<II")
    if version != VERSION:
        raise CheckpointFormatError(
            f"unsupported network checkpoint version {version}")
    specs, weights, biases, bn = [], [], [], []
    for i in range(n_layers):
        idx, in_dim, out_dim, act, has_bn = r.unpack("<IIIBB")
        if idx != i:
            raise CheckpointFormatError(f"layer index {idx} out of order")
        if act not in _ACT_NAME:
            raise CheckpointFormatError(f"unknown activation code {act}")
        specs.append(LayerSpec(in_dim, out_dim, _ACT_NAME[act], bool(has_bn)))
        weights.append(r.array(out_dim * in_dim).reshape(out_dim, in_dim))
        biases.append(r.array(out_dim))
        if has_bn:
            momentum, epsilon = r.unpack("<dd")
            bn.append(BatchNormState(r.array(in_dim), r.array(in_dim),
                                     momentum, epsilon))
        else:
            bn.append(None)
    if r.pos != len(body):
        raise CheckpointFormatError("trailing bytes in network checkpoint")
    return Mlp(specs=tuple(specs), weights=weights, biases=biases, bn=bn)
