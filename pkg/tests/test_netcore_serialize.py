import struct

import numpy as np
import pytest

from trafficmarl.netcore import (
    CheckpointFormatError,
    LayerSpec,
    deserialize,
    forward,
    mlp_init,
    serialize,
)


def _random_net(seed, with_bn=True):
    specs = [LayerSpec(3, 6, "leaky_relu", has_batch_norm_before=with_bn),
             LayerSpec(6, 4, "leaky_relu"),
             LayerSpec(4, 2, "softmax")]
    net = mlp_init(specs, seed=seed)
    # exercise non-trivial running stats
    rng = np.random.default_rng(seed)
    forward(net, rng.normal(size=(8, 3)), mode="train")
    return net


@pytest.mark.parametrize("with_bn", [True, False])
def test_round_trip_bit_exact(with_bn):
    net = _random_net(13, with_bn=with_bn)
    clone = deserialize(serialize(net))
    assert clone.specs == net.specs
    for a, b in zip(clone.weights, net.weights):
        assert np.array_equal(a, b)
    for a, b in zip(clone.biases, net.biases):
        assert np.array_equal(a, b)
    for a, b in zip(clone.bn, net.bn):
        if b is None:
            assert a is None
        else:
            assert np.array_equal(a.running_mean, b.running_mean)
            assert np.array_equal(a.running_var, b.running_var)
            assert a.momentum == b.momentum and a.epsilon == b.epsilon


def test_truncated_bytes_rejected():
    data = serialize(_random_net(1))
    with pytest.raises(CheckpointFormatError):
        deserialize(data[: len(data) // 2])


def test_unsupported_version_rejected():
    import zlib
    data = serialize(_random_net(2))
    body = bytearray(data[:-4])
    body[4:8] = struct.pack("<I", 999)
    tampered = bytes(body) + struct.pack("<I", zlib.crc32(bytes(body)))
    with pytest.raises(CheckpointFormatError, match="version 999"):
        deserialize(tampered)


def test_checksum_failure_rejected():
    data = bytearray(serialize(_random_net(3)))
    data[20] ^= 0xFF
    with pytest.raises(CheckpointFormatError, match="checksum"):
        deserialize(bytes(data))


def test_bad_magic_rejected():
    data = serialize(_random_net(4))
    with pytest.raises(CheckpointFormatError):
        deserialize(b"XXXX" + data[4:])
