import numpy as np
import pytest

from trafficmarl.netcore import (
    BatchNormState,
    LayerSpec,
    backward,
    forward,
    forward_infer,
    mlp_init,
)


def test_init_deterministic_given_seed():
    specs = [LayerSpec(2, 3, "leaky_relu")]
    a = mlp_init(specs, seed=7)
    b = mlp_init(specs, seed=7)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    for ba, bb in zip(a.biases, b.biases):
        assert np.array_equal(ba, bb)


def test_init_dimension_chain_violation():
    with pytest.raises(ValueError, match="chain"):
        mlp_init([LayerSpec(2, 3, "leaky_relu"), LayerSpec(4, 1)], seed=0)


def test_init_param_count_hand_count():
    # 8*64+64 + 64*64+64 + 64*4+4
    specs = [LayerSpec(8, 64, "leaky_relu"), LayerSpec(64, 64, "leaky_relu"),
             LayerSpec(64, 4, "softmax")]
    net = mlp_init(specs, seed=1)
    assert net.n_params() == 8 * 64 + 64 + 64 * 64 + 64 + 64 * 4 + 4 == 4996


def test_init_bounds_and_zero_biases():
    specs = [LayerSpec(9, 16, "leaky_relu"), LayerSpec(16, 4, "linear")]
    net = mlp_init(specs, seed=3)
    assert np.all(np.abs(net.weights[0]) <= 1.0 / 3.0)
    assert np.all(np.abs(net.weights[1]) <= 3e-3)
    assert np.all(net.biases[0] == 0.0) and np.all(net.biases[1] == 0.0)


def test_softmax_only_final_layer():
    with pytest.raises(ValueError, match="softmax"):
        mlp_init([LayerSpec(2, 2, "softmax"), LayerSpec(2, 1)], seed=0)


def test_forward_leaky_hand_value():
    net = mlp_init([LayerSpec(1, 1, "leaky_relu")], seed=0)
    net.weights[0][:] = 1.0
    y, _ = forward(net, np.array([[-1.0]]), mode="infer")
    assert y[0, 0] == pytest.approx(-0.01, abs=1e-15)


def test_softmax_uniform_on_zero_logits():
    net = mlp_init([LayerSpec(4, 4, "softmax")], seed=0)
    net.weights[0][:] = 0.0
    y, _ = forward(net, np.zeros((1, 4)), mode="infer")
    assert np.allclose(y, 0.25, atol=1e-15)


def test_softmax_rows_on_simplex():
    net = mlp_init([LayerSpec(6, 5, "leaky_relu"), LayerSpec(5, 3, "softmax")],
                   seed=11)
    rng = np.random.default_rng(0)
    y, _ = forward(net, rng.normal(0, 5, size=(40, 6)), mode="infer")
    assert np.all(y > 0.0) and np.all(y < 1.0)
    assert np.abs(y.sum(axis=1) - 1.0).max() < 1e-12


def test_bn_infer_identity_with_unit_stats():
    net = mlp_init([LayerSpec(3, 3, "linear", has_batch_norm_before=True)], seed=0)
    net.weights[0][:] = np.eye(3)
    net.bn[0] = BatchNormState(np.zeros(3), np.ones(3), epsilon=1e-15)
    x = np.array([[0.5, -2.0, 3.0]])
    y, _ = forward(net, x, mode="infer")
    assert np.allclose(y, x, atol=1e-12)


def test_forward_width_mismatch():
    net = mlp_init([LayerSpec(3, 2)], seed=0)
    with pytest.raises(ValueError, match="width"):
        forward(net, np.zeros((1, 4)))


def test_train_mode_batch_of_one_with_bn_rejected():
    net = mlp_init([LayerSpec(2, 2, "linear", has_batch_norm_before=True)], seed=0)
    with pytest.raises(ValueError, match="batch size"):
        forward(net, np.zeros((1, 2)), mode="train")
    # without a BN site batch size 1 is fine
    net2 = mlp_init([LayerSpec(2, 2)], seed=0)
    forward(net2, np.zeros((1, 2)), mode="train")


def test_bn_running_stats_update_in_train_only():
    net = mlp_init([LayerSpec(2, 2, "linear", has_batch_norm_before=True)], seed=0)
    rng = np.random.default_rng(4)
    x = rng.normal(2.0, 3.0, size=(64, 2))
    before = net.bn[0].running_mean.copy()
    forward(net, x, mode="infer")
    assert np.array_equal(net.bn[0].running_mean, before)
    forward(net, x, mode="train")
    # momentum 0.9: running = 0.9*0 + 0.1*batch_mean
    assert np.allclose(net.bn[0].running_mean, 0.1 * x.mean(axis=0), rtol=1e-12)
    assert np.allclose(net.bn[0].running_var, 0.9 + 0.1 * x.var(axis=0), rtol=1e-12)


def test_backward_zero_upstream_gives_zero_grads():
    net = mlp_init([LayerSpec(3, 4, "leaky_relu", True), LayerSpec(4, 2, "softmax")],
                   seed=5)
    x = np.random.default_rng(1).normal(size=(5, 3))
    _, cache = forward(net, x, mode="train")
    g = backward(net, cache, np.zeros((5, 2)))
    assert all(np.all(gw == 0.0) for gw in g.weight_grads)
    assert all(np.all(gb == 0.0) for gb in g.bias_grads)
    assert np.all(g.input_grad == 0.0)


def test_backward_linear_hand_values():
    # y = w*x, w init then forced; input 3, upstream 1 -> dw = 3, dx = w
    net = mlp_init([LayerSpec(1, 1)], seed=0)
    net.weights[0][0, 0] = 1.75
    _, cache = forward(net, np.array([[3.0]]), mode="infer")
    g = backward(net, cache, np.array([[1.0]]))
    assert g.weight_grads[0][0, 0] == pytest.approx(3.0, abs=1e-15)
    assert g.bias_grads[0][0] == pytest.approx(1.0, abs=1e-15)
    assert g.input_grad[0, 0] == pytest.approx(1.75, abs=1e-15)


def test_backward_cache_net_mismatch():
    net_a = mlp_init([LayerSpec(2, 2)], seed=0)
    net_b = mlp_init([LayerSpec(2, 2)], seed=0)
    _, cache = forward(net_a, np.zeros((1, 2)))
    with pytest.raises(ValueError, match="different network"):
        backward(net_b, cache, np.zeros((1, 2)))


def test_forward_infer_matches_forward():
    net = mlp_init([LayerSpec(5, 8, "leaky_relu", True),
                    LayerSpec(8, 3, "softmax")], seed=9)
    x = np.random.default_rng(2).normal(size=(7, 5))
    expected, _ = forward(net, x, mode="infer")
    assert np.array_equal(forward_infer(net, x), expected)


def test_bit_identical_parameters_after_same_op_sequence():
    from trafficmarl.netcore import AdamState, adam_step

    def build_and_train():
        net = mlp_init([LayerSpec(3, 4, "leaky_relu"), LayerSpec(4, 2)], seed=21)
        opt = AdamState.for_net(net)
        rng = np.random.default_rng(77)
        for _ in range(5):
            x = rng.normal(size=(6, 3))
            y, cache = forward(net, x, mode="train")
            g = backward(net, cache, rng.normal(size=y.shape))
            adam_step(opt, net, g, lr=1e-3)
        return net

    a, b = build_and_train(), build_and_train()
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
