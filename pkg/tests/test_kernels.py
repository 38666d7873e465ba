"""Cross-backend agreement between the numba kernels and the numpy fallback."""

import numpy as np
import pytest

from trafficmarl.netcore import kernels

numba_missing = "numba" not in kernels.available_backends()
pytestmark = pytest.mark.skipif(numba_missing, reason="numba unavailable")

NP = kernels.get_backend("numpy")
NB = kernels.get_backend("numba") if not numba_missing else None

RNG = np.random.default_rng(42)
Z = RNG.normal(size=(37, 19))
DY = RNG.normal(size=(37, 19))


def test_leaky_forward_backward_bitwise():
    assert np.array_equal(NP.leaky_forward(Z, 0.01), NB.leaky_forward(Z, 0.01))
    assert np.array_equal(NP.leaky_backward(Z, DY, 0.01),
                          NB.leaky_backward(Z, DY, 0.01))


def test_softmax_agreement():
    a, b = NP.softmax_forward(Z), NB.softmax_forward(Z)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)
    da = NP.softmax_backward(a, DY)
    db = NB.softmax_backward(b, DY)
    assert np.allclose(da, db, rtol=1e-12, atol=1e-14)


def test_bn_agreement():
    xa, ma, va, ia = NP.bn_train_forward(Z, 1e-5)
    xb, mb, vb, ib = NB.bn_train_forward(Z, 1e-5)
    assert np.allclose(ma, mb, rtol=1e-13) and np.allclose(va, vb, rtol=1e-12)
    assert np.allclose(xa, xb, rtol=1e-11, atol=1e-13)
    da = NP.bn_train_backward(xa, ia, DY)
    db = NB.bn_train_backward(xb, ib, DY)
    assert np.allclose(da, db, rtol=1e-10, atol=1e-12)
    rm, rv = RNG.normal(size=19), RNG.uniform(0.5, 2.0, size=19)
    assert np.allclose(NP.bn_infer_forward(Z, rm, rv, 1e-5),
                       NB.bn_infer_forward(Z, rm, rv, 1e-5), rtol=1e-13)
    assert np.allclose(NP.bn_infer_backward(rv, 1e-5, DY),
                       NB.bn_infer_backward(rv, 1e-5, DY), rtol=1e-13)


def test_adam_update_bitwise():
    w = RNG.normal(size=(11, 7))
    g = RNG.normal(size=(11, 7))
    args = (1e-3, 0.9, 0.999, 1e-8, 0.1, 0.000999, 0.01)

    wa, ma, va = w.copy(), np.zeros_like(w), np.zeros_like(w)
    NP.adam_update_(wa, ma, va, g, *args)
    wb, mb, vb = w.copy(), np.zeros_like(w), np.zeros_like(w)
    NB.adam_update_(wb, mb, vb, g, *args)
    assert np.allclose(wa, wb, rtol=1e-15, atol=0)
    assert np.allclose(ma, mb, rtol=1e-15, atol=0)


def test_blend_bitwise():
    t = RNG.normal(size=64)
    s = RNG.normal(size=64)
    ta, tb = t.copy(), t.copy()
    NP.blend_(ta, s, 0.01)
    NB.blend_(tb, s, 0.01)
    assert np.array_equal(ta, tb)


def test_sq_norm_and_scale():
    g = RNG.normal(size=(23,))
    assert NP.sq_norm(g) == pytest.approx(NB.sq_norm(g), rel=1e-13)
    ga, gb = g.copy(), g.copy()
    NP.scale_(ga, 0.37)
    NB.scale_(gb, 0.37)
    assert np.array_equal(ga, gb)


def test_ema_floor():
    r = np.full(4, 1e-307)
    NP.ema_update_(r, np.zeros(4), 0.9, float(np.finfo(np.float64).tiny))
    assert np.all(r > 0)
    r2 = np.zeros(4)
    NB.ema_update_(r2, np.zeros(4), 0.9, float(np.finfo(np.float64).tiny))
    assert np.all(r2 > 0)


def test_set_backend_roundtrip():
    original = kernels.backend_name()
    try:
        assert kernels.set_backend("numpy").NAME == "numpy"
        assert kernels.backend_name() == "numpy"
    finally:
        kernels.set_backend(original)
    with pytest.raises(ValueError, match="unknown kernel backend"):
        kernels.set_backend("cuda")
