"""Layer kernel semantics, shape inference, and forward-pass contracts."""

import numpy as np
import pytest

import pve.engine.layers as K
from pve.engine import (
    LayerSpec,
    ModelGraph,
    ShapeInferenceError,
    ShapeMismatchError,
    forward,
    infer_shapes,
    sigmoid,
)
from testutil import GraphBuilder, constant_model, naive_conv2d

EXPECTED_PRIOR = 190549 / 272006  # sigmoid(ln(190549/81457)), exact identity


def test_conv2d_matches_naive_reference():
    rng = np.random.default_rng(11)
    for stride, padding, kernel in [(1, 1, 3), (2, 0, 3), (1, 0, 1), (2, 1, 3)]:
        x = rng.normal(size=(9, 8, 3))
        w = rng.normal(size=(kernel, kernel, 3, 4))
        b = rng.normal(size=4)
        got = K.conv2d_forward(x, w, b, stride, padding)
        want = naive_conv2d(x, w, b, stride, padding)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_identity_1x1_conv_preserves_input():
    rng = np.random.default_rng(3)
    x = rng.uniform(size=(7, 5, 1))
    w = np.ones((1, 1, 1, 1))
    b = np.zeros(1)
    np.testing.assert_array_equal(K.conv2d_forward(x, w, b, 1, 0), x)


def test_maxpool_basic():
    x = np.arange(16, dtype=np.float64).reshape(4, 4, 1)
    out = K.maxpool2d_forward(x, 2, 2)
    np.testing.assert_array_equal(out[:, :, 0], [[5, 7], [13, 15]])


def test_maxpool_backward_first_max_in_scan_order():
    # two tied maxima: gradient goes to the earlier (row-major) one
    x = np.array([[5.0, 5.0], [3.0, 5.0]]).reshape(2, 2, 1)
    dy = np.ones((1, 1, 1))
    dx = K.maxpool2d_backward(x, dy, 2, 2)
    np.testing.assert_array_equal(dx[:, :, 0], [[1.0, 0.0], [0.0, 0.0]])


def test_maxpool_backward_overlapping_windows_accumulate():
    x = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]).reshape(2, 3, 1)
    dy = np.ones((1, 2, 1))
    dx = K.maxpool2d_backward(x, dy, 2, stride=1)
    # both 2x2 windows pick their top-row maximum: 2 and then 3
    np.testing.assert_array_equal(dx[0, :, 0], [0.0, 1.0, 1.0])
    np.testing.assert_array_equal(dx[1, :, 0], [0.0, 0.0, 0.0])


def test_relu_backward_zeroes_nonpositive_exactly():
    x = np.array([-1.0, 0.0, 1e-300, 2.0])
    dy = np.ones(4)
    dx = K.relu_backward(x, dy)
    assert dx[0] == 0.0 and dx[1] == 0.0
    assert dx[2] == 1.0 and dx[3] == 1.0


def test_global_avg_pool_roundtrip():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 7, 3))
    np.testing.assert_allclose(K.global_avg_pool_forward(x), x.mean(axis=(0, 1)))
    dy = np.array([1.0, 2.0, 3.0])
    dx = K.global_avg_pool_backward(x, dy)
    assert dx.shape == x.shape
    np.testing.assert_allclose(dx[0, 0], dy / 42.0)


def test_sigmoid_extremes_and_midpoint():
    assert sigmoid(np.array([0.0]))[0] == 0.5
    assert sigmoid(np.array([-800.0]))[0] == 0.0
    assert sigmoid(np.array([800.0]))[0] == 1.0
    np.testing.assert_allclose(sigmoid(np.array([0.849834]))[0], EXPECTED_PRIOR, atol=1e-7)


# --- shape inference ---------------------------------------------------

def test_infer_shapes_conv_same_padding():
    specs = [LayerSpec(kind="conv2d",
                       hyperparams={"kernel_h": 3, "kernel_w": 3, "stride": 1,
                                    "padding": 1, "in_channels": 3, "out_channels": 16},
                       weight_len=3 * 3 * 3 * 16, bias_len=16)]
    assert infer_shapes(specs, (256, 256, 3)) == [(256, 256, 16)]


def test_infer_shapes_maxpool_halves():
    specs = [LayerSpec(kind="maxpool2d", hyperparams={"pool_size": 2, "stride": 2})]
    assert infer_shapes(specs, (256, 256, 16)) == [(128, 128, 16)]


def test_infer_shapes_dense_mismatch_names_layer():
    specs = [
        LayerSpec(kind="global_avg_pool"),
        LayerSpec(kind="dense", hyperparams={"in_features": 100, "out_features": 1},
                  weight_len=100, bias_len=1),
    ]
    with pytest.raises(ShapeInferenceError) as err:
        infer_shapes(specs, (8, 8, 64))
    assert err.value.layer_index == 1


def test_graph_requires_terminal_sigmoid():
    g = GraphBuilder((4, 4, 1))
    g.dense(1, weights=np.zeros((16, 1)), bias=np.zeros(1))
    with pytest.raises(ShapeInferenceError):
        g.build()


# --- forward pass ------------------------------------------------------

def test_forward_zero_network_gives_half():
    model = constant_model(bias=0.0, input_shape=(8, 8, 3))
    x = np.random.default_rng(0).uniform(size=(8, 8, 3)).astype(np.float32)
    trace = forward(model, x)
    assert trace.logit == 0.0
    assert trace.probability == 0.5


def test_forward_logratio_bias_gives_corpus_prior():
    model = constant_model(bias=0.8498341056885721, input_shape=(8, 8, 3))
    x = np.zeros((8, 8, 3), dtype=np.float32)
    trace = forward(model, x)
    assert abs(trace.probability - EXPECTED_PRIOR) < 1e-7


def test_forward_probability_is_sigmoid_of_logit():
    rng = np.random.default_rng(7)
    g = GraphBuilder((6, 6, 2))
    g.conv(3, rng=rng).relu().gap().dense(1, rng=rng).sigmoid()
    model = g.build()
    trace = forward(model, rng.uniform(size=(6, 6, 2)))
    assert trace.probability == float(sigmoid(np.array([trace.logit]))[0])
    assert len(trace.outputs) == len(model.layers)


def test_forward_shape_mismatch():
    model = constant_model(input_shape=(8, 8, 3))
    with pytest.raises(ShapeMismatchError):
        forward(model, np.zeros((4, 4, 3)))


def test_forward_deterministic_bitwise():
    rng = np.random.default_rng(13)
    g = GraphBuilder((10, 10, 3))
    g.conv(4, stride=2, rng=rng).relu().maxpool().gap().dense(1, rng=rng).sigmoid()
    model = g.build()
    x = rng.uniform(size=(10, 10, 3))
    t1 = forward(model, x)
    t2 = forward(model, x)
    assert t1.logit == t2.logit
    assert t1.probability == t2.probability
    for a, b in zip(t1.outputs, t2.outputs):
        np.testing.assert_array_equal(a, b)


def test_forward_linear_graph_is_homogeneous():
    # conv + dense only: logit minus the zero-input logit scales linearly
    rng = np.random.default_rng(21)
    g = GraphBuilder((8, 8, 2))
    g.conv(3, kernel=3, stride=1, padding=1, rng=rng)
    g.conv(2, kernel=1, stride=1, padding=0, rng=rng)
    g.dense(1, rng=rng)
    g.sigmoid()
    model = g.build()

    x = rng.uniform(size=(8, 8, 2))
    base = forward(model, np.zeros((8, 8, 2))).logit
    lx = forward(model, x).logit - base
    for a in (0.25, 2.0, 7.5):
        lax = forward(model, a * x).logit - base
        assert abs(lax - a * lx) <= 1e-4 * max(abs(lax), abs(a * lx))


def test_add_skip_equals_explicit_branch_sum():
    rng = np.random.default_rng(31)
    g = GraphBuilder((6, 6, 2))
    g.conv(2, kernel=3, stride=1, padding=1, rng=rng)           # layer 0: trunk
    g.conv(2, kernel=3, stride=1, padding=1, rng=rng)           # layer 1: branch
    g.add_skip(0)                                               # layer 2
    g.gap().dense(1, weights=np.eye(2)[:, :1], bias=np.zeros(1))
    g.sigmoid()
    model = g.build()

    x = rng.uniform(size=(6, 6, 2))
    trace = forward(model, x)
    w0 = model.conv_weight(model.layers[0]).astype(np.float64)
    b0 = model.bias_slice(model.layers[0]).astype(np.float64)
    w1 = model.conv_weight(model.layers[1]).astype(np.float64)
    b1 = model.bias_slice(model.layers[1]).astype(np.float64)
    trunk = naive_conv2d(x, w0, b0, 1, 1)
    branch = naive_conv2d(trunk, w1, b1, 1, 1)
    np.testing.assert_allclose(trace.outputs[2], trunk + branch, rtol=1e-10, atol=1e-12)


def test_skip_source_shape_checked():
    g = GraphBuilder((6, 6, 2))
    g.conv(4, kernel=3, stride=1, padding=1)  # (6, 6, 4)
    g.conv(3, kernel=3, stride=1, padding=1)  # (6, 6, 3)
    g.add_skip(0)                             # source shape disagrees
    g.gap()
    with pytest.raises(ShapeInferenceError) as err:
        g.dense(1, weights=np.zeros((3, 1)), bias=np.zeros(1)).sigmoid().build()
    assert err.value.layer_index == 2
