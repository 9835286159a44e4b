"""Saliency maps, colormaps, blending, and the explain pipeline."""

import numpy as np
import pytest

from pve.detector import DetectorConfig
from pve.preprocess import RawImage, decode_image, encode_png
from pve.saliency import (
    COLORMAPS,
    OverlayConfig,
    SaliencyMap,
    blend,
    colorize,
    explain,
    upscale_map,
    vanilla_gradient,
)
from pve.reference import build_default_model
from testutil import GraphBuilder, constant_model, png_bytes


def test_zero_weight_network_gives_all_zero_map():
    model = constant_model(bias=2.0, input_shape=(16, 16, 3))
    x = np.random.default_rng(0).uniform(size=(16, 16, 3)).astype(np.float32)
    smap = vanilla_gradient(model, x)
    assert smap.values.shape == (16, 16)
    assert np.all(smap.values == 0.0)


def test_linear_model_map_matches_weight_magnitudes():
    rng = np.random.default_rng(4)
    w = rng.normal(size=(12 * 10 * 3, 1)).astype(np.float32)
    g = GraphBuilder((12, 10, 3))
    g.dense(1, weights=w, bias=np.zeros(1))
    g.sigmoid()
    model = g.build()

    x = rng.uniform(size=(12, 10, 3)).astype(np.float32)
    smap = vanilla_gradient(model, x)

    mag = np.abs(w.reshape(12, 10, 3)).max(axis=2).astype(np.float64)
    expected = (mag - mag.min()) / (mag.max() - mag.min())
    np.testing.assert_allclose(smap.values, expected.astype(np.float32), atol=1e-7)


def test_map_range_and_shape_contract():
    model = build_default_model()
    rng = np.random.default_rng(17)
    weights = model.weights.copy()
    weights[:] = rng.normal(0, 0.05, size=weights.size).astype(np.float32)
    model.weights[:] = weights
    x = rng.uniform(size=(256, 256, 3)).astype(np.float32)
    smap = vanilla_gradient(model, x)
    assert smap.values.shape == (256, 256)
    assert smap.values.min() >= 0.0
    assert smap.values.max() == 1.0


def test_argmax_location_survives_normalization():
    rng = np.random.default_rng(23)
    g = GraphBuilder((10, 10, 2))
    g.conv(3, rng=rng).relu().gap().dense(1, rng=rng).sigmoid()
    model = g.build()
    x = rng.uniform(size=(10, 10, 2)).astype(np.float32)

    from pve.engine import backward_to_input, forward
    raw = np.abs(backward_to_input(model, forward(model, x))).max(axis=2)
    smap = vanilla_gradient(model, x)
    assert np.unravel_index(np.argmax(raw), raw.shape) == \
        np.unravel_index(np.argmax(smap.values), smap.values.shape)


def test_upscale_identity_and_constant():
    values = np.random.default_rng(1).uniform(size=(256, 256)).astype(np.float32)
    smap = SaliencyMap(width=256, height=256, values=values)
    same = upscale_map(smap, 256, 256)
    np.testing.assert_array_equal(same.values, values)

    const = SaliencyMap(width=8, height=8,
                        values=np.full((8, 8), 0.7, dtype=np.float32))
    up = upscale_map(const, 31, 17)
    assert up.values.shape == (17, 31)
    np.testing.assert_allclose(up.values, 0.7, atol=1e-6)


def test_upscale_2x1_matches_half_pixel_formula():
    smap = SaliencyMap(width=2, height=1,
                       values=np.array([[0.0, 1.0]], dtype=np.float32))
    up = upscale_map(smap, 4, 1)
    np.testing.assert_allclose(up.values[0], [0.0, 0.25, 0.75, 1.0], atol=1e-7)


def test_colorize_grayscale_endpoints_and_midpoint():
    smap = SaliencyMap(width=3, height=1,
                       values=np.array([[0.0, 0.5, 1.0]], dtype=np.float32))
    img = colorize(smap, "grayscale")
    np.testing.assert_array_equal(img.pixels[0, 0], [0, 0, 0])
    np.testing.assert_array_equal(img.pixels[0, 1], [128, 128, 128])
    np.testing.assert_array_equal(img.pixels[0, 2], [255, 255, 255])


def test_colorize_constant_map_constant_color():
    smap = SaliencyMap(width=5, height=4,
                       values=np.full((4, 5), 0.31, dtype=np.float32))
    for name in COLORMAPS:
        img = colorize(smap, name)
        assert np.all(img.pixels == img.pixels[0, 0])


def test_colorize_unknown_name_rejected():
    smap = SaliencyMap(width=1, height=1, values=np.zeros((1, 1), dtype=np.float32))
    with pytest.raises(ValueError):
        colorize(smap, "viridis")


def test_blend_endpoints_bit_exact():
    rng = np.random.default_rng(2)
    a = RawImage.from_array(rng.integers(0, 256, size=(9, 7, 3), dtype=np.uint8))
    b = RawImage.from_array(rng.integers(0, 256, size=(9, 7, 3), dtype=np.uint8))
    np.testing.assert_array_equal(blend(a, b, 0.0).pixels, a.pixels)
    np.testing.assert_array_equal(blend(a, b, 1.0).pixels, b.pixels)


def test_blend_arithmetic():
    a = RawImage.from_array(np.full((1, 1, 3), 200, dtype=np.uint8))
    b = RawImage.from_array(np.full((1, 1, 3), 100, dtype=np.uint8))
    out = blend(a, b, 0.45)
    np.testing.assert_array_equal(out.pixels, np.full((1, 1, 3), 155, dtype=np.uint8))


def test_blend_dimension_mismatch():
    a = RawImage.from_array(np.zeros((4, 4, 3), dtype=np.uint8))
    b = RawImage.from_array(np.zeros((4, 5, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        blend(a, b, 0.5)


def test_overlay_config_validation():
    with pytest.raises(ValueError):
        OverlayConfig(alpha=1.5)
    with pytest.raises(ValueError):
        OverlayConfig(colormap="nope")


# --- explain ------------------------------------------------------------

def test_explain_passthrough_for_human_label():
    model = constant_model(bias=-1.0)  # probability ~0.27 -> human
    rng = np.random.default_rng(5)
    data = png_bytes(rng.integers(0, 256, size=(40, 60, 3), dtype=np.uint8))
    result = explain(model, data)
    assert result.prediction.label == "human"
    assert not result.overlaid
    assert encode_png(result.image) == encode_png(decode_image(data))


def test_explain_alpha_zero_returns_original_pixels():
    model = build_default_model()  # prior 0.70 -> ai at threshold 0.5
    rng = np.random.default_rng(6)
    pixels = rng.integers(0, 256, size=(33, 47, 3), dtype=np.uint8)
    result = explain(model, png_bytes(pixels), OverlayConfig(alpha=0.0))
    assert result.prediction.label == "ai"
    assert result.overlaid
    np.testing.assert_array_equal(result.image.pixels, pixels)


def test_explain_preserves_dimensions():
    model = build_default_model()
    rng = np.random.default_rng(7)
    data = png_bytes(rng.integers(0, 256, size=(121, 83, 3), dtype=np.uint8))
    result = explain(model, data, OverlayConfig(alpha=0.45))
    assert (result.image.width, result.image.height) == (83, 121)


def test_explain_force_saliency_on_human_label():
    model = constant_model(bias=-1.0)
    rng = np.random.default_rng(8)
    data = png_bytes(rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8))
    result = explain(model, data,
                     detector_config=DetectorConfig(saliency_on_positive_only=False))
    assert result.prediction.label == "human"
    assert result.overlaid
