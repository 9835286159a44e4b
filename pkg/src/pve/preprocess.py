"""Image decoding and the network input pipeline.

Web image bytes (PNG or baseline JPEG) become a 256x256x3 float32 tensor
with values in [0, 1]: decode -> bilinear resize -> scale by 1/255.
Alpha is composited over white, grayscale is replicated across channels,
and resizing stretches to the target size without preserving aspect.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

NET_HEIGHT = 256
NET_WIDTH = 256
NET_SHAPE = (NET_HEIGHT, NET_WIDTH, 3)


class DecodeError(Exception):
    """Image bytes could not be decoded."""


class UnsupportedFormatError(DecodeError):
    """Image format outside the accepted PNG/JPEG subset."""


@dataclass
class RawImage:
    """Decoded 8-bit RGB image, pixels shaped (height, width, 3)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions {self.width}x{self.height} not positive")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} != "
                f"({self.height}, {self.width}, 3)")
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"pixel dtype {self.pixels.dtype} != uint8")

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "RawImage":
        pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


def decode_image(data: bytes) -> RawImage:
    """Decode PNG or JPEG bytes to RGB.

    Alpha channels are composited over white (out = a*src + (1-a)*255);
    grayscale is replicated to three channels. Animated streams and
    other formats are rejected.
    """
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc

    if img.format not in ("PNG", "JPEG"):
        raise UnsupportedFormatError(f"unsupported format {img.format!r}, need PNG or JPEG")
    if getattr(img, "is_animated", False):
        raise UnsupportedFormatError("animated images are not supported")

    rgba = np.asarray(img.convert("RGBA"), dtype=np.float64)
    alpha = rgba[..., 3:4] / 255.0
    composited = alpha * rgba[..., :3] + (1.0 - alpha) * 255.0
    pixels = np.floor(composited + 0.5).clip(0, 255).astype(np.uint8)
    return RawImage.from_array(pixels)


def resample_bilinear(src: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resample of an (H, W[, C]) float array using half-pixel
    sample centers, with coordinates clamped to the source edges."""
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size {out_w}x{out_h} not positive")
    in_h, in_w = src.shape[0], src.shape[1]

    sx = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    sy = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = sx - x0
    fy = sy - y0

    if src.ndim == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
    else:
        fx = fx[None, :]
        fy = fy[:, None]

    top = src[np.ix_(y0, x0)] * (1.0 - fx) + src[np.ix_(y0, x1)] * fx
    bottom = src[np.ix_(y1, x0)] * (1.0 - fx) + src[np.ix_(y1, x1)] * fx
    return top * (1.0 - fy) + bottom * fy


def resize_bilinear(img: RawImage, out_w: int = NET_WIDTH,
                    out_h: int = NET_HEIGHT) -> RawImage:
    resampled = resample_bilinear(img.pixels.astype(np.float64), out_w, out_h)
    pixels = np.floor(resampled + 0.5).clip(0, 255).astype(np.uint8)
    return RawImage(width=out_w, height=out_h, pixels=pixels)


def normalize(img: RawImage) -> np.ndarray:
    """256x256 RGB image -> float32 tensor with values pixel/255 in [0, 1]."""
    if (img.height, img.width) != (NET_HEIGHT, NET_WIDTH):
        raise ValueError(
            f"expected {NET_WIDTH}x{NET_HEIGHT} input, got {img.width}x{img.height}")
    return (img.pixels / 255.0).astype(np.float32)


def preprocess(data: bytes) -> np.ndarray:
    """decode -> resize -> normalize: image bytes to the network input tensor."""
    return normalize(resize_bilinear(decode_image(data)))


def encode_png(img: RawImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()
