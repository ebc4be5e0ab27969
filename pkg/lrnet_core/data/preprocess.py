"""
Pixel scaling and bilinear resizing.

Output pixel d samples the source at s = (d + 0.5) * in / out - 0.5, clamped
to [0, in - 1] (half-pixel centres). Each output value is a convex
combination of at most four source pixels, so a [0, 1] input stays in [0, 1].
"""
from __future__ import annotations

import numpy as np

from lrnet_core.framework.errors import ShapeError
from lrnet_core.framework.guard import Guard
from lrnet_core.tensor import Precision, Tensor

SOURCE_SIZE = 28
TARGET_SIZE = 35
PIXEL_MAX = 255.0
RESIZE_CHUNK = 4096


def scale_pixels(raw: np.ndarray, precision: Precision = Precision.FLOAT32) -> np.ndarray:
    """uint8 [0, 255] -> float [0, 1]."""
    if raw.dtype != np.uint8:
        raise ShapeError(f"expected uint8 pixels, got {raw.dtype}")
    return (raw.astype(np.float64) / PIXEL_MAX).astype(precision.dtype)


def sample_grid(in_size: int, out_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source indices (lo, hi) and the weight of hi for each output coordinate."""
    Guard.positive(in_size, "in_size")
    Guard.positive(out_size, "out_size")
    d = np.arange(out_size, dtype=np.float64)
    s = np.clip((d + 0.5) * (in_size / out_size) - 0.5, 0.0, in_size - 1)
    lo = np.floor(s).astype(np.intp)
    hi = np.minimum(lo + 1, in_size - 1)
    return lo, hi, s - lo


def resize_bilinear(images: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize the last two axes of `images`; computed in float64, returned in the input dtype."""
    if images.ndim < 2:
        raise ShapeError(f"need at least 2 axes, got shape {images.shape}")
    h, w = images.shape[-2:]
    y0, y1, fy = sample_grid(h, out_h)
    x0, x1, fx = sample_grid(w, out_w)

    src = images.astype(np.float64, copy=False)
    rows = src[..., y0, :] * (1.0 - fy)[:, None] + src[..., y1, :] * fy[:, None]
    out = rows[..., x0] * (1.0 - fx) + rows[..., x1] * fx
    return out.astype(images.dtype if images.dtype.kind == "f" else np.float64)


def resize_bilinear_28_to_35(image: Tensor) -> Tensor:
    """Single [28, 28] (or [28, 28, 1]) image to [35, 35] (resp. [35, 35, 1])."""
    data = image.data
    squeeze = data.ndim == 3 and data.shape[-1] == 1
    plane = data[..., 0] if squeeze else data
    if plane.shape != (SOURCE_SIZE, SOURCE_SIZE):
        raise ShapeError(f"expected a {SOURCE_SIZE}x{SOURCE_SIZE} image, got {data.shape}")
    out = resize_bilinear(plane, TARGET_SIZE, TARGET_SIZE)
    return Tensor.wrap(out[..., None] if squeeze else out)


def resize_batch(images: np.ndarray, size: int = TARGET_SIZE) -> np.ndarray:
    """[N, H, W, 1] -> [N, size, size, 1], chunked to bound the float64 scratch."""
    Guard.rank(images.shape, 4, "images")
    n = images.shape[0]
    out = np.empty((n, size, size, images.shape[3]), dtype=images.dtype)
    for start in range(0, n, RESIZE_CHUNK):
        chunk = np.moveaxis(images[start : start + RESIZE_CHUNK], 3, 1)
        out[start : start + RESIZE_CHUNK] = np.moveaxis(resize_bilinear(chunk, size, size), 1, 3)
    return out
