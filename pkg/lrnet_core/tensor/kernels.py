"""
Deterministic numerical kernels over NHWC tensors.

Convolutions use SAME zero padding and stride 1. The forward pass accumulates
one matrix product per kernel tap in fixed dy -> dx order, each tap reducing
over input channels, so the summation order never depends on the batch size
or the thread count.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import expit

from lrnet_core.framework.errors import ConfigError, ShapeError
from lrnet_core.framework.guard import Guard
from lrnet_core.tensor.models import FloatArray, Tensor

POOL_WINDOW = 2
POOL_STRIDE = 2


def _result(arr: np.ndarray, what: str) -> Tensor:
    Guard.finite(arr, f"{what} output")
    return Tensor.wrap(arr)


def _same_precision(*tensors: Tensor) -> None:
    dtypes = {t.data.dtype for t in tensors}
    if len(dtypes) > 1:
        raise ConfigError(f"mixed precision operands: {sorted(d.name for d in dtypes)}")


# ----------------------------------------------------------------------
# Convolution
# ----------------------------------------------------------------------

def _check_conv(x: Tensor, kernel: Tensor, bias: Tensor | None) -> tuple[int, int]:
    Guard.rank(x.shape, 4, "input")
    Guard.rank(kernel.shape, 4, "kernel")
    kh, kw, cin, cout = kernel.shape
    if kh != kw:
        raise ShapeError(f"kernel must be square, got {kh}x{kw}")
    Guard.odd_kernel(kh)
    if cin != x.shape[3]:
        raise ShapeError(f"kernel expects {cin} input channels, input has {x.shape[3]}")
    if bias is not None and bias.shape != (cout,):
        raise ShapeError(f"bias must have shape ({cout},), got {bias.shape}")
    _same_precision(*(t for t in (x, kernel, bias) if t is not None))
    return kh, cout


def _pad(x: FloatArray, p: int) -> FloatArray:
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))


def _tap(xp: FloatArray, dy: int, dx: int, h: int, w: int) -> FloatArray:
    """Input window for one kernel tap as a contiguous (N*H*W, Cin) matrix."""
    cin = xp.shape[3]
    return np.ascontiguousarray(xp[:, dy:dy + h, dx:dx + w, :]).reshape(-1, cin)


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor) -> Tensor:
    """
    SAME-padded, stride-1 convolution.

    x: N,H,W,Cin; kernel: k,k,Cin,Cout (k odd); bias: Cout.
    out[n,y,x,o] = bias[o] + sum_{dy,dx,i} in[n, y+dy-k//2, x+dx-k//2, i] * ker[dy,dx,i,o]
    """
    k, cout = _check_conv(x, kernel, bias)
    n, h, w, _ = x.shape
    xp = _pad(x.data, k // 2)
    w_arr = kernel.data

    out = np.empty((n * h * w, cout), dtype=x.data.dtype)
    out[...] = bias.data
    for dy in range(k):
        for dx in range(k):
            out += _tap(xp, dy, dx, h, w) @ w_arr[dy, dx]
    return _result(out.reshape(n, h, w, cout), "conv2d")


def conv2d_backward(
    x: Tensor, kernel: Tensor, grad_out: Tensor
) -> tuple[Tensor, Tensor, Tensor]:
    """Gradients of conv2d w.r.t. input, kernel and bias."""
    k, cout = _check_conv(x, kernel, None)
    n, h, w, cin = x.shape
    Guard.same_shape(grad_out.shape, (n, h, w, cout), "conv2d grad_out")
    p = k // 2
    xp = _pad(x.data, p)
    w_arr = kernel.data
    g = grad_out.data.reshape(-1, cout)

    dxp = np.zeros_like(xp)
    dw = np.empty_like(w_arr)
    for dy in range(k):
        for dx in range(k):
            dw[dy, dx] = _tap(xp, dy, dx, h, w).T @ g
            dxp[:, dy:dy + h, dx:dx + w, :] += (g @ w_arr[dy, dx].T).reshape(n, h, w, cin)
    db = g.sum(axis=0)
    dx_arr = dxp[:, p:p + h, p:p + w, :] if p else dxp
    return Tensor.wrap(dx_arr), Tensor.wrap(dw), Tensor.wrap(db)


# ----------------------------------------------------------------------
# Pooling
# ----------------------------------------------------------------------

def pool_extent(size: int) -> int:
    """Floor-mode output extent of the 2x2 / stride-2 pool."""
    return (size - POOL_WINDOW) // POOL_STRIDE + 1


def maxpool2d_with_argmax(x: Tensor) -> tuple[Tensor, np.ndarray]:
    """
    2x2 max pool, stride 2, floor mode. Returns the pooled tensor and the
    winning position (0..3, row-major within the window, first max wins).
    """
    Guard.rank(x.shape, 4, "input")
    n, h, w, c = x.shape
    if h < POOL_WINDOW or w < POOL_WINDOW:
        raise ShapeError(f"maxpool2d needs H and W >= {POOL_WINDOW}, got {h}x{w}")
    ho, wo = pool_extent(h), pool_extent(w)
    windows = (
        x.data[:, : 2 * ho, : 2 * wo, :]
        .reshape(n, ho, 2, wo, 2, c)
        .transpose(0, 1, 3, 5, 2, 4)
        .reshape(n, ho, wo, c, 4)
    )
    argmax = windows.argmax(axis=-1).astype(np.int8)
    pooled = np.take_along_axis(windows, argmax[..., None].astype(np.intp), axis=-1)[..., 0]
    return Tensor.wrap(pooled), argmax


def maxpool2d(x: Tensor) -> Tensor:
    return maxpool2d_with_argmax(x)[0]


def maxpool2d_backward(input_shape: Sequence[int], argmax: np.ndarray, grad_out: Tensor) -> Tensor:
    """Route each output gradient to the input position that won its window."""
    n, h, w, c = input_shape
    ho, wo = argmax.shape[1], argmax.shape[2]
    Guard.same_shape(grad_out.shape, (n, ho, wo, c), "maxpool2d grad_out")
    onehot = argmax[..., None] == np.arange(4, dtype=np.int8)
    routed = np.where(onehot, grad_out.data[..., None], 0).astype(grad_out.data.dtype)
    block = routed.reshape(n, ho, wo, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(n, 2 * ho, 2 * wo, c)
    dx = np.zeros((n, h, w, c), dtype=grad_out.data.dtype)
    dx[:, : 2 * ho, : 2 * wo, :] = block
    return Tensor.wrap(dx)


# ----------------------------------------------------------------------
# Channel concatenation
# ----------------------------------------------------------------------

def concat_channels(inputs: Sequence[Tensor]) -> Tensor:
    """Stack NHWC tensors along C in argument order."""
    if len(inputs) < 2:
        raise ShapeError(f"concat_channels needs at least 2 inputs, got {len(inputs)}")
    for t in inputs:
        Guard.rank(t.shape, 4, "concat input")
    lead = inputs[0].shape[:3]
    for t in inputs[1:]:
        if t.shape[:3] != lead:
            raise ShapeError(f"concat batch/spatial mismatch: {lead} vs {t.shape[:3]}")
    _same_precision(*inputs)
    return Tensor.wrap(np.concatenate([t.data for t in inputs], axis=3))


def slice_channels(x: Tensor, start: int, stop: int) -> Tensor:
    Guard.rank(x.shape, 4, "input")
    if not 0 <= start < stop <= x.shape[3]:
        raise ShapeError(f"channel slice [{start}:{stop}) out of range for C={x.shape[3]}")
    return Tensor.wrap(x.data[..., start:stop].copy())


def split_channels(x: Tensor, sizes: Sequence[int]) -> list[Tensor]:
    """Inverse of concat_channels for the given per-input channel counts."""
    if sum(sizes) != x.shape[3]:
        raise ShapeError(f"split sizes {list(sizes)} do not sum to C={x.shape[3]}")
    out: list[Tensor] = []
    start = 0
    for s in sizes:
        out.append(slice_channels(x, start, start + s))
        start += s
    return out


# ----------------------------------------------------------------------
# Dense algebra and elementwise ops
# ----------------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    Guard.rank(a.shape, 2, "a")
    Guard.rank(b.shape, 2, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner mismatch: {a.shape} @ {b.shape}")
    _same_precision(a, b)
    return _result(a.data @ b.data, "matmul")


def add(a: Tensor, b: Tensor | float) -> Tensor:
    if isinstance(b, Tensor):
        Guard.same_shape(a.shape, b.shape, "add")
        _same_precision(a, b)
        return _result(a.data + b.data, "add")
    return _result(a.data + a.data.dtype.type(b), "add")


def mul(a: Tensor, b: Tensor | float) -> Tensor:
    if isinstance(b, Tensor):
        Guard.same_shape(a.shape, b.shape, "mul")
        _same_precision(a, b)
        return _result(a.data * b.data, "mul")
    return scale(a, b)


def scale(a: Tensor, s: float) -> Tensor:
    return _result(a.data * a.data.dtype.type(s), "scale")


def bias_add(x: Tensor, bias: Tensor) -> Tensor:
    """Add a per-feature bias along the last axis."""
    if bias.rank != 1 or bias.shape[0] != x.shape[-1]:
        raise ShapeError(f"bias shape {bias.shape} does not match last axis of {x.shape}")
    _same_precision(x, bias)
    return _result(x.data + bias.data, "bias_add")


def relu(x: Tensor) -> Tensor:
    return Tensor.wrap(np.maximum(x.data, 0))


def relu_backward(x: Tensor, grad_out: Tensor) -> Tensor:
    """Subgradient with g(0) = 0."""
    return Tensor.wrap(np.where(x.data > 0, grad_out.data, 0).astype(grad_out.data.dtype))


def sigmoid(x: Tensor) -> Tensor:
    return Tensor.wrap(expit(x.data))


def flatten(x: Tensor) -> Tensor:
    """N,... -> N,prod(...) in row-major order."""
    n = x.shape[0]
    return Tensor.wrap(x.data.reshape(n, -1).copy())
