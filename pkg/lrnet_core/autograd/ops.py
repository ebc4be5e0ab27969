"""
Differentiable operations keyed by tag.

Each op supplies a forward over input values and a backward that maps the
output gradient to one gradient per input (None where an input is not
differentiable). Backward functions receive the context their forward saved.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from lrnet_core.framework.errors import ConfigError, DataError, ShapeError
from lrnet_core.framework.guard import Guard
from lrnet_core.tensor import Tensor, kernels

Grads = tuple[Optional[Tensor], ...]
Forward = Callable[[Sequence[Tensor], dict[str, Any]], tuple[Tensor, Any]]
Backward = Callable[[Any, Sequence[Tensor], Tensor, Tensor], Grads]


@dataclass(frozen=True)
class OpDef:
    tag: str
    forward: Forward
    backward: Backward
    arity: int | None = None  # None: variadic


_registry: dict[str, OpDef] = {}


def register(tag: str, *, arity: int | None) -> Callable[[type], type]:
    """Class decorator: the class provides static forward/backward."""

    def deco(cls: type) -> type:
        _registry[tag] = OpDef(tag=tag, forward=cls.forward, backward=cls.backward, arity=arity)
        return cls

    return deco


def get_op(tag: str) -> OpDef:
    try:
        return _registry[tag]
    except KeyError:
        raise ConfigError(f"unknown op tag {tag!r}") from None


def known_ops() -> list[str]:
    return sorted(_registry)


def _t(arr: np.ndarray) -> Tensor:
    return Tensor.wrap(arr)


# ----------------------------------------------------------------------
# Elementwise / dense
# ----------------------------------------------------------------------

@register("add", arity=2)
class _Add:
    @staticmethod
    def forward(xs, attrs):
        return kernels.add(xs[0], xs[1]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return g, g


@register("mul", arity=2)
class _Mul:
    @staticmethod
    def forward(xs, attrs):
        return kernels.mul(xs[0], xs[1]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return _t(g.data * xs[1].data), _t(g.data * xs[0].data)


@register("scale", arity=1)
class _Scale:
    @staticmethod
    def forward(xs, attrs):
        factor = float(attrs["factor"])
        return kernels.scale(xs[0], factor), factor

    @staticmethod
    def backward(ctx, xs, out, g):
        return (kernels.scale(g, ctx),)


@register("matmul", arity=2)
class _Matmul:
    @staticmethod
    def forward(xs, attrs):
        return kernels.matmul(xs[0], xs[1]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        a, b = xs[0].data, xs[1].data
        return _t(g.data @ b.T), _t(a.T @ g.data)


@register("bias_add", arity=2)
class _BiasAdd:
    @staticmethod
    def forward(xs, attrs):
        return kernels.bias_add(xs[0], xs[1]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        axes = tuple(range(g.rank - 1))
        return g, _t(g.data.sum(axis=axes))


@register("sum", arity=1)
class _Sum:
    @staticmethod
    def forward(xs, attrs):
        return _t(np.asarray([xs[0].data.sum()], dtype=xs[0].data.dtype)), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return (_t(np.full(xs[0].shape, g.item(), dtype=xs[0].data.dtype)),)


@register("flatten", arity=1)
class _Flatten:
    @staticmethod
    def forward(xs, attrs):
        return kernels.flatten(xs[0]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return (_t(g.data.reshape(xs[0].shape).copy()),)


# ----------------------------------------------------------------------
# Activations
# ----------------------------------------------------------------------

@register("relu", arity=1)
class _Relu:
    @staticmethod
    def forward(xs, attrs):
        return kernels.relu(xs[0]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return (kernels.relu_backward(xs[0], g),)


@register("sigmoid", arity=1)
class _Sigmoid:
    @staticmethod
    def forward(xs, attrs):
        return kernels.sigmoid(xs[0]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        s = out.data
        return (_t(g.data * s * (1 - s)),)


# ----------------------------------------------------------------------
# Convolution / pooling / concat
# ----------------------------------------------------------------------

@register("conv2d", arity=3)
class _Conv2d:
    @staticmethod
    def forward(xs, attrs):
        return kernels.conv2d(xs[0], xs[1], xs[2]), None

    @staticmethod
    def backward(ctx, xs, out, g):
        return kernels.conv2d_backward(xs[0], xs[1], g)


@register("maxpool2d", arity=1)
class _MaxPool2d:
    @staticmethod
    def forward(xs, attrs):
        return kernels.maxpool2d_with_argmax(xs[0])

    @staticmethod
    def backward(ctx, xs, out, g):
        return (kernels.maxpool2d_backward(xs[0].shape, ctx, g),)


@register("concat", arity=None)
class _Concat:
    @staticmethod
    def forward(xs, attrs):
        return kernels.concat_channels(xs), [x.shape[3] for x in xs]

    @staticmethod
    def backward(ctx, xs, out, g):
        return tuple(kernels.split_channels(g, ctx))


# ----------------------------------------------------------------------
# Fused losses
# ----------------------------------------------------------------------

def check_labels(labels: np.ndarray, logits: Tensor) -> np.ndarray:
    Guard.rank(logits.shape, 2, "logits")
    labels = np.asarray(labels)
    n, k = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels must have shape ({n},), got {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise DataError(f"labels must be integers, got {labels.dtype}")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise DataError(f"labels must lie in [0, {k}), got range [{labels.min()}, {labels.max()}]")
    return labels.astype(np.intp)


def _scalar(value: float, like: Tensor) -> Tensor:
    return _t(np.asarray([value], dtype=like.data.dtype))


@register("softmax_xent", arity=1)
class _SoftmaxCrossEntropy:
    """Mean over the batch of -log softmax(logits)[label], via log-sum-exp."""

    @staticmethod
    def forward(xs, attrs):
        z = xs[0].data
        labels = check_labels(attrs["labels"], xs[0])
        n = z.shape[0]
        lse = logsumexp(z, axis=1)
        loss = np.mean(lse - z[np.arange(n), labels])
        probs = np.exp(z - lse[:, None])
        return _scalar(loss, xs[0]), (probs, labels)

    @staticmethod
    def backward(ctx, xs, out, g):
        probs, labels = ctx
        n = probs.shape[0]
        d = probs.copy()
        d[np.arange(n), labels] -= 1
        d *= g.item() / n
        return (_t(d.astype(xs[0].data.dtype)),)


@register("sigmoid_bce", arity=1)
class _SigmoidBinaryCrossEntropy:
    """Mean over the batch of the per-class binary cross-entropy against one-hot labels."""

    @staticmethod
    def forward(xs, attrs):
        z = xs[0].data
        labels = check_labels(attrs["labels"], xs[0])
        n, k = z.shape
        y = np.zeros_like(z)
        y[np.arange(n), labels] = 1
        per = -(y * log_expit(z) + (1 - y) * log_expit(-z))
        loss = per.sum(axis=1).mean()
        return _scalar(loss, xs[0]), y

    @staticmethod
    def backward(ctx, xs, out, g):
        y = ctx
        z = xs[0].data
        d = (expit(z) - y) * (g.item() / z.shape[0])
        return (_t(d.astype(z.dtype)),)



@register("softmax", arity=1)
class _Softmax:
    @staticmethod
    def forward(xs, attrs):
        z = xs[0].data
        return _t(np.exp(z - logsumexp(z, axis=-1, keepdims=True))), None

    @staticmethod
    def backward(ctx, xs, out, g):
        s = out.data
        return (_t(s * (g.data - (g.data * s).sum(axis=-1, keepdims=True))),)
