from .enums import Precision
from .kernels import (
    add,
    bias_add,
    concat_channels,
    conv2d,
    conv2d_backward,
    flatten,
    matmul,
    maxpool2d,
    maxpool2d_backward,
    maxpool2d_with_argmax,
    mul,
    pool_extent,
    relu,
    relu_backward,
    scale,
    sigmoid,
    slice_channels,
    split_channels,
)
from .models import Shape4, Tensor

__all__ = [
    "Precision",
    "Shape4",
    "Tensor",
    "add",
    "bias_add",
    "concat_channels",
    "conv2d",
    "conv2d_backward",
    "flatten",
    "matmul",
    "maxpool2d",
    "maxpool2d_backward",
    "maxpool2d_with_argmax",
    "mul",
    "pool_extent",
    "relu",
    "relu_backward",
    "scale",
    "sigmoid",
    "slice_channels",
    "split_channels",
]
