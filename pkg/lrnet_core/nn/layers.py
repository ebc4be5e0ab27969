from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lrnet_core.autograd import Graph, Node, Parameter
from lrnet_core.framework.errors import ConfigError, ShapeError
from lrnet_core.nn.enums import LayerKind
from lrnet_core.tensor import Precision, Tensor

CONV_KERNELS = (1, 3, 5, 7)


@dataclass(frozen=True, slots=True)
class LayerSpec:
    """
    One layer of a model.

    For conv2d `in_size`/`out_size` are channel counts, for dense they are
    feature counts; other kinds carry no parameters and ignore them.
    Activations are always separate layers.
    """

    kind: LayerKind
    name: str
    in_size: int = 0
    out_size: int = 0
    kernel: int = 0

    def __post_init__(self) -> None:
        if self.kind is LayerKind.CONV2D and self.kernel not in CONV_KERNELS:
            raise ConfigError(f"{self.name}: conv kernel must be one of {CONV_KERNELS}, got {self.kernel}")
        if self.kind.has_parameters and (self.in_size < 1 or self.out_size < 1):
            raise ConfigError(f"{self.name}: in/out extents must be >= 1")

    @property
    def fan_in(self) -> int:
        if self.kind is LayerKind.CONV2D:
            return self.kernel * self.kernel * self.in_size
        return self.in_size

    @property
    def weight_shape(self) -> tuple[int, ...]:
        if self.kind is LayerKind.CONV2D:
            return (self.kernel, self.kernel, self.in_size, self.out_size)
        return (self.in_size, self.out_size)

    @property
    def parameter_count(self) -> int:
        if not self.kind.has_parameters:
            return 0
        return self.fan_in * self.out_size + self.out_size

    @property
    def weight_name(self) -> str:
        return f"{self.name}.kernel" if self.kind is LayerKind.CONV2D else f"{self.name}.weight"

    @property
    def bias_name(self) -> str:
        return f"{self.name}.bias"


def init_parameters(
    spec: LayerSpec,
    rng: np.random.Generator,
    precision: Precision = Precision.FLOAT32,
) -> list[Parameter]:
    """He-normal weights (std = sqrt(2 / fan_in)) and zero biases; determined by the rng state."""
    if not spec.kind.has_parameters:
        return []
    std = math.sqrt(2.0 / spec.fan_in)
    w = rng.standard_normal(spec.weight_shape) * std
    return [
        Parameter(spec.weight_name, Tensor.from_array(w, precision)),
        Parameter(spec.bias_name, Tensor.zeros((spec.out_size,), precision)),
    ]


# ----------------------------------------------------------------------
# Graph-building helpers
# ----------------------------------------------------------------------

def conv(graph: Graph, x: Node, weight: Parameter, bias: Parameter, label: str = "") -> Node:
    return graph.record("conv2d", [x, graph.parameter(weight), graph.parameter(bias)], label=label)


def dense(graph: Graph, x: Node, weight: Parameter, bias: Parameter, label: str = "") -> Node:
    y = graph.record("matmul", [x, graph.parameter(weight)], label=label)
    return graph.record("bias_add", [y, graph.parameter(bias)], label=label)


def relu(graph: Graph, x: Node, label: str = "") -> Node:
    return graph.record("relu", [x], label=label)


def residual_add(
    graph: Graph,
    branch: Node,
    skip_source: Node,
    projection: tuple[Parameter, Parameter] | None = None,
    label: str = "",
) -> Node:
    """
    branch + skip, where skip is the source itself or its 1x1 projection (no activation).
    A projection is required when the channel counts differ.
    """
    bs, ss = branch.shape, skip_source.shape
    if len(bs) != 4 or len(ss) != 4:
        raise ShapeError(f"residual_add expects NHWC tensors, got {bs} and {ss}")
    if bs[:3] != ss[:3]:
        raise ShapeError(f"residual_add batch/spatial mismatch: {bs[:3]} vs {ss[:3]}")
    if projection is None:
        if bs[3] != ss[3]:
            raise ShapeError(f"residual_add channel mismatch {ss[3]} -> {bs[3]} needs a 1x1 projection")
        skip = skip_source
    else:
        kernel, bias = projection
        if kernel.shape[:2] != (1, 1):
            raise ShapeError(f"projection must be a 1x1 conv, got {kernel.shape[:2]}")
        skip = conv(graph, skip_source, kernel, bias, label=kernel.name.rsplit(".", 1)[0])
    return graph.record("add", [branch, skip], label=label)
