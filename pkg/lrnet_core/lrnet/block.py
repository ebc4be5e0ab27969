"""
Multi-Kernel block.

    A  = ReLU(conv3x3(x, f3))          B = ReLU(conv5x5(x, f5))       C = ReLU(conv7x7(x, f7))
    T  = concat(A, B, C)                                  junction of all three kernels
    R  = ReLU(conv5x5(concat(B, C), f5))                  big-kernel summary (right side)
    L1 = ReLU(conv3x3(concat(A, B), f3))                  3-5 link, local detail (left side)
    L2 = ReLU(conv3x3(L1, f3))                            repeated 3x3 extraction
    Y  = ReLU(conv1x1(concat(T, R, L2), f_out) + P(x))    fusion plus residual
    out = maxpool2x2(Y)

There is no concat of A with C alone. P is the identity when the
input already has f_out channels, otherwise a 1x1 projection without activation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lrnet_core.autograd import Graph, Node, Parameter
from lrnet_core.framework.errors import ShapeError
from lrnet_core.lrnet.specs import MIN_BLOCK_INPUT, BlockSpec
from lrnet_core.nn import LayerKind, LayerSpec, conv, init_parameters, relu, residual_add
from lrnet_core.tensor import Precision


@dataclass(frozen=True)
class BlockTrace:
    """Named nodes of one recorded block, for topology checks."""

    a: Node
    b: Node
    c: Node
    junction: Node
    right: Node
    left1: Node
    left2: Node
    fused: Node
    out: Node


class MKBlock:
    """Parameters of one MK-block; calling it records the block into a graph."""

    def __init__(
        self,
        name: str,
        in_channels: int,
        spec: BlockSpec,
        rng: np.random.Generator,
        precision: Precision = Precision.FLOAT32,
    ) -> None:
        self.name = name
        self.in_channels = in_channels
        self.spec = spec
        f3, f5, f7 = spec.f3, spec.f5, spec.f7

        self.layers: dict[str, LayerSpec] = {
            "conv3x3_a": self._conv("conv3x3_a", 3, in_channels, f3),
            "conv5x5_b": self._conv("conv5x5_b", 5, in_channels, f5),
            "conv7x7_c": self._conv("conv7x7_c", 7, in_channels, f7),
            "conv5x5_r": self._conv("conv5x5_r", 5, f5 + f7, f5),
            "conv3x3_l1": self._conv("conv3x3_l1", 3, f3 + f5, f3),
            "conv3x3_l2": self._conv("conv3x3_l2", 3, f3, f3),
            "fusion": self._conv("fusion", 1, spec.fusion_in_channels, spec.f_out),
        }
        if in_channels != spec.f_out:
            self.layers["projection"] = self._conv("projection", 1, in_channels, spec.f_out)

        self.params: dict[str, tuple[Parameter, Parameter]] = {}
        for key, layer in self.layers.items():
            weight, bias = init_parameters(layer, rng, precision)
            self.params[key] = (weight, bias)

    def _conv(self, key: str, k: int, cin: int, cout: int) -> LayerSpec:
        return LayerSpec(LayerKind.CONV2D, f"{self.name}.{key}", in_size=cin, out_size=cout, kernel=k)

    @property
    def out_channels(self) -> int:
        return self.spec.f_out

    def parameters(self) -> list[Parameter]:
        return [p for pair in self.params.values() for p in pair]

    def parameter_count(self) -> int:
        return sum(layer.parameter_count for layer in self.layers.values())

    def _conv_relu(self, graph: Graph, x: Node, key: str) -> Node:
        w, b = self.params[key]
        label = self.layers[key].name
        return relu(graph, conv(graph, x, w, b, label=label), label=label)

    def trace(self, graph: Graph, x: Node) -> BlockTrace:
        n, h, w, c = x.shape
        if h < MIN_BLOCK_INPUT or w < MIN_BLOCK_INPUT:
            raise ShapeError(f"{self.name}: spatial size {h}x{w} is below {MIN_BLOCK_INPUT}x{MIN_BLOCK_INPUT}")
        if c != self.in_channels:
            raise ShapeError(f"{self.name}: expects {self.in_channels} channels, got {c}")

        a = self._conv_relu(graph, x, "conv3x3_a")
        b = self._conv_relu(graph, x, "conv5x5_b")
        cc = self._conv_relu(graph, x, "conv7x7_c")
        junction = graph.record("concat", [a, b, cc], label=f"{self.name}.concat_abc")

        right = self._conv_relu(graph, graph.record("concat", [b, cc], label=f"{self.name}.concat_bc"), "conv5x5_r")
        left1 = self._conv_relu(graph, graph.record("concat", [a, b], label=f"{self.name}.concat_ab"), "conv3x3_l1")
        left2 = self._conv_relu(graph, left1, "conv3x3_l2")

        merged = graph.record("concat", [junction, right, left2], label=f"{self.name}.concat_fusion")
        fw, fb = self.params["fusion"]
        fused = conv(graph, merged, fw, fb, label=f"{self.name}.fusion")
        summed = residual_add(graph, fused, x, self.params.get("projection"), label=f"{self.name}.residual")
        y = relu(graph, summed, label=f"{self.name}.residual")
        out = graph.record("maxpool2d", [y], label=f"{self.name}.pool")
        return BlockTrace(a, b, cc, junction, right, left1, left2, y, out)

    def __call__(self, graph: Graph, x: Node) -> Node:
        return self.trace(graph, x).out


def build_block(
    graph: Graph,
    x: Node,
    spec: BlockSpec,
    rng: np.random.Generator,
    *,
    name: str = "block",
) -> tuple[Node, MKBlock]:
    """Create a block for x's channel count, record it and return its output with the block."""
    block = MKBlock(name, x.shape[3], spec, rng, x.value.precision)
    return block(graph, x), block
