from __future__ import annotations

import logging

import numpy as np

from lrnet_core.autograd import Graph, Node, Parameter
from lrnet_core.framework.errors import ConfigError, ShapeError
from lrnet_core.lrnet.block import MKBlock
from lrnet_core.lrnet.specs import ModelSpec
from lrnet_core.nn import LayerKind, LayerSpec, OutputActivation, dense, init_parameters, relu
from lrnet_core.tensor import Precision

log = logging.getLogger(__name__)


class LRNet:
    """
    Three stacked MK-blocks, flatten, dense head.

    forward() records the graph up to the logits; the output activation is
    applied by outputs() or fused into the training loss.
    """

    def __init__(self, spec: ModelSpec, rng: np.random.Generator, precision: Precision = Precision.FLOAT32) -> None:
        self.spec = spec
        self.precision = precision

        self.blocks: list[MKBlock] = []
        channels = spec.input_channels
        for i, block_spec in enumerate(spec.blocks, start=1):
            block = MKBlock(f"block{i}", channels, block_spec, rng, precision)
            self.blocks.append(block)
            channels = block.out_channels

        self.head: list[tuple[LayerSpec, Parameter, Parameter]] = []
        width = spec.flatten_width
        widths = list(spec.dense_widths) + [spec.num_classes]
        for i, out in enumerate(widths, start=1):
            name = "head.output" if i == len(widths) else f"head.dense{i}"
            layer = LayerSpec(LayerKind.DENSE, name, in_size=width, out_size=out)
            weight, bias = init_parameters(layer, rng, precision)
            self.head.append((layer, weight, bias))
            width = out

        self.parameters: dict[str, Parameter] = {}
        for p in self._all_parameters():
            if p.name in self.parameters:
                raise ConfigError(f"duplicate parameter name {p.name}")
            self.parameters[p.name] = p
        log.debug("built LR-Net with %d parameter tensors", len(self.parameters))

    def _all_parameters(self) -> list[Parameter]:
        out: list[Parameter] = []
        for block in self.blocks:
            out.extend(block.parameters())
        for _, weight, bias in self.head:
            out.extend((weight, bias))
        return out

    # ------------------------------------------------------------------
    # Graph recording
    # ------------------------------------------------------------------

    def forward(self, graph: Graph, x: Node) -> Node:
        """N,S,S,C images -> N,num_classes logits."""
        expected = (self.spec.input_size, self.spec.input_size, self.spec.input_channels)
        if x.shape[1:] != expected:
            raise ShapeError(f"model expects N,{','.join(map(str, expected))} input, got {x.shape}")
        h = x
        for block in self.blocks:
            h = block(graph, h)
        h = graph.record("flatten", [h], label="head.flatten")
        last = len(self.head) - 1
        for i, (layer, weight, bias) in enumerate(self.head):
            h = dense(graph, h, weight, bias, label=layer.name)
            if i < last:
                h = relu(graph, h, label=layer.name)
        return h

    def outputs(self, graph: Graph, x: Node) -> Node:
        """Forward plus the configured output activation."""
        logits = self.forward(graph, x)
        tag = "sigmoid" if self.spec.output_activation is OutputActivation.SIGMOID else "softmax"
        return graph.record(tag, [logits], label="head.activation")

    # ------------------------------------------------------------------
    # State
    # ------------------------------------------------------------------

    @property
    def layers(self) -> list[LayerSpec]:
        """Every parameterized layer, blocks first, in construction order."""
        out = [layer for block in self.blocks for layer in block.layers.values()]
        out.extend(layer for layer, _, _ in self.head)
        return out

    def trainable(self) -> list[Parameter]:
        return [p for p in self.parameters.values() if p.trainable]

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {name: p.value.data for name, p in self.parameters.items()}


def build_model(spec: ModelSpec, rng: np.random.Generator, precision: Precision = Precision.FLOAT32) -> LRNet:
    if not isinstance(spec, ModelSpec):
        raise ConfigError(f"expected a ModelSpec, got {type(spec).__name__}")
    return LRNet(spec, rng, precision)


def count_parameters(model: LRNet) -> int:
    """Sum of element counts over all trainable tensors."""
    return sum(p.size for p in model.trainable())
