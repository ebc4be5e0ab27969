from __future__ import annotations

from dataclasses import dataclass

from lrnet_core.autograd import Graph
from lrnet_core.framework.serialization.serde import PrimitiveSerde
from lrnet_core.lrnet.model import LRNet, count_parameters
from lrnet_core.tensor import Tensor

PUBLISHED_PARAMETER_COUNT = 1_028_234


@dataclass(frozen=True)
class LayerRow(PrimitiveSerde):
    index: int
    layer: str
    op: str
    output_shape: tuple[int, ...]
    parameters: int


@dataclass(frozen=True)
class TopologyReport(PrimitiveSerde):
    rows: tuple[LayerRow, ...]
    total_parameters: int
    published_parameters: int = PUBLISHED_PARAMETER_COUNT

    @property
    def delta_to_published(self) -> int:
        return self.total_parameters - self.published_parameters

    def count(self, op: str) -> int:
        return sum(1 for r in self.rows if r.op == op)

    def blocks(self) -> list[str]:
        return sorted({r.layer.split(".")[0] for r in self.rows if r.layer.startswith("block")})

    def to_primitive(self):
        prim = super().to_primitive()
        prim["delta_to_published"] = self.delta_to_published
        return prim

    def render(self) -> str:
        lines = [f"{'#':>3}  {'layer':<24} {'op':<12} {'output':<18} {'params':>10}"]
        for r in self.rows:
            shape = "x".join(str(d) for d in r.output_shape)
            lines.append(f"{r.index:>3}  {r.layer:<24} {r.op:<12} {shape:<18} {r.parameters:>10,}")
        lines.append(f"total_parameters: {self.total_parameters:,}")
        lines.append(f"published_parameters: {self.published_parameters:,}")
        lines.append(f"delta_to_published: {self.delta_to_published:+,}")
        return "\n".join(lines)


def describe(model: LRNet) -> TopologyReport:
    """
    Record one probe image through the model and list every computing node in
    topological order with its output shape and the parameters it consumes.
    """
    spec = model.spec
    probe = Tensor.zeros((1, spec.input_size, spec.input_size, spec.input_channels), model.precision)
    graph = Graph()
    model.outputs(graph, graph.input(probe))

    nodes = graph.nodes
    rows: list[LayerRow] = []
    for node in nodes:
        if node.op in ("input", "param"):
            continue
        n_params = sum(
            nodes[i].value.size for i in node.inputs if nodes[i].param is not None and nodes[i].param.trainable
        )
        rows.append(LayerRow(len(rows), node.label, node.op, node.shape, n_params))
    return TopologyReport(rows=tuple(rows), total_parameters=count_parameters(model))


def closed_form_count(model: LRNet) -> int:
    """Parameter total from the layer specs' closed forms (conv k*k*Cin*Cout + Cout, dense in*out + out)."""
    return sum(layer.parameter_count for layer in model.layers)
