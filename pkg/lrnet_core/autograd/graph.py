from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from lrnet_core.autograd.ops import get_op
from lrnet_core.autograd.parameter import Parameter
from lrnet_core.framework.errors import GraphError, ShapeError
from lrnet_core.tensor import Tensor

log = logging.getLogger(__name__)

_graph_ids = itertools.count()


@dataclass(eq=False)
class Node:
    """One recorded value. `id` is the node's position in its graph's topological order."""

    id: int
    op: str
    inputs: tuple[int, ...]
    value: Tensor
    graph: "Graph" = field(repr=False)
    label: str = ""
    param: Parameter | None = field(default=None, repr=False)
    ctx: Any = field(default=None, repr=False)
    _grad: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def grad(self) -> Tensor:
        """Gradient from the latest backward pass; zeros when the node was off the loss path."""
        if self._grad is None:
            return Tensor.zeros(self.value.shape, self.value.precision)
        return Tensor.from_array(self._grad, self.value.precision)


class Graph:
    """
    Append-only record of tensor operations for reverse-mode differentiation.

    A graph is built fresh for every forward pass and confined to one thread.
    With record=False only forward values are computed (evaluation); such a
    graph keeps no nodes and cannot run backward.
    """

    def __init__(self, *, record: bool = True) -> None:
        self.id = next(_graph_ids)
        self.recording = record
        self._nodes: list[Node] = []
        self._param_nodes: dict[str, Node] = {}
        self._next_id = 0

    # ------------------------------------------------------------------
    # Leaves
    # ------------------------------------------------------------------

    @property
    def nodes(self) -> Sequence[Node]:
        return tuple(self._nodes)

    def input(self, value: Tensor) -> Node:
        return self._append("input", (), value)

    def constant(self, value: Tensor) -> Node:
        """Non-trainable leaf; backward gives it a gradient but nothing is accumulated."""
        return self._append("input", (), value, label="constant")

    def parameter(self, param: Parameter) -> Node:
        """Bind a parameter; binding the same name twice returns the same node."""
        node = self._param_nodes.get(param.name)
        if node is None:
            node = self._append("param", (), param.value, param=param, label=param.name)
            self._param_nodes[param.name] = node
        return node

    # ------------------------------------------------------------------
    # Recording
    # ------------------------------------------------------------------

    def record(self, op: str, inputs: Sequence[Node], *, label: str = "", **attrs: Any) -> Node:
        """Compute op on the inputs' values and append the result; `label` names the layer it belongs to."""
        opdef = get_op(op)
        for x in inputs:
            if x.graph is not self:
                raise GraphError(f"input node {x.id} ({x.op}) belongs to graph {x.graph.id}, not {self.id}")
        if opdef.arity is not None and len(inputs) != opdef.arity:
            raise GraphError(f"op {op!r} takes {opdef.arity} inputs, got {len(inputs)}")
        value, ctx = opdef.forward([x.value for x in inputs], attrs)
        return self._append(op, tuple(x.id for x in inputs), value, ctx=ctx, label=label)

    def _append(
        self, op: str, inputs: tuple[int, ...], value: Tensor, *, param=None, ctx=None, label: str = ""
    ) -> Node:
        node = Node(
            id=self._next_id,
            op=op,
            inputs=inputs,
            value=value,
            graph=self,
            label=label,
            param=param,
            ctx=ctx if self.recording else None,
        )
        self._next_id += 1
        if self.recording:
            self._nodes.append(node)
        return node

    # ------------------------------------------------------------------
    # Differentiation
    # ------------------------------------------------------------------

    def backward(self, loss: Node) -> dict[str, Tensor]:
        """
        Gradients of a scalar loss w.r.t. every trainable parameter bound in this graph.

        Gradients also accumulate into each Parameter. Fan-out contributions are
        summed in reverse topological order, so repeated calls give identical results.
        """
        if not self.recording:
            raise GraphError("graph was built with record=False; backward is unavailable")
        if loss.graph is not self:
            raise GraphError("loss node belongs to a different graph")
        if loss.value.size != 1:
            raise ShapeError(f"loss must be scalar, got shape {loss.shape}")

        for node in self._nodes:
            node._grad = None

        grads: dict[int, np.ndarray] = {loss.id: np.ones(loss.shape, dtype=loss.value.data.dtype)}
        for node in reversed(self._nodes[: loss.id + 1]):
            g = grads.get(node.id)
            if g is None:
                continue
            node._grad = g
            if not node.inputs:
                continue
            opdef = get_op(node.op)
            ins = [self._nodes[i] for i in node.inputs]
            in_grads = opdef.backward(node.ctx, [x.value for x in ins], node.value, Tensor.wrap(g.copy()))
            for x, gx in zip(ins, in_grads):
                if gx is None:
                    continue
                prev = grads.get(x.id)
                grads[x.id] = gx.data.copy() if prev is None else prev + gx.data

        out: dict[str, Tensor] = {}
        for name, node in self._param_nodes.items():
            if node.param is None or not node.param.trainable:
                continue
            g = node.grad
            node.param.accumulate(g)
            out[name] = g
        log.debug("backward over %d nodes, %d parameters", loss.id + 1, len(out))
        return out
