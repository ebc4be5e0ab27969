"""Central finite differences against Graph.backward, in 64-bit."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from lrnet_core.autograd import Graph, Node, Parameter
from lrnet_core.tensor import Precision, Tensor

EPS = 1e-4
TOLERANCE = 1e-4
GRAD_FLOOR = 1e-6


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    checked: int
    skipped: int

    @property
    def ok(self) -> bool:
        return self.checked > 0 and self.max_rel_error < TOLERANCE


def activation_signature(graph: Graph) -> bytes:
    """ReLU masks and pool winners; the function is smooth while this stays fixed."""
    h = hashlib.sha256()
    nodes = graph.nodes
    for node in nodes:
        if node.op == "relu":
            h.update(np.packbits(nodes[node.inputs[0]].value.data > 0).tobytes())
        elif node.op == "maxpool2d":
            h.update(node.ctx.tobytes())
    return h.digest()


def check_parameters(
    build: Callable[[Graph], Node],
    params: Sequence[Parameter],
    *,
    rng: np.random.Generator,
    max_entries: int | None = None,
    eps: float = EPS,
) -> GradCheckResult:
    """
    Compare analytic gradients of build(graph) w.r.t. `params` with central
    differences. Perturbations that flip a ReLU mask or a pool winner are
    skipped; at a kink the finite difference is not a derivative.
    """
    graph = Graph()
    loss = build(graph)
    analytic = {k: v.data.copy() for k, v in graph.backward(loss).items()}
    base = activation_signature(graph)

    def probe(p: Parameter, flat: np.ndarray) -> tuple[float, bytes]:
        p.assign(Tensor.wrap(flat.reshape(p.shape).copy()))
        g = Graph()
        value = build(g).value.item()
        return value, activation_signature(g)

    worst, checked, skipped = 0.0, 0, 0
    for p in params:
        original = p.value
        flat = original.numpy().reshape(-1)
        entries = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            entries = rng.choice(flat.size, size=max_entries, replace=False)
        for j in entries:
            x0 = flat[j]
            flat[j] = x0 + eps
            up, sig_up = probe(p, flat)
            flat[j] = x0 - eps
            down, sig_down = probe(p, flat)
            flat[j] = x0
            if sig_up != base or sig_down != base:
                skipped += 1
                continue
            numeric = (up - down) / (2 * eps)
            exact = analytic[p.name].reshape(-1)[j]
            worst = max(worst, abs(exact - numeric) / max(abs(exact), abs(numeric), GRAD_FLOOR))
            checked += 1
        p.assign(original)
    return GradCheckResult(worst, checked, skipped)


def check_inputs(
    build: Callable[[Graph, list[Node]], Node],
    inputs: Sequence[np.ndarray],
    *,
    rng: np.random.Generator,
    max_entries: int | None = None,
) -> GradCheckResult:
    """Same check with every input bound as a parameter named in0, in1, ..."""
    params = [Parameter(f"in{i}", Tensor.from_array(a, Precision.FLOAT64)) for i, a in enumerate(inputs)]
    return check_parameters(
        lambda g: build(g, [g.parameter(p) for p in params]), params, rng=rng, max_entries=max_entries
    )


def weighted_sum(graph: Graph, node: Node, weights: np.ndarray) -> Node:
    """Scalar sum(node * weights), so every output element gets a distinct gradient."""
    w = graph.constant(Tensor.from_array(weights, node.value.precision))
    return graph.record("sum", [graph.record("mul", [node, w])])
