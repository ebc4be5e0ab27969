from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from lrnet_core.autograd import Parameter
from lrnet_core.framework.errors import GraphError
from lrnet_core.framework.guard import Guard
from lrnet_core.nn.enums import OptimizerKind
from lrnet_core.tensor import Tensor



@dataclass
class OptimizerState:
    """
    SGD or Adam state. Moment arrays are keyed by parameter name and
    allocated on first use with the parameter's shape and precision.
    """

    kind: OptimizerKind = OptimizerKind.ADAM
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    v: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        Guard.positive(self.lr, "lr")
        Guard.check(0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0, "betas must lie in [0, 1)")
        Guard.check(self.t >= 0, "step counter must be >= 0")


def optimizer_step(
    state: OptimizerState,
    params: Iterable[Parameter],
    grads: Mapping[str, Tensor],
) -> OptimizerState:
    """One update of every trainable parameter; increments state.t exactly once."""
    trainable = [p for p in params if p.trainable]
    missing = [p.name for p in trainable if p.name not in grads]
    if missing:
        raise GraphError(f"missing gradient for: {', '.join(missing)}")

    state.t += 1
    if state.kind is OptimizerKind.SGD:
        for p in trainable:
            g = grads[p.name].data
            p.assign(Tensor.wrap(p.value.data - p.value.data.dtype.type(state.lr) * g))
        return state

    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for p in trainable:
        g = grads[p.name].data
        dtype = p.value.data.dtype
        m = state.m.get(p.name)
        v = state.v.get(p.name)
        if m is None or v is None:
            m = np.zeros(p.shape, dtype=dtype)
            v = np.zeros(p.shape, dtype=dtype)
        m = dtype.type(b1) * m + dtype.type(1.0 - b1) * g
        v = dtype.type(b2) * v + dtype.type(1.0 - b2) * (g * g)
        state.m[p.name] = m
        state.v[p.name] = v
        m_hat = m / dtype.type(bc1)
        v_hat = v / dtype.type(bc2)
        update = dtype.type(state.lr) * m_hat / (np.sqrt(v_hat) + dtype.type(state.eps))
        p.assign(Tensor.wrap(p.value.data - update))
    return state
