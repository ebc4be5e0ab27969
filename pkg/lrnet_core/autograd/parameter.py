from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from lrnet_core.framework.errors import ShapeError
from lrnet_core.tensor import Tensor


@dataclass(eq=False)
class Parameter:
    """
    Named trainable tensor owned by a model.

    The value is replaced (never mutated) by the optimizer between graphs.
    The accumulated gradient is allocated lazily; an absent gradient reads as zeros.
    """

    name: str
    value: Tensor
    trainable: bool = True
    _grad: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def size(self) -> int:
        return self.value.size

    @property
    def grad(self) -> Tensor:
        if self._grad is None:
            return Tensor.zeros(self.value.shape, self.value.precision)
        return Tensor.from_array(self._grad, self.value.precision)

    def accumulate(self, g: Tensor) -> None:
        if g.shape != self.value.shape:
            raise ShapeError(f"gradient shape {g.shape} does not match {self.name} {self.value.shape}")
        if self._grad is None:
            self._grad = g.numpy()
        else:
            self._grad += g.data

    def assign(self, value: Tensor) -> None:
        if value.shape != self.value.shape:
            raise ShapeError(f"cannot assign shape {value.shape} to {self.name} {self.value.shape}")
        self.value = value


def zero_grads(parameters: Iterable[Parameter]) -> None:
    """Drop accumulated gradients; they read back as exact zeros."""
    for p in parameters:
        p._grad = None
