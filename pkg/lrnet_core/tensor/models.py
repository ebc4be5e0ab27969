from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable

import numpy as np
import numpy.typing as npt

from lrnet_core.framework.errors import ConfigError, ShapeError
from lrnet_core.tensor.enums import Precision

FloatArray = npt.NDArray[np.floating]


@dataclass(frozen=True, slots=True, eq=False)
class Tensor:
    """
    Dense rank-N float tensor (row-major).

    `data` is a read-only numpy array whose shape is the tensor's shape; the
    flat element view is `flat`. Values never change after construction, so a
    Tensor can be shared between threads for reading.
    """

    data: FloatArray

    def __post_init__(self) -> None:
        arr = self.data
        if not isinstance(arr, np.ndarray):
            raise ConfigError("Tensor data must be a numpy array")
        if arr.dtype not in (np.float32, np.float64):
            raise ConfigError(f"unsupported dtype {arr.dtype}; use float32 or float64")
        if arr.ndim == 0 or any(d < 1 for d in arr.shape):
            raise ShapeError(f"extents must be positive, got {arr.shape}")
        if arr.flags.writeable:
            arr.flags.writeable = False

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_array(cls, values, precision: Precision = Precision.FLOAT32) -> "Tensor":
        """Copy any array-like into a new tensor of the given precision."""
        arr = np.array(values, dtype=precision.dtype, copy=True, order="C")
        if arr.ndim == 0:
            arr = arr.reshape(1)
        return cls(arr)

    @classmethod
    def wrap(cls, arr: np.ndarray) -> "Tensor":
        """Take ownership of a freshly computed array without copying."""
        return cls(np.ascontiguousarray(arr))

    @classmethod
    def zeros(cls, shape: Iterable[int], precision: Precision = Precision.FLOAT32) -> "Tensor":
        return cls(np.zeros(tuple(shape), dtype=precision.dtype))

    @classmethod
    def ones(cls, shape: Iterable[int], precision: Precision = Precision.FLOAT32) -> "Tensor":
        return cls(np.ones(tuple(shape), dtype=precision.dtype))

    @classmethod
    def full(cls, shape: Iterable[int], value: float, precision: Precision = Precision.FLOAT32) -> "Tensor":
        return cls(np.full(tuple(shape), value, dtype=precision.dtype))

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def size(self) -> int:
        return prod(self.data.shape)

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def precision(self) -> Precision:
        return Precision.of(self.data)

    @property
    def flat(self) -> FloatArray:
        return self.data.reshape(-1)

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> FloatArray:
        """Writable copy of the values."""
        return self.data.copy()

    def astype(self, precision: Precision) -> "Tensor":
        if precision is self.precision:
            return self
        return Tensor(self.data.astype(precision.dtype))

    def reshape(self, shape: Iterable[int]) -> "Tensor":
        shape = tuple(shape)
        if prod(shape) != self.size:
            raise ShapeError(f"cannot reshape {self.shape} to {shape}")
        return Tensor(self.data.reshape(shape).copy())

    def bit_equal(self, other: "Tensor") -> bool:
        return (
            self.shape == other.shape
            and self.data.dtype == other.data.dtype
            and self.data.tobytes() == other.data.tobytes()
        )

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, precision={self.precision.value})"


@dataclass(frozen=True, slots=True)
class Shape4:
    """Image-tensor extents in N,H,W,C order."""

    n: int
    h: int
    w: int
    c: int

    def __post_init__(self) -> None:
        if min(self.n, self.h, self.w, self.c) < 1:
            raise ShapeError(f"all extents must be >= 1, got {self.as_tuple()}")

    @classmethod
    def of(cls, t: Tensor) -> "Shape4":
        if t.rank != 4:
            raise ShapeError(f"expected an N,H,W,C tensor, got shape {t.shape}")
        return cls(*t.shape)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.h, self.w, self.c)
