from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence, Type

import numpy as np

from lrnet_core.framework.errors import ConfigError, NumericError, ShapeError


@dataclass(frozen=True)
class Guard:
    """Static guard methods for parameter validation.

    Every check takes the error type to raise (ShapeError, ConfigError, ...).
    """

    @staticmethod
    def positive(value: int | float, name: str = "value", error: Type[Exception] = ConfigError) -> Any:
        if not value > 0:
            raise error(f"'{name}' must be positive, got {value}")
        return value

    @staticmethod
    def odd_kernel(k: int, name: str = "kernel") -> int:
        if k < 1 or k % 2 == 0:
            raise ConfigError(f"'{name}' must be an odd integer >= 1, got {k}")
        return k

    @staticmethod
    def rank(shape: Sequence[int], expected: int, name: str = "tensor") -> None:
        if len(shape) != expected:
            raise ShapeError(f"'{name}' must have rank {expected}, got shape {tuple(shape)}")

    @staticmethod
    def same_shape(a: Sequence[int], b: Sequence[int], what: str = "operands") -> None:
        if tuple(a) != tuple(b):
            raise ShapeError(f"{what} shape mismatch: {tuple(a)} vs {tuple(b)}")

    @staticmethod
    def finite(arr: np.ndarray, what: str = "value") -> np.ndarray:
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"non-finite {what}")
        return arr

    @staticmethod
    def check(condition: bool, message: str = "Condition failed", error: Type[Exception] = ConfigError) -> None:
        """General-purpose guard for arbitrary conditions."""
        if not condition:
            raise error(message)
