from enum import Enum

import numpy as np


class Precision(str, Enum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)

    @classmethod
    def of(cls, arr: np.ndarray) -> "Precision":
        return cls(np.dtype(arr.dtype).name)
