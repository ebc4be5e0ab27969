from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from lrnet_core.data.dataset import Dataset
from lrnet_core.framework.guard import Guard
from lrnet_core.tensor import Tensor

DEFAULT_BATCH_SIZE = 256


@dataclass(frozen=True)
class BatchIterator:
    """Shuffled mini-batches; the order depends only on (seed, epoch)."""

    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = 0
    drop_last: bool = False

    def __post_init__(self) -> None:
        Guard.positive(self.batch_size, "batch_size")

    def permutation(self, n: int, epoch: int) -> np.ndarray:
        return np.random.default_rng([self.seed, epoch]).permutation(n)

    def num_batches(self, n: int) -> int:
        full, rest = divmod(n, self.batch_size)
        return full if (self.drop_last or rest == 0) else full + 1

    def index_batches(self, n: int, epoch: int) -> list[np.ndarray]:
        order = self.permutation(n, epoch)
        return [order[i * self.batch_size : (i + 1) * self.batch_size] for i in range(self.num_batches(n))]


def batches(ds: Dataset, it: BatchIterator, epoch: int) -> Iterator[tuple[Tensor, np.ndarray]]:
    """Yield (images, labels) per batch; the last batch is partial unless drop_last."""
    for idx in it.index_batches(len(ds), epoch):
        yield Tensor.wrap(ds.images[idx]), ds.labels[idx]


def sequential_batches(ds: Dataset, batch_size: int = DEFAULT_BATCH_SIZE) -> Iterator[tuple[Tensor, np.ndarray]]:
    """Unshuffled batches in dataset order, for evaluation."""
    Guard.positive(batch_size, "batch_size")
    for start in range(0, len(ds), batch_size):
        yield Tensor.wrap(ds.images[start : start + batch_size]), ds.labels[start : start + batch_size]
