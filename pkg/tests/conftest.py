from __future__ import annotations

import gzip
import os
from pathlib import Path

import numpy as np
import pytest

from lrnet_core.data import Dataset, DatasetName, IdxFile, Split, encode_idx, load_manifest
from lrnet_core.lrnet import BlockSpec, ModelSpec

SMALL_BLOCK = BlockSpec(f3=6, f5=4, f7=2, f_out=8)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("LRNET_CACHE"):
        return
    skip = pytest.mark.skip(reason="set LRNET_CACHE to a directory holding fetched datasets")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec() -> ModelSpec:
    """Full three-block topology at 35x35 with narrow blocks and head."""
    return ModelSpec(blocks=(SMALL_BLOCK,) * 3, dense_widths=(16,))


def write_idx_gz(path: Path, arr: np.ndarray) -> bytes:
    """Write arr as a gzip IDX file; returns the compressed bytes."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = gzip.compress(encode_idx(IdxFile.from_array(arr)), mtime=0)
    path.write_bytes(data)
    return data


def synthetic_images(rng: np.random.Generator, labels: np.ndarray) -> np.ndarray:
    """28x28 uint8 digits-like noise with a class-dependent bright bar."""
    images = rng.integers(0, 60, size=(labels.size, 28, 28), dtype=np.uint8)
    for i, c in enumerate(labels):
        images[i, 2 * c + 4 : 2 * c + 7, 4:24] = 255
    return images


@pytest.fixture
def synthetic_cache(tmp_path: Path, rng: np.random.Generator) -> Path:
    """A cache directory holding a small mnist-shaped dataset (20 train / 5 test per class)."""
    cache = tmp_path / "cache"
    entries = {e.role.value: e for e in load_manifest()[DatasetName.MNIST]}
    for split, per_class in (("train", 20), ("test", 5)):
        labels = np.repeat(np.arange(10, dtype=np.uint8), per_class)
        rng.shuffle(labels)
        write_idx_gz(cache / "mnist" / entries[f"{split}_images"].filename, synthetic_images(rng, labels))
        write_idx_gz(cache / "mnist" / entries[f"{split}_labels"].filename, labels)
    return cache


def make_dataset(rng: np.random.Generator, n: int, size: int = 35, split: Split = Split.TRAIN) -> Dataset:
    labels = np.arange(n, dtype=np.int64) % 10
    images = rng.random((n, size, size, 1)).astype(np.float32)
    return Dataset(DatasetName.MNIST, split, images, labels)
