from __future__ import annotations

import gzip
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from lrnet_core.data.enums import DatasetName, FileRole, IdxKind, Split
from lrnet_core.data.fetch import default_cache_dir, sha256_hex
from lrnet_core.data.idx import parse_idx
from lrnet_core.data.manifest import EXPECTED_COUNTS, dataset_name, entries_for, entry_for_role
from lrnet_core.data.preprocess import SOURCE_SIZE, TARGET_SIZE, resize_batch, scale_pixels
from lrnet_core.framework.errors import ConfigError, DataError
from lrnet_core.tensor import Precision

log = logging.getLogger(__name__)

NUM_CLASSES = 10

_ROLES = {
    Split.TRAIN: (FileRole.TRAIN_IMAGES, FileRole.TRAIN_LABELS),
    Split.TEST: (FileRole.TEST_IMAGES, FileRole.TEST_LABELS),
}


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Images [N, H, W, 1] scaled to [0, 1] with integer labels in 0..9.

    `source_checksums` maps each source file to its sha256; subsets and splits
    keep the checksums of the files they came from.
    """

    name: DatasetName
    split: Split
    images: np.ndarray
    labels: np.ndarray
    source_checksums: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.images.ndim != 4 or self.images.shape[3] != 1:
            raise DataError(f"images must be [N, H, W, 1], got {self.images.shape}")
        if self.labels.shape != (self.images.shape[0],):
            raise DataError(f"{self.images.shape[0]} images but labels of shape {self.labels.shape}")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= NUM_CLASSES):
            raise DataError(f"labels must lie in 0..{NUM_CLASSES - 1}")

    def __len__(self) -> int:
        return int(self.images.shape[0])

    @property
    def resolution(self) -> int:
        return int(self.images.shape[1])

    @property
    def precision(self) -> Precision:
        return Precision.of(self.images)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=NUM_CLASSES)

    def take(self, indices: np.ndarray, split: Split | None = None) -> "Dataset":
        return replace(
            self,
            split=self.split if split is None else split,
            images=self.images[indices],
            labels=self.labels[indices],
        )


def _read_gz(path: Path) -> bytes:
    try:
        with gzip.open(path, "rb") as fh:
            return fh.read()
    except (OSError, EOFError) as e:
        raise DataError(f"cannot read {path}: {e}") from e


def load_split(
    name: str | DatasetName,
    split: Split | str,
    cache_dir: Path | None = None,
    *,
    precision: Precision = Precision.FLOAT32,
    check_counts: bool = True,
) -> Dataset:
    """Decode a train or test split from the cache (run `fetch` first); pixels scaled once to [0, 1]."""
    ds = dataset_name(name)
    split = Split(split)
    if split not in _ROLES:
        raise ConfigError(f"only train and test splits are stored on disk, not {split.value!r}")
    entries = entries_for(ds)
    directory = (cache_dir or default_cache_dir()) / ds.value
    img_entry, lbl_entry = (entry_for_role(entries, r) for r in _ROLES[split])

    checksums: dict[str, str] = {}
    decoded = {}
    for entry, kind in ((img_entry, IdxKind.IMAGES), (lbl_entry, IdxKind.LABELS)):
        path = directory / entry.filename
        if not path.exists():
            raise DataError(f"{path} is missing; run `lrnet fetch --dataset {ds.value}` first")
        checksums[entry.filename] = sha256_hex(path.read_bytes())
        decoded[kind] = parse_idx(_read_gz(path), expected=kind).array()

    raw_images, labels = decoded[IdxKind.IMAGES], decoded[IdxKind.LABELS]
    if raw_images.shape[1:] != (SOURCE_SIZE, SOURCE_SIZE):
        raise DataError(f"expected {SOURCE_SIZE}x{SOURCE_SIZE} images, got {raw_images.shape[1:]}")
    if raw_images.shape[0] != labels.shape[0]:
        raise DataError(f"{raw_images.shape[0]} images but {labels.shape[0]} labels")
    expected = EXPECTED_COUNTS[ds][split.value]
    if check_counts and labels.shape[0] != expected:
        raise DataError(f"{ds.value}/{split.value}: expected {expected} samples, got {labels.shape[0]}")

    images = scale_pixels(raw_images, precision)[..., None]
    log.info("loaded %s/%s: %d samples", ds.value, split.value, labels.shape[0])
    return Dataset(ds, split, images, labels.astype(np.int64), checksums)


def preprocess(ds: Dataset, size: int = TARGET_SIZE) -> Dataset:
    """Bilinear resize to size x size; a dataset already at that size is returned as is."""
    if ds.resolution == size:
        return ds
    return replace(ds, images=resize_batch(ds.images, size))


def subset(ds: Dataset, n: int) -> Dataset:
    """First n samples."""
    if n < 0:
        raise ConfigError(f"subset size must be >= 0, got {n}")
    return ds.take(np.arange(min(n, len(ds))))


def split_train_val(ds: Dataset, val_fraction: float = 0.1, seed: int = 0) -> tuple[Dataset, Dataset]:
    """
    Stratified hold-out: floor(val_fraction * n_c) samples of each class c go
    to validation, drawn with a generator seeded by `seed`. Both parts keep
    the original sample order.
    """
    if not 0.0 < val_fraction < 1.0:
        raise ConfigError(f"val_fraction must lie in (0, 1), got {val_fraction}")

    rng = np.random.default_rng(seed)
    val_parts: list[np.ndarray] = []
    for c in range(NUM_CLASSES):
        idx = np.flatnonzero(ds.labels == c)
        if idx.size == 0:
            continue
        if idx.size < 2:
            raise DataError(f"class {c} has {idx.size} sample; need at least 2 to split")
        n_val = int(np.floor(val_fraction * idx.size))
        val_parts.append(rng.permutation(idx)[:n_val])

    val_idx = np.sort(np.concatenate(val_parts)) if val_parts else np.empty(0, dtype=np.intp)
    mask = np.ones(len(ds), dtype=bool)
    mask[val_idx] = False
    train_idx = np.flatnonzero(mask)
    log.debug("split %d samples into %d train / %d val", len(ds), train_idx.size, val_idx.size)
    return ds.take(train_idx, Split.TRAIN), ds.take(val_idx, Split.VAL)
