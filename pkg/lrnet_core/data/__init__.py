from lrnet_core.data.batching import DEFAULT_BATCH_SIZE, BatchIterator, batches, sequential_batches
from lrnet_core.data.dataset import NUM_CLASSES, Dataset, load_split, preprocess, split_train_val, subset
from lrnet_core.data.enums import DatasetName, FileRole, IdxKind, Split
from lrnet_core.data.fetch import (
    CACHE_ENV,
    FetchedFile,
    FetchResult,
    Transport,
    default_cache_dir,
    fetch,
    sha256_hex,
    urllib_transport,
)
from lrnet_core.data.idx import IdxFile, encode_idx, parse_idx
from lrnet_core.data.manifest import EXPECTED_COUNTS, ManifestEntry, dataset_name, load_manifest
from lrnet_core.data.preprocess import resize_batch, resize_bilinear, resize_bilinear_28_to_35, scale_pixels

__all__ = [
    "BatchIterator",
    "CACHE_ENV",
    "DEFAULT_BATCH_SIZE",
    "Dataset",
    "DatasetName",
    "EXPECTED_COUNTS",
    "FetchResult",
    "FetchedFile",
    "FileRole",
    "IdxFile",
    "IdxKind",
    "ManifestEntry",
    "NUM_CLASSES",
    "Split",
    "Transport",
    "batches",
    "dataset_name",
    "default_cache_dir",
    "encode_idx",
    "fetch",
    "load_manifest",
    "load_split",
    "parse_idx",
    "preprocess",
    "resize_batch",
    "resize_bilinear",
    "resize_bilinear_28_to_35",
    "scale_pixels",
    "sequential_batches",
    "sha256_hex",
    "split_train_val",
    "subset",
    "urllib_transport",
]
