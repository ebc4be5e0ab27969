import gzip
import math

import numpy as np
import pytest

from lrnet_core.data import (
    BatchIterator,
    DatasetName,
    FileRole,
    IdxFile,
    IdxKind,
    ManifestEntry,
    Split,
    batches,
    encode_idx,
    fetch,
    load_manifest,
    load_split,
    parse_idx,
    preprocess,
    resize_bilinear_28_to_35,
    scale_pixels,
    sha256_hex,
    split_train_val,
    subset,
    urllib_transport,
)
from lrnet_core.framework.errors import ConfigError, DataError, FetchError, FormatError, IntegrityError
from lrnet_core.tensor import Precision, Tensor

from tests.conftest import make_dataset


def resize_oracle(img: np.ndarray, out: int = 35) -> np.ndarray:
    """Pixel-by-pixel bilinear with half-pixel centres."""
    n = img.shape[0]
    res = np.zeros((out, out))
    for i in range(out):
        for j in range(out):
            sy = min(max((i + 0.5) * n / out - 0.5, 0.0), n - 1)
            sx = min(max((j + 0.5) * n / out - 0.5, 0.0), n - 1)
            y0, x0 = int(math.floor(sy)), int(math.floor(sx))
            y1, x1 = min(y0 + 1, n - 1), min(x0 + 1, n - 1)
            fy, fx = sy - y0, sx - x0
            res[i, j] = ((1 - fy) * (1 - fx) * img[y0, x0] + (1 - fy) * fx * img[y0, x1]
                         + fy * (1 - fx) * img[y1, x0] + fy * fx * img[y1, x1])
    return res


class TestIdx:
    def test_round_trip_is_byte_exact(self, rng):
        images = rng.integers(0, 256, size=(3, 28, 28), dtype=np.uint8)
        raw = encode_idx(IdxFile.from_array(images))
        assert raw[:4] == b"\x00\x00\x08\x03"
        parsed = parse_idx(raw, expected=IdxKind.IMAGES)
        assert parsed.dims == (3, 28, 28)
        np.testing.assert_array_equal(parsed.array(), images)
        assert encode_idx(parsed) == raw

    def test_labels(self):
        raw = encode_idx(IdxFile.from_array(np.array([7, 0, 9], dtype=np.uint8)))
        assert raw[:8] == b"\x00\x00\x08\x01\x00\x00\x00\x03"
        assert parse_idx(raw).kind is IdxKind.LABELS

    def test_bad_magic(self):
        with pytest.raises(FormatError):
            parse_idx(b"\x00\x00\x0d\x03" + b"\x00" * 12)

    def test_truncated_payload(self):
        raw = encode_idx(IdxFile.from_array(np.zeros((2, 4, 4), dtype=np.uint8)))
        with pytest.raises(FormatError):
            parse_idx(raw[:-1])

    def test_truncated_header(self):
        with pytest.raises(FormatError):
            parse_idx(b"\x00\x00\x08\x03\x00\x00\x00\x01")

    def test_wrong_kind(self):
        raw = encode_idx(IdxFile.from_array(np.zeros(4, dtype=np.uint8)))
        with pytest.raises(FormatError):
            parse_idx(raw, expected=IdxKind.IMAGES)


def stub_manifest(payloads: dict[str, bytes], *, pinned: bool = True):
    entries = [
        ManifestEntry(f"{role.value}.gz", f"https://example.invalid/{role.value}.gz",
                      sha256_hex(payloads[role.value]) if pinned else None, role)
        for role in FileRole
    ]
    return {DatasetName.MNIST: entries}


class StubTransport:
    def __init__(self, payloads: dict[str, bytes]):
        self.payloads = payloads
        self.calls: list[str] = []

    def __call__(self, url: str) -> bytes:
        self.calls.append(url)
        return self.payloads[url.rsplit("/", 1)[-1].removesuffix(".gz")]


@pytest.fixture
def payloads():
    return {role.value: f"payload-{role.value}".encode() for role in FileRole}


class TestFetch:
    def test_manifest_lists_three_datasets(self):
        manifest = load_manifest()
        assert set(manifest) == set(DatasetName)
        for entries in manifest.values():
            assert {e.role for e in entries} == set(FileRole)

    def test_download_then_cache_hit(self, tmp_path, payloads):
        manifest = stub_manifest(payloads)
        transport = StubTransport(payloads)
        first = fetch("mnist", tmp_path, transport=transport, manifest=manifest)
        assert not first.all_cached and len(transport.calls) == 4
        assert (tmp_path / "mnist" / "train_images.gz").read_bytes() == payloads["train_images"]

        second = fetch("mnist", tmp_path, transport=transport, manifest=manifest)
        assert second.all_cached and len(transport.calls) == 4
        assert second.checksums == first.checksums

    def test_tampered_cache_names_file(self, tmp_path, payloads):
        manifest = stub_manifest(payloads)
        fetch("mnist", tmp_path, transport=StubTransport(payloads), manifest=manifest)
        (tmp_path / "mnist" / "test_labels.gz").write_bytes(b"tampered")
        with pytest.raises(IntegrityError, match="test_labels.gz"):
            fetch("mnist", tmp_path, transport=StubTransport(payloads), manifest=manifest)

    def test_digest_mismatch_on_download_writes_nothing(self, tmp_path):
        with pytest.raises(IntegrityError):
            fetch("mnist", tmp_path, transport=lambda url: b"not the real file")
        assert list(tmp_path.rglob("*.gz")) == []

    def test_transport_failure_leaves_cache_untouched(self, tmp_path, payloads):
        def broken(url):
            raise OSError("connection refused")

        with pytest.raises(FetchError):
            fetch("mnist", tmp_path, transport=broken, manifest=stub_manifest(payloads))
        assert not (tmp_path / "mnist").exists() or not any((tmp_path / "mnist").iterdir())

    def test_unpinned_entries_pinned_on_first_download(self, tmp_path, payloads):
        manifest = stub_manifest(payloads, pinned=False)
        fetch("mnist", tmp_path, transport=StubTransport(payloads), manifest=manifest)
        pin = tmp_path / "mnist" / "train_labels.gz.sha256"
        assert pin.read_text().strip() == sha256_hex(payloads["train_labels"])
        (tmp_path / "mnist" / "train_labels.gz").write_bytes(b"changed")
        with pytest.raises(IntegrityError):
            fetch("mnist", tmp_path, transport=StubTransport(payloads), manifest=manifest)

    def test_url_override_by_role(self, tmp_path, payloads):
        transport = StubTransport(payloads)
        fetch("mnist", tmp_path, transport=transport, manifest=stub_manifest(payloads),
              url_overrides={"train_images": "https://mirror.invalid/train_images.gz"})
        assert "https://mirror.invalid/train_images.gz" in transport.calls

    def test_unknown_dataset(self, tmp_path):
        with pytest.raises(ConfigError):
            fetch("cifar", tmp_path, transport=StubTransport({}))

    def test_bad_url_is_fetch_error(self):
        with pytest.raises(FetchError):
            urllib_transport("not a url")


class TestLoadSplit:
    def test_decodes_and_scales(self, synthetic_cache):
        ds = load_split("mnist", "train", synthetic_cache, check_counts=False)
        assert ds.images.shape == (200, 28, 28, 1)
        assert ds.images.dtype == np.float32
        assert ds.images.min() >= 0 and ds.images.max() == 1.0
        np.testing.assert_array_equal(ds.class_counts(), [20] * 10)
        assert set(ds.source_checksums) == {"train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz"}

    def test_scaling_is_divide_by_255(self):
        raw = np.array([0, 51, 255], dtype=np.uint8)
        np.testing.assert_array_equal(scale_pixels(raw, Precision.FLOAT64), [0.0, 0.2, 1.0])

    def test_expected_counts_enforced(self, synthetic_cache):
        with pytest.raises(DataError):
            load_split("mnist", "test", synthetic_cache)

    def test_missing_files(self, tmp_path):
        with pytest.raises(DataError):
            load_split("fashion", "train", tmp_path)

    def test_count_mismatch_between_files(self, synthetic_cache):
        path = synthetic_cache / "mnist" / "t10k-labels-idx1-ubyte.gz"
        path.write_bytes(gzip.compress(encode_idx(IdxFile.from_array(np.zeros(3, dtype=np.uint8)))))
        with pytest.raises(DataError):
            load_split("mnist", "test", synthetic_cache, check_counts=False)


class TestResize:
    def test_matches_pixel_oracle(self, rng):
        img = rng.random((28, 28))
        out = resize_bilinear_28_to_35(Tensor.from_array(img, Precision.FLOAT64))
        assert out.shape == (35, 35)
        assert np.abs(out.data - resize_oracle(img)).max() < 1e-6

    def test_batch_matches_single(self, rng):
        ds = make_dataset(rng, 4, size=28)
        resized = preprocess(ds)
        assert resized.images.shape == (4, 35, 35, 1)
        single = resize_bilinear_28_to_35(Tensor.from_array(ds.images[2]))
        assert np.abs(resized.images[2] - single.data).max() < 1e-6

    def test_constant_and_range(self, rng):
        flat = resize_bilinear_28_to_35(Tensor.full((28, 28), 0.25)).data
        np.testing.assert_allclose(flat, 0.25)
        out = resize_bilinear_28_to_35(Tensor.from_array(rng.random((28, 28)))).data
        assert out.min() >= 0 and out.max() <= 1

    def test_corner_samples_corner(self, rng):
        img = rng.random((28, 28))
        out = resize_bilinear_28_to_35(Tensor.from_array(img, Precision.FLOAT64)).data
        assert out[0, 0] == pytest.approx(img[0, 0])
        assert out[34, 34] == pytest.approx(img[27, 27])


class TestSplit:
    def test_stratified_and_disjoint(self, synthetic_cache):
        ds = load_split("mnist", "train", synthetic_cache, check_counts=False)
        train, val = split_train_val(ds, 0.1, seed=0)
        assert len(train) == 180 and len(val) == 20
        np.testing.assert_array_equal(val.class_counts(), [2] * 10)
        assert train.split is Split.TRAIN and val.split is Split.VAL

        np.testing.assert_array_equal(train.class_counts() + val.class_counts(), ds.class_counts())

    def test_seeded(self, rng):
        ds = make_dataset(rng, 100)
        a = split_train_val(ds, 0.2, seed=3)[1].images
        b = split_train_val(ds, 0.2, seed=3)[1].images
        c = split_train_val(ds, 0.2, seed=4)[1].images
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1])
    def test_bad_fraction(self, rng, fraction):
        with pytest.raises(ConfigError):
            split_train_val(make_dataset(rng, 20), fraction)

    def test_singleton_class(self, rng):
        with pytest.raises(DataError):
            split_train_val(make_dataset(rng, 15), 0.1)

    def test_subset_takes_prefix(self, rng):
        ds = make_dataset(rng, 30)
        sub = subset(ds, 12)
        assert len(sub) == 12
        np.testing.assert_array_equal(sub.labels, ds.labels[:12])


class TestBatches:
    def test_each_index_once_with_partial_tail(self, rng):
        ds = make_dataset(rng, 70, size=4)
        it = BatchIterator(batch_size=16, seed=5)
        sizes, seen = [], []
        for x, y in batches(ds, it, epoch=1):
            sizes.append(len(y))
            seen.append(x.data)
        assert sizes == [16, 16, 16, 16, 6]
        assert sorted(np.concatenate(it.index_batches(70, 1)).tolist()) == list(range(70))

    def test_full_mnist_batch_count(self):
        it = BatchIterator()
        assert it.batch_size == 256
        chunks = it.index_batches(60_000, epoch=1)
        assert len(chunks) == 235 and len(chunks[-1]) == 60_000 - 234 * 256

    def test_order_keyed_by_seed_and_epoch(self):
        it = BatchIterator(batch_size=8, seed=11)
        np.testing.assert_array_equal(it.permutation(50, 2), BatchIterator(batch_size=8, seed=11).permutation(50, 2))
        assert not np.array_equal(it.permutation(50, 2), it.permutation(50, 3))
        assert not np.array_equal(it.permutation(50, 2), BatchIterator(batch_size=8, seed=12).permutation(50, 2))

    def test_bad_batch_size(self):
        with pytest.raises(ConfigError):
            BatchIterator(batch_size=0)
