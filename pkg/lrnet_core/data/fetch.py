"""
Download-and-verify for the dataset files listed in manifest.json.

Files live under <cache>/<dataset>/<filename>. A file already in the cache is
verified and reused without network I/O. Downloads are verified before they
are moved into place, so a failed fetch leaves the cache as it was.

Entries without a pinned sha256 are pinned on first download: the digest is
written to <filename>.sha256 next to the file and checked on every later use.
"""
from __future__ import annotations

import hashlib
import logging
import os
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from lrnet_core.data.enums import DatasetName
from lrnet_core.data.manifest import ManifestEntry, dataset_name, entries_for
from lrnet_core.framework.errors import FetchError, IntegrityError

log = logging.getLogger(__name__)

Transport = Callable[[str], bytes]

DEFAULT_TIMEOUT_S = 60.0
CACHE_ENV = "LRNET_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "lrnet"


def urllib_transport(url: str, *, timeout: float = DEFAULT_TIMEOUT_S) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except (urllib.error.URLError, OSError, ValueError) as e:
        raise FetchError(f"download failed for {url}: {e}") from e


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class FetchedFile:
    entry: ManifestEntry
    path: Path
    sha256: str
    cached: bool


@dataclass(frozen=True)
class FetchResult:
    dataset: DatasetName
    files: tuple[FetchedFile, ...]

    @property
    def all_cached(self) -> bool:
        return all(f.cached for f in self.files)

    @property
    def checksums(self) -> dict[str, str]:
        return {f.entry.filename: f.sha256 for f in self.files}


def _pin_path(path: Path) -> Path:
    return path.with_name(path.name + ".sha256")


def _expected_digest(entry: ManifestEntry, path: Path) -> str | None:
    if entry.sha256:
        return entry.sha256.lower()
    pin = _pin_path(path)
    if pin.exists():
        return pin.read_text("ascii").strip().lower()
    return None


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name, suffix=".part", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _resolve_url(entry: ManifestEntry, overrides: Mapping[str, str]) -> str:
    return overrides.get(entry.filename) or overrides.get(entry.role.value) or entry.url


def fetch_file(
    entry: ManifestEntry,
    directory: Path,
    *,
    transport: Transport,
    url_overrides: Mapping[str, str] | None = None,
) -> FetchedFile:
    path = directory / entry.filename
    if path.exists():
        digest = sha256_hex(path.read_bytes())
        expected = _expected_digest(entry, path)
        if expected is not None and digest != expected:
            raise IntegrityError(f"{path}: sha256 {digest} does not match pinned {expected}")
        log.debug("cache hit %s", path)
        return FetchedFile(entry, path, digest, cached=True)

    url = _resolve_url(entry, url_overrides or {})
    log.info("downloading %s", url)
    try:
        data = transport(url)
    except FetchError:
        raise
    except Exception as e:
        raise FetchError(f"download failed for {url}: {e}") from e

    digest = sha256_hex(data)
    expected = _expected_digest(entry, path)
    if expected is not None and digest != expected:
        raise IntegrityError(f"{entry.filename}: downloaded sha256 {digest} does not match pinned {expected}")

    _atomic_write(path, data)
    if expected is None:
        _atomic_write(_pin_path(path), (digest + "\n").encode("ascii"))
        log.warning("%s has no pinned digest; pinned %s on first download", entry.filename, digest)
    return FetchedFile(entry, path, digest, cached=False)


def fetch(
    name: str | DatasetName,
    cache_dir: Path | None = None,
    *,
    url_overrides: Mapping[str, str] | None = None,
    transport: Transport | None = None,
    manifest: Mapping[DatasetName, list[ManifestEntry]] | None = None,
) -> FetchResult:
    """Ensure every file of the dataset is present in the cache with a matching digest."""
    ds = dataset_name(name)
    entries = entries_for(ds, manifest)
    directory = (cache_dir or default_cache_dir()) / ds.value
    transport = transport or urllib_transport

    files = tuple(
        fetch_file(e, directory, transport=transport, url_overrides=url_overrides) for e in entries
    )
    result = FetchResult(ds, files)
    log.info("%s: %d files ready in %s (%s)", ds.value, len(files), directory, "cached" if result.all_cached else "fetched")
    return result
