from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from lrnet_core.data.enums import DatasetName, FileRole
from lrnet_core.framework.errors import ConfigError
from lrnet_core.framework.serialization.serde import PrimitiveSerde

# Expected sample counts per split.
EXPECTED_COUNTS: dict[DatasetName, dict[str, int]] = {
    DatasetName.MNIST: {"train": 60_000, "test": 10_000},
    DatasetName.FASHION: {"train": 60_000, "test": 10_000},
    DatasetName.ORACLE: {"train": 27_222, "test": 3_000},
}


@dataclass(frozen=True)
class ManifestEntry(PrimitiveSerde):
    filename: str
    url: str
    sha256: str | None
    role: FileRole


def dataset_name(name: str | DatasetName) -> DatasetName:
    try:
        return DatasetName(name)
    except ValueError:
        known = ", ".join(d.value for d in DatasetName)
        raise ConfigError(f"unknown dataset {name!r} (known: {known})") from None


def load_manifest(raw: Mapping[str, Any] | None = None) -> dict[DatasetName, list[ManifestEntry]]:
    """Parse the bundled manifest.json, or `raw` when given."""
    if raw is None:
        raw = json.loads(resources.files("lrnet_core.data").joinpath("manifest.json").read_text("utf-8"))
    out: dict[DatasetName, list[ManifestEntry]] = {}
    for name, entries in raw.items():
        parsed = [ManifestEntry.from_primitive(e, strict=True) for e in entries]
        roles = {e.role for e in parsed}
        if roles != set(FileRole):
            raise ConfigError(f"manifest for {name!r} must list one file per role, got {sorted(r.value for r in roles)}")
        out[dataset_name(name)] = parsed
    return out


def entries_for(name: str | DatasetName, manifest: Mapping[DatasetName, list[ManifestEntry]] | None = None) -> list[ManifestEntry]:
    ds = dataset_name(name)
    manifest = load_manifest() if manifest is None else manifest
    if ds not in manifest:
        raise ConfigError(f"dataset {ds.value!r} missing from manifest")
    return manifest[ds]


def entry_for_role(entries: list[ManifestEntry], role: FileRole) -> ManifestEntry:
    for e in entries:
        if e.role is role:
            return e
    raise ConfigError(f"no manifest entry with role {role.value!r}")
