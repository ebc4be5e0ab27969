from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from math import prod
from typing import Any

import numpy as np

from lrnet_core.framework.errors import FormatError
from lrnet_core.framework.serialization import schema
from lrnet_core.framework.serialization.serialization import canonical_json

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_PAYLOAD_DTYPE = np.dtype("<f4")


@dataclass
class Checkpoint:
    """
    Decoded checkpoint: the run config, named tensors in file order, and the
    training state document. Tensors are stored as float32.
    """

    config: dict[str, Any]
    tensors: dict[str, np.ndarray] = field(default_factory=dict)
    state: dict[str, Any] = field(default_factory=dict)


# ----------------------------------------------------------------------
# Encoding
# ----------------------------------------------------------------------

def _blob(text: str) -> bytes:
    raw = text.encode("utf-8")
    return _U32.pack(len(raw)) + raw


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    parts = [schema.FORMAT_MAGIC, _U32.pack(schema.FORMAT_VERSION), _blob(canonical_json(ckpt.config))]
    parts.append(_U32.pack(len(ckpt.tensors)))
    for name, arr in ckpt.tensors.items():
        arr = np.asarray(arr)
        parts.append(_blob(name))
        parts.append(_U32.pack(arr.ndim))
        parts.extend(_U64.pack(d) for d in arr.shape)
        parts.append(np.ascontiguousarray(arr, dtype=_PAYLOAD_DTYPE).tobytes())
    parts.append(_blob(canonical_json(ckpt.state)))
    return b"".join(parts)


# ----------------------------------------------------------------------
# Decoding
# ----------------------------------------------------------------------

class _Reader:
    def __init__(self, data: bytes) -> None:
        self._data = memoryview(data)
        self._pos = 0

    def take(self, n: int, what: str) -> memoryview:
        end = self._pos + n
        if end > len(self._data):
            raise FormatError(f"checkpoint truncated while reading {what}")
        out = self._data[self._pos : end]
        self._pos = end
        return out

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return _U64.unpack(self.take(8, what))[0]

    def text(self, what: str) -> str:
        n = self.u32(what)
        try:
            return bytes(self.take(n, what)).decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"{what} is not valid UTF-8") from e

    def json(self, what: str) -> Any:
        try:
            return json.loads(self.text(what))
        except json.JSONDecodeError as e:
            raise FormatError(f"{what} is not valid JSON: {e}") from e

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos


def decode_checkpoint(data: bytes) -> Checkpoint:
    r = _Reader(data)
    magic = bytes(r.take(len(schema.FORMAT_MAGIC), "magic"))
    if magic != schema.FORMAT_MAGIC:
        raise FormatError(f"not a checkpoint: magic {magic!r}")
    version = r.u32("version")
    if version != schema.FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version} (expected {schema.FORMAT_VERSION})")

    config = r.json("config")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(r.u32("tensor count")):
        name = r.text("tensor name")
        if name in tensors:
            raise FormatError(f"duplicate tensor {name!r}")
        rank = r.u32(f"{name} rank")
        dims = tuple(r.u64(f"{name} dims") for _ in range(rank))
        payload = r.take(prod(dims) * _PAYLOAD_DTYPE.itemsize, f"{name} payload")
        tensors[name] = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).astype(np.float32).reshape(dims)
    state = r.json("state")
    if r.remaining:
        raise FormatError(f"{r.remaining} trailing bytes after checkpoint")
    return Checkpoint(config=config, tensors=tensors, state=state)
