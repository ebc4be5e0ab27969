"""
IDX container, as used by MNIST and its drop-in replacements:

    [0:4]   magic, big-endian (0x00000803 images, 0x00000801 labels)
    [4:...] one big-endian uint32 extent per dimension
    [...]   unsigned-byte payload, row-major
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from math import prod

import numpy as np

from lrnet_core.data.enums import IdxKind
from lrnet_core.framework.errors import FormatError


@dataclass(frozen=True)
class IdxFile:
    magic: int
    dims: tuple[int, ...]
    payload: bytes

    def __post_init__(self) -> None:
        if len(self.payload) != prod(self.dims):
            raise FormatError(f"payload has {len(self.payload)} bytes, dims {self.dims} need {prod(self.dims)}")

    @property
    def kind(self) -> IdxKind:
        return IdxKind(self.magic)

    @property
    def rank(self) -> int:
        return len(self.dims)

    def array(self) -> np.ndarray:
        return np.frombuffer(self.payload, dtype=np.uint8).reshape(self.dims)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "IdxFile":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        kind = {1: IdxKind.LABELS, 3: IdxKind.IMAGES}.get(arr.ndim)
        if kind is None:
            raise FormatError(f"no IDX kind for rank {arr.ndim}")
        return cls(int(kind), tuple(int(d) for d in arr.shape), arr.tobytes())


def parse_idx(data: bytes, expected: IdxKind | None = None) -> IdxFile:
    if len(data) < 8:
        raise FormatError(f"IDX data too short: {len(data)} bytes")
    (magic,) = struct.unpack(">I", data[:4])
    try:
        kind = IdxKind(magic)
    except ValueError:
        raise FormatError(f"bad IDX magic 0x{magic:08x}") from None
    if expected is not None and kind is not expected:
        raise FormatError(f"expected {expected.name.lower()} file (0x{expected.value:08x}), got 0x{magic:08x}")

    header = 4 + 4 * kind.rank
    if len(data) < header:
        raise FormatError(f"IDX header truncated: {len(data)} < {header} bytes")
    dims = struct.unpack(f">{kind.rank}I", data[4:header])
    payload = data[header:]
    if len(payload) != prod(dims):
        raise FormatError(f"IDX payload is {len(payload)} bytes, dims {dims} need {prod(dims)} (truncated or padded)")
    return IdxFile(magic, tuple(dims), bytes(payload))


def encode_idx(idx: IdxFile) -> bytes:
    return struct.pack(f">I{len(idx.dims)}I", idx.magic, *idx.dims) + idx.payload
