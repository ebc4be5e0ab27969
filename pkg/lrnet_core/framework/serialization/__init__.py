from lrnet_core.framework.serialization.checkpoint import Checkpoint, decode_checkpoint, encode_checkpoint
from lrnet_core.framework.serialization.serde import Primitive, PrimitiveSerde
from lrnet_core.framework.serialization.serialization import (
    build_dataclass,
    canonical_json,
    from_primitive,
    to_primitive,
)
from lrnet_core.framework.serialization.stores import CheckpointStore

__all__ = [
    "Checkpoint",
    "CheckpointStore",
    "Primitive",
    "PrimitiveSerde",
    "build_dataclass",
    "canonical_json",
    "decode_checkpoint",
    "encode_checkpoint",
    "from_primitive",
    "to_primitive",
]
