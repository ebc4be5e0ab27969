from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path

from lrnet_core.framework.serialization.checkpoint import Checkpoint, decode_checkpoint, encode_checkpoint

log = logging.getLogger(__name__)


class CheckpointStore:
    """Checkpoint file at a fixed path; saves replace the file atomically."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def exists(self) -> bool:
        return self.path.exists()

    def save(self, ckpt: Checkpoint) -> int:
        data = encode_checkpoint(ckpt)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=self.path.name, suffix=".tmp", dir=self.path.parent)
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, self.path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        log.debug("wrote checkpoint %s (%d tensors, %d bytes)", self.path, len(ckpt.tensors), len(data))
        return len(data)

    def load(self) -> Checkpoint:
        return decode_checkpoint(self.path.read_bytes())
