from enum import Enum, IntEnum


class DatasetName(str, Enum):
    MNIST = "mnist"
    FASHION = "fashion"
    ORACLE = "oracle"


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class FileRole(str, Enum):
    TRAIN_IMAGES = "train_images"
    TRAIN_LABELS = "train_labels"
    TEST_IMAGES = "test_images"
    TEST_LABELS = "test_labels"


class IdxKind(IntEnum):
    """Magic numbers of the unsigned-byte IDX files (third byte 0x08 = ubyte, fourth = rank)."""

    LABELS = 0x00000801
    IMAGES = 0x00000803

    @property
    def rank(self) -> int:
        return self.value & 0xFF
