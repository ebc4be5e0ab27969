from __future__ import annotations

from dataclasses import dataclass, field

from lrnet_core.framework.errors import ConfigError
from lrnet_core.framework.guard import Guard
from lrnet_core.framework.serialization.serde import PrimitiveSerde
from lrnet_core.nn.enums import OutputActivation
from lrnet_core.tensor import pool_extent

NUM_BLOCKS = 3
MIN_BLOCK_INPUT = 7  # the 7x7 branch must fit inside the feature map


@dataclass(frozen=True)
class BlockSpec(PrimitiveSerde):
    """Filter budget of one MK-block: branch widths and the 1x1 fusion width."""

    f3: int = 48
    f5: int = 32
    f7: int = 16
    f_out: int = 64

    def __post_init__(self) -> None:
        for name in ("f3", "f5", "f7", "f_out"):
            Guard.positive(getattr(self, name), name)
        if not self.f3 > self.f5 >= self.f7:
            raise ConfigError(
                f"filter counts must descend with kernel size (f3 > f5 >= f7), got {self.f3}/{self.f5}/{self.f7}"
            )

    @property
    def junction_channels(self) -> int:
        return self.f3 + self.f5 + self.f7

    @property
    def fusion_in_channels(self) -> int:
        return self.junction_channels + self.f5 + self.f3


@dataclass(frozen=True)
class ModelSpec(PrimitiveSerde):
    blocks: tuple[BlockSpec, ...] = field(default_factory=lambda: (BlockSpec(),) * NUM_BLOCKS)
    dense_widths: tuple[int, ...] = (256,)
    num_classes: int = 10
    input_size: int = 35
    input_channels: int = 1
    output_activation: OutputActivation = OutputActivation.SOFTMAX

    def __post_init__(self) -> None:
        if len(self.blocks) != NUM_BLOCKS:
            raise ConfigError(f"LR-Net stacks exactly {NUM_BLOCKS} MK-blocks, got {len(self.blocks)}")
        for w in self.dense_widths:
            Guard.positive(w, "dense width")
        Guard.positive(self.num_classes, "num_classes")
        Guard.positive(self.input_channels, "input_channels")
        for i, size in enumerate(self.spatial_trace()[:-1]):
            if size < MIN_BLOCK_INPUT:
                raise ConfigError(
                    f"input size {self.input_size} leaves {size}x{size} at block {i + 1}; need >= {MIN_BLOCK_INPUT}"
                )

    def spatial_trace(self) -> list[int]:
        """Spatial extent before each block and after the last (35 -> 17 -> 8 -> 4)."""
        trace = [self.input_size]
        for _ in self.blocks:
            trace.append(pool_extent(trace[-1]))
        return trace

    @property
    def flatten_width(self) -> int:
        s = self.spatial_trace()[-1]
        return s * s * self.blocks[-1].f_out
