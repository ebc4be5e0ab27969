from .block import BlockTrace, MKBlock, build_block
from .model import LRNet, build_model, count_parameters
from .report import PUBLISHED_PARAMETER_COUNT, LayerRow, TopologyReport, closed_form_count, describe
from .specs import NUM_BLOCKS, BlockSpec, ModelSpec

__all__ = [
    "NUM_BLOCKS",
    "PUBLISHED_PARAMETER_COUNT",
    "BlockSpec",
    "BlockTrace",
    "LRNet",
    "LayerRow",
    "MKBlock",
    "ModelSpec",
    "TopologyReport",
    "build_block",
    "build_model",
    "closed_form_count",
    "count_parameters",
    "describe",
]
