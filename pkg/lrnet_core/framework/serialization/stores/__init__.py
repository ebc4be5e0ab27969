from lrnet_core.framework.serialization.stores.checkpoint_store import CheckpointStore

__all__ = ["CheckpointStore"]
