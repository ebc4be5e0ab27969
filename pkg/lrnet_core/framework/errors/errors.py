class LRNetError(RuntimeError):
    pass


class ShapeError(LRNetError):
    """Tensor extents do not fit the operation."""


class ConfigError(LRNetError):
    """Invalid configuration, spec or argument value."""


class GraphError(LRNetError):
    """Misuse of a recorded graph (cross-graph inputs, missing gradients)."""


class NumericError(LRNetError):
    """Non-finite value where a finite one is required."""


class DataError(LRNetError):
    pass


class FormatError(LRNetError):
    """Malformed IDX payload or checkpoint container."""


class IntegrityError(LRNetError):
    """Digest of a cached file does not match the pinned manifest."""


class FetchError(LRNetError):
    pass
