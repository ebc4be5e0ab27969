from .errors import (
    ConfigError,
    DataError,
    FetchError,
    FormatError,
    GraphError,
    IntegrityError,
    LRNetError,
    NumericError,
    ShapeError,
)

__all__ = [
    "ConfigError",
    "DataError",
    "FetchError",
    "FormatError",
    "GraphError",
    "IntegrityError",
    "LRNetError",
    "NumericError",
    "ShapeError",
]
