from __future__ import annotations

import json
import types
from dataclasses import MISSING, fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Union, get_args, get_origin, get_type_hints

import numpy as np

from lrnet_core.framework.errors import ConfigError
from lrnet_core.framework.serialization.serde import Primitive, PrimitiveSerde


def to_primitive(obj: Any) -> Primitive:
    """Convert dataclasses + PrimitiveSerde objects into JSON-friendly primitives."""

    if isinstance(obj, PrimitiveSerde):
        return obj.to_primitive()

    # str-valued enums first: they are also instances of str
    if isinstance(obj, Enum):
        return obj.value

    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj

    if isinstance(obj, Path):
        return str(obj)

    # numpy scalars -> python scalars
    if isinstance(obj, np.generic):
        return obj.item()

    if is_dataclass(obj):
        return {f.name: to_primitive(getattr(obj, f.name)) for f in fields(obj)}

    if isinstance(obj, (list, tuple)):
        return [to_primitive(v) for v in obj]

    if isinstance(obj, dict):
        return {str(k): to_primitive(v) for k, v in obj.items()}

    raise TypeError(f"Cannot serialize type {type(obj)}. Add PrimitiveSerde or handle it explicitly.")


def canonical_json(obj: Any) -> str:
    """Sorted, compact JSON; equal objects give byte-equal text."""
    return json.dumps(to_primitive(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _convert_field(t: Any, v: Any, strict: bool) -> Any:
    """Reconstruct a single field value from its primitive form using type hint `t`."""
    if v is None:
        return None

    origin = get_origin(t)
    args = get_args(t)

    # Optional[T] / T | None
    if origin is Union or isinstance(t, types.UnionType):
        inner = next(a for a in args if a is not type(None))
        return _convert_field(inner, v, strict)

    if origin is list:
        (inner,) = args
        return [_convert_field(inner, x, strict) for x in v]

    if origin is dict:
        k_t, v_t = args
        return {_convert_field(k_t, kk, strict): _convert_field(v_t, vv, strict) for kk, vv in v.items()}

    # tuple[T, ...] or tuple[T1, T2, ...]
    if origin is tuple:
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_convert_field(args[0], x, strict) for x in v)
        return tuple(_convert_field(ti, xi, strict) for ti, xi in zip(args, v))

    if isinstance(t, type) and issubclass(t, Enum):
        try:
            return t(v)
        except ValueError as e:
            raise ConfigError(f"invalid {t.__name__} value {v!r}") from e

    if isinstance(t, type) and issubclass(t, PrimitiveSerde):
        return t.from_primitive(v, strict=strict)

    if isinstance(t, type) and is_dataclass(t):
        return build_dataclass(t, v, strict=strict)

    if t is Path:
        return Path(v)

    # ints written as JSON numbers must stay ints; floats accept ints
    if t is float and isinstance(v, int) and not isinstance(v, bool):
        return float(v)

    return v


def build_dataclass(cls: type[Any], data: Primitive, *, strict: bool = False) -> Any:
    """
    Rebuild a dataclass instance of type `cls` from primitives, using type hints.
    Missing keys fall back to dataclass defaults; with strict=True unknown keys raise ConfigError.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"Expected object for {cls.__name__}, got {type(data).__name__}")

    hints = get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    if strict:
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown key(s) for {cls.__name__}: {', '.join(unknown)}")

    kwargs: dict[str, Any] = {}
    for f in fields(cls):
        if f.name in data:
            kwargs[f.name] = _convert_field(hints.get(f.name, type(None)), data[f.name], strict)
            continue

        if f.default is not MISSING:
            continue
        if f.default_factory is not MISSING:
            continue

        raise ConfigError(f"Missing key '{f.name}' for {cls.__name__}")

    return cls(**kwargs)


def from_primitive(cls: type[Any], data: Primitive, *, strict: bool = False) -> Any:
    """
    Rebuild an instance of `cls` from primitives.
    Works with dataclasses, PrimitiveSerde subclasses, enums, Optional, list, tuple, dict.
    """
    if isinstance(cls, type) and issubclass(cls, PrimitiveSerde):
        return cls.from_primitive(data, strict=strict)

    if not is_dataclass(cls):
        raise TypeError(f"{cls} is not a dataclass (and not PrimitiveSerde).")

    return build_dataclass(cls, data, strict=strict)
