from __future__ import annotations

import json
from abc import ABC
from dataclasses import fields, is_dataclass
from typing import Any, TypeVar

from lrnet_core.framework.errors import ConfigError

Primitive = Any  # dict/list/str/int/float/bool/None

S = TypeVar("S", bound="PrimitiveSerde")


class PrimitiveSerde(ABC):
    """
    Types that serialize to JSON primitives. Dataclass subclasses get both
    directions for free; anything else overrides to_primitive/from_primitive.
    """

    def to_primitive(self) -> Primitive:
        if not is_dataclass(self):
            raise NotImplementedError(f"{type(self).__name__} must implement to_primitive")
        from lrnet_core.framework.serialization.serialization import to_primitive

        return {f.name: to_primitive(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def from_primitive(cls: type[S], v: Primitive, *, strict: bool = False) -> S:
        if not is_dataclass(cls):
            raise NotImplementedError(f"{cls.__name__} must implement from_primitive")
        from lrnet_core.framework.serialization.serialization import build_dataclass

        return build_dataclass(cls, v, strict=strict)

    # ------------------------------------------------------------------
    # JSON text
    # ------------------------------------------------------------------

    def to_json(self) -> str:
        """Canonical text: sorted keys, compact separators."""
        from lrnet_core.framework.serialization.serialization import canonical_json

        return canonical_json(self)

    @classmethod
    def from_json(cls: type[S], text: str, *, strict: bool = True) -> S:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{cls.__name__}: invalid JSON: {e}") from e
        return cls.from_primitive(raw, strict=strict)
