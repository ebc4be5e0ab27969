from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from lrnet_core.data import CACHE_ENV, DatasetName
from lrnet_core.framework.errors import ConfigError
from lrnet_core.framework.guard import Guard
from lrnet_core.framework.serialization import PrimitiveSerde, from_primitive, to_primitive
from lrnet_core.lrnet import ModelSpec
from lrnet_core.nn import DEFAULT_PATIENCE, OptimizerKind, OutputActivation
from lrnet_core.tensor import Precision

log = logging.getLogger(__name__)

# Fields that only say where files go; they are left out of the copy embedded in checkpoints.
PATH_FIELDS = ("cache_dir", "checkpoint", "best_checkpoint", "metrics")


@dataclass(frozen=True)
class RunConfig(PrimitiveSerde):
    """One training run. JSON round-trips through to_json/from_json; unknown keys are rejected."""

    dataset: DatasetName = DatasetName.MNIST
    model: ModelSpec = field(default_factory=ModelSpec)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    lr: float = 1e-3
    batch_size: int = 256
    max_epochs: int = 200
    patience: int = DEFAULT_PATIENCE
    seed: int = 0
    val_fraction: float = 0.1
    train_limit: int | None = None
    precision: Precision = Precision.FLOAT32
    prefetch: int = 2
    record_seconds: bool = True
    cache_dir: Path | None = None
    checkpoint: Path = Path("lrnet.ckpt")
    best_checkpoint: Path | None = None
    metrics: Path = Path("metrics.csv")

    def __post_init__(self) -> None:
        Guard.positive(self.lr, "lr")
        Guard.positive(self.batch_size, "batch_size")
        Guard.positive(self.max_epochs, "max_epochs")
        Guard.positive(self.patience, "patience")
        Guard.check(0.0 < self.val_fraction < 1.0, f"val_fraction must lie in (0, 1), got {self.val_fraction}")
        Guard.check(self.prefetch >= 0, f"prefetch must be >= 0, got {self.prefetch}")
        if self.train_limit is not None:
            Guard.positive(self.train_limit, "train_limit")

    @property
    def best_checkpoint_path(self) -> Path:
        if self.best_checkpoint is not None:
            return self.best_checkpoint
        return self.checkpoint.with_name(f"{self.checkpoint.stem}.best{self.checkpoint.suffix}")

    def resolved_cache_dir(self) -> Path:
        if self.cache_dir is not None:
            return self.cache_dir
        env = os.environ.get(CACHE_ENV)
        return Path(env) if env else Path.home() / ".cache" / "lrnet"

    def embedded(self) -> dict[str, Any]:
        """Primitive form without the path fields; the same run written elsewhere embeds identical bytes."""
        prim = to_primitive(self)
        for name in PATH_FIELDS:
            prim.pop(name, None)
        return prim


def load_config(path: Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text("utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return RunConfig.from_json(text)


def apply_overrides(cfg: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """
    Flat overrides; None values are skipped. `output_activation` reaches into
    the model spec; every other key must name a RunConfig field.
    """
    known = {f.name for f in fields(RunConfig)}
    top: dict[str, Any] = {}
    model = cfg.model
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "output_activation":
            try:
                model = replace(model, output_activation=OutputActivation(value))
            except ValueError:
                raise ConfigError(f"invalid output_activation {value!r}") from None
        elif key in known:
            top[key] = value
        else:
            raise ConfigError(f"unknown override {key!r}")
    if top:
        log.debug("config overrides: %s", ", ".join(sorted(top)))
    merged = to_primitive(replace(cfg, model=model))
    merged.update(to_primitive(top))
    return from_primitive(RunConfig, merged, strict=True)
