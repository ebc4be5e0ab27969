from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path

import numpy as np

from lrnet_core.cli.config import RunConfig, apply_overrides, load_config
from lrnet_core.cli.metrics import MetricsWriter
from lrnet_core.cli.training import Trainer, evaluate, model_from_checkpoint
from lrnet_core.data import Dataset, Split, fetch, load_split, preprocess, split_train_val, subset
from lrnet_core.framework.errors import ConfigError, DataError
from lrnet_core.framework.serialization import CheckpointStore
from lrnet_core.lrnet import build_model, describe

log = logging.getLogger(__name__)


def _url_overrides(pairs: list[str] | None) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs or []:
        key, sep, url = pair.partition("=")
        if not sep or not key or not url:
            raise ConfigError(f"--url expects ROLE=URL or FILENAME=URL, got {pair!r}")
        out[key] = url
    return out


def load_run_data(cfg: RunConfig) -> tuple[Dataset, Dataset]:
    """Train split (optionally limited), stratified into train/val, resized to the model input."""
    full = load_split(cfg.dataset, Split.TRAIN, cfg.resolved_cache_dir(), precision=cfg.precision)
    if cfg.train_limit is not None:
        full = subset(full, cfg.train_limit)
    train, val = split_train_val(full, cfg.val_fraction, cfg.seed)
    if len(val) == 0:
        raise DataError(
            f"validation split is empty: {len(full)} training samples with val_fraction={cfg.val_fraction}; "
            "raise --train-limit or val_fraction"
        )
    size = cfg.model.input_size
    return preprocess(train, size), preprocess(val, size)


def load_eval_data(cfg: RunConfig, dataset: str, split: Split) -> Dataset:
    if split is Split.VAL:
        _, val = load_run_data(apply_overrides(cfg, {"dataset": dataset}))
        return val
    ds = load_split(dataset, split, cfg.resolved_cache_dir(), precision=cfg.precision)
    return preprocess(ds, cfg.model.input_size)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_fetch(args: argparse.Namespace) -> int:
    cache = Path(args.cache) if args.cache else RunConfig().resolved_cache_dir()
    result = fetch(args.dataset, cache, url_overrides=_url_overrides(args.url))
    for f in result.files:
        status = "cached" if f.cached else "downloaded"
        print(f"{f.entry.filename} {status} sha256={f.sha256}")
    return 0


def _train_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(Path(args.config) if args.config else None)
    return apply_overrides(
        cfg,
        {
            "seed": args.seed,
            "dataset": args.dataset,
            "max_epochs": args.max_epochs,
            "patience": args.patience,
            "batch_size": args.batch_size,
            "lr": args.lr,
            "output_activation": args.output_activation,
            "metrics": args.metrics,
            "checkpoint": args.checkpoint,
            "train_limit": args.train_limit,
            "cache_dir": args.cache,
        },
    )


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _train_config(args)
    train, val = load_run_data(cfg)
    log.info("training on %s: %d train / %d val samples", cfg.dataset.value, len(train), len(val))

    trainer = Trainer(cfg, train, val)
    resume = args.resume is not None
    if resume:
        trainer.restore(CheckpointStore(args.resume).load())

    with MetricsWriter(cfg.metrics, append=resume) as metrics:
        outcome = trainer.fit(metrics)

    print(f"{outcome.reason}; best epoch {outcome.best_epoch} (val_loss={outcome.best_val_loss!r})")
    print(f"checkpoint: {cfg.checkpoint}  best: {cfg.best_checkpoint_path}  metrics: {cfg.metrics}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg, model = model_from_checkpoint(CheckpointStore(args.checkpoint).load())
    if args.cache:
        cfg = apply_overrides(cfg, {"cache_dir": args.cache})
    split = Split(args.split)
    dataset = args.dataset or cfg.dataset.value
    ds = load_eval_data(cfg, dataset, split)
    result = evaluate(model, ds, args.batch_size or cfg.batch_size)
    print(
        f"{dataset} {split.value}: accuracy={result.accuracy:.4f} "
        f"({result.correct}/{result.total}) loss={result.loss:.6f}"
    )
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    if (args.config is None) == (args.checkpoint is None):
        raise ConfigError("inspect takes exactly one of --config or --checkpoint")
    if args.checkpoint is not None:
        _, model = model_from_checkpoint(CheckpointStore(args.checkpoint).load())
    else:
        cfg = load_config(Path(args.config))
        model = build_model(cfg.model, np.random.default_rng(cfg.seed), cfg.precision)

    report = describe(model)
    if args.json:
        print(json.dumps(report.to_primitive(), indent=2, sort_keys=True))
    else:
        print(report.render())
    return 0
