"""Real-data runs; skipped unless LRNET_CACHE points at fetched datasets."""
import os
from pathlib import Path

import pytest

from lrnet_core.cli import MetricsWriter, RunConfig, Trainer, evaluate, read_metrics
from lrnet_core.cli.commands import load_eval_data, load_run_data
from lrnet_core.data import EXPECTED_COUNTS, DatasetName, Split, load_split
from lrnet_core.data.manifest import entries_for

pytestmark = pytest.mark.slow


def cache_dir() -> Path:
    return Path(os.environ["LRNET_CACHE"])


def require(name: DatasetName) -> None:
    missing = [e.filename for e in entries_for(name) if not (cache_dir() / name.value / e.filename).exists()]
    if missing:
        pytest.skip(f"{name.value} not fetched: {', '.join(missing)}")


@pytest.mark.parametrize("name", list(DatasetName))
def test_decoded_sizes(name):
    require(name)
    for split in (Split.TRAIN, Split.TEST):
        ds = load_split(name, split, cache_dir())
        assert len(ds) == EXPECTED_COUNTS[name][split.value]
        assert ds.resolution == 28
        assert float(ds.images.max()) <= 1.0


def test_two_runs_on_subset_are_byte_identical(tmp_path):
    require(DatasetName.MNIST)
    outputs = []
    for run in ("a", "b"):
        cfg = RunConfig(
            max_epochs=2, train_limit=5000, record_seconds=False, cache_dir=cache_dir(),
            checkpoint=tmp_path / run / "run.ckpt", metrics=tmp_path / run / "metrics.csv",
        )
        train, val = load_run_data(cfg)
        with MetricsWriter(cfg.metrics) as metrics:
            Trainer(cfg, train, val).fit(metrics)
        outputs.append((cfg.metrics.read_bytes(), cfg.checkpoint.read_bytes()))
    assert outputs[0] == outputs[1]


@pytest.mark.parametrize(
    "name, epochs, floor",
    [(DatasetName.MNIST, 5, 0.98), (DatasetName.FASHION, 5, 0.88), (DatasetName.ORACLE, 10, 0.85)],
)
def test_scaled_accuracy(tmp_path, name, epochs, floor):
    require(name)
    cfg = RunConfig(
        dataset=name, max_epochs=epochs, cache_dir=cache_dir(),
        checkpoint=tmp_path / "run.ckpt", metrics=tmp_path / "metrics.csv",
    )
    train, val = load_run_data(cfg)
    trainer = Trainer(cfg, train, val)
    with MetricsWriter(cfg.metrics) as metrics:
        trainer.fit(metrics)
    assert len(read_metrics(cfg.metrics)) == epochs
    result = evaluate(trainer.model, load_eval_data(cfg, name.value, Split.TEST), cfg.batch_size)
    assert result.total == EXPECTED_COUNTS[name]["test"]
    assert result.accuracy >= floor
