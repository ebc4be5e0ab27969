from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from lrnet_core.autograd import Graph, zero_grads
from lrnet_core.cli.config import RunConfig
from lrnet_core.cli.metrics import MetricsRow, MetricsWriter
from lrnet_core.data import BatchIterator, Dataset, batches, sequential_batches
from lrnet_core.framework.concurrency import Prefetcher
from lrnet_core.framework.errors import ConfigError, DataError, FormatError, NumericError
from lrnet_core.framework.serialization import Checkpoint, CheckpointStore, from_primitive
from lrnet_core.framework.serialization.schema import OPTIM_M_PREFIX, OPTIM_V_PREFIX, optim_m_name, optim_v_name
from lrnet_core.lrnet import LRNet, build_model
from lrnet_core.nn import (
    EarlyStopState,
    OptimizerState,
    StopDecision,
    early_stop_update,
    loss_for,
    optimizer_step,
    predict,
)
from lrnet_core.tensor import Tensor

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalResult:
    loss: float
    accuracy: float
    correct: int
    total: int


@dataclass(frozen=True)
class TrainOutcome:
    epochs_run: int
    best_epoch: int
    best_val_loss: float
    stopped_early: bool

    @property
    def reason(self) -> str:
        if self.stopped_early:
            return f"early stop: no validation improvement for {self.epochs_run - self.best_epoch} epochs"
        return "reached max_epochs"


def evaluate(model: LRNet, ds: Dataset, batch_size: int = 256) -> EvalResult:
    """Mean loss and argmax accuracy over the whole dataset, in dataset order."""
    if len(ds) == 0:
        raise DataError(f"cannot evaluate on an empty {ds.split.value} set")
    loss_fn = loss_for(model.spec.output_activation)
    loss_sum = 0.0
    correct = 0
    for x, y in sequential_batches(ds, batch_size):
        graph = Graph(record=False)
        logits = model.forward(graph, graph.input(x))
        loss_sum += loss_fn(graph, logits, y).value.item() * len(y)
        correct += int(np.count_nonzero(predict(logits.value) == y))
    return EvalResult(loss=loss_sum / len(ds), accuracy=correct / len(ds), correct=correct, total=len(ds))


# ----------------------------------------------------------------------
# Checkpoint <-> model state
# ----------------------------------------------------------------------

def model_from_checkpoint(ckpt: Checkpoint) -> tuple[RunConfig, LRNet]:
    cfg = from_primitive(RunConfig, ckpt.config, strict=True)
    model = build_model(cfg.model, np.random.default_rng(cfg.seed), cfg.precision)
    load_parameters(model, ckpt)
    return cfg, model


def load_parameters(model: LRNet, ckpt: Checkpoint) -> None:
    stored = {k: v for k, v in ckpt.tensors.items() if not k.startswith((OPTIM_M_PREFIX, OPTIM_V_PREFIX))}
    missing = sorted(set(model.parameters) - set(stored))
    extra = sorted(set(stored) - set(model.parameters))
    if missing or extra:
        raise FormatError(f"checkpoint does not match model: missing {missing}, unexpected {extra}")
    for name, p in model.parameters.items():
        arr = stored[name]
        if arr.shape != p.shape:
            raise FormatError(f"{name}: checkpoint shape {arr.shape}, model shape {p.shape}")
        p.assign(Tensor.from_array(arr, model.precision))


class Trainer:
    """
    Owns one run's state: model, optimizer moments, early-stopping counters
    and the epoch counter. Batch order for epoch e is keyed by (seed, e), so
    seed and epoch are all the RNG state a resume needs.
    """

    def __init__(
        self,
        cfg: RunConfig,
        train_ds: Dataset,
        val_ds: Dataset,
        *,
        model: LRNet | None = None,
        clock: Callable[[], float] = time.perf_counter,
    ) -> None:
        self.cfg = cfg
        self.train_ds = train_ds
        self.val_ds = val_ds
        self.model = model or build_model(cfg.model, np.random.default_rng(cfg.seed), cfg.precision)
        self.optimizer = OptimizerState(kind=cfg.optimizer, lr=cfg.lr)
        self.early = EarlyStopState(patience=cfg.patience)
        self.epoch = 0
        self._clock = clock
        self._iterator = BatchIterator(batch_size=cfg.batch_size, seed=cfg.seed)
        self._loss_fn = loss_for(cfg.model.output_activation)

    # ------------------------------------------------------------------
    # Epochs
    # ------------------------------------------------------------------

    def evaluate(self, ds: Dataset) -> EvalResult:
        return evaluate(self.model, ds, self.cfg.batch_size)

    def train_step(self, x: Tensor, y: np.ndarray) -> tuple[float, int]:
        """One optimizer update; returns the batch loss and the number of correct predictions."""
        params = self.model.trainable()
        graph = Graph()
        logits = self.model.forward(graph, graph.input(x))
        loss = self._loss_fn(graph, logits, y)
        value = loss.value.item()
        if not math.isfinite(value):
            raise NumericError(f"training loss became {value} at epoch {self.epoch + 1}")
        zero_grads(params)
        grads = graph.backward(loss)
        optimizer_step(self.optimizer, params, grads)
        return value, int(np.count_nonzero(predict(logits.value) == y))

    def run_epoch(self) -> tuple[MetricsRow, StopDecision]:
        epoch = self.epoch + 1
        start = self._clock()
        loss_sum = 0.0
        correct = 0
        stream = batches(self.train_ds, self._iterator, epoch)
        with Prefetcher(stream, depth=self.cfg.prefetch, name=f"batches-e{epoch}") as prefetched:
            for x, y in prefetched:
                loss, hits = self.train_step(x, y)
                loss_sum += loss * len(y)
                correct += hits

        val = self.evaluate(self.val_ds)
        decision, self.early = early_stop_update(self.early, val.loss)
        self.epoch = epoch
        n = len(self.train_ds)
        seconds = self._clock() - start if self.cfg.record_seconds else 0.0
        row = MetricsRow(epoch, loss_sum / n, correct / n, val.loss, val.accuracy, seconds)
        log.info(
            "epoch %d: train_loss=%.5f train_acc=%.4f val_loss=%.5f val_acc=%.4f (%.1fs)",
            epoch, row.train_loss, row.train_acc, row.val_loss, row.val_acc, seconds,
        )
        return row, decision

    def fit(self, metrics: MetricsWriter, *, save: bool = True) -> TrainOutcome:
        """Epochs until max_epochs or early stop; best checkpoint on each improvement, final one at the end."""
        if self.early.should_stop:
            outcome = TrainOutcome(self.epoch, self.early.best_epoch, self.early.best_val_loss, True)
            log.info("%s at epoch %d; nothing to train", outcome.reason, self.epoch)
            return outcome
        stopped = False
        while self.epoch < self.cfg.max_epochs:
            row, decision = self.run_epoch()
            metrics.write(row)
            if save and self.early.best_epoch == self.epoch:
                CheckpointStore(self.cfg.best_checkpoint_path).save(self.to_checkpoint())
            if decision is StopDecision.STOP:
                stopped = True
                break
        if save:
            CheckpointStore(self.cfg.checkpoint).save(self.to_checkpoint())
        outcome = TrainOutcome(self.epoch, self.early.best_epoch, self.early.best_val_loss, stopped)
        log.info("%s; best epoch %d (val_loss=%.5f)", outcome.reason, outcome.best_epoch, outcome.best_val_loss)
        return outcome

    # ------------------------------------------------------------------
    # Checkpoints
    # ------------------------------------------------------------------

    def to_checkpoint(self) -> Checkpoint:
        tensors: dict[str, np.ndarray] = dict(self.model.state_arrays())
        for name in self.model.parameters:
            if name in self.optimizer.m:
                tensors[optim_m_name(name)] = self.optimizer.m[name]
                tensors[optim_v_name(name)] = self.optimizer.v[name]
        opt = self.optimizer
        state = {
            "epoch": self.epoch,
            "seed": self.cfg.seed,
            "optimizer": {"kind": opt.kind.value, "lr": opt.lr, "beta1": opt.beta1, "beta2": opt.beta2, "eps": opt.eps, "t": opt.t},
            "early_stop": self.early.to_primitive(),
        }
        return Checkpoint(config=self.cfg.embedded(), tensors=tensors, state=state)

    def restore(self, ckpt: Checkpoint) -> None:
        """Continue from a checkpoint written by a run with the same model and seed."""
        saved = from_primitive(RunConfig, ckpt.config, strict=True)
        if saved.model != self.cfg.model or saved.seed != self.cfg.seed:
            raise ConfigError("checkpoint was written for a different model spec or seed")
        load_parameters(self.model, ckpt)

        state = ckpt.state
        try:
            opt = state["optimizer"]
            self.optimizer = OptimizerState(
                kind=self.cfg.optimizer, lr=self.cfg.lr,
                beta1=opt["beta1"], beta2=opt["beta2"], eps=opt["eps"], t=opt["t"],
            )
            self.early = EarlyStopState.from_primitive(state["early_stop"], strict=True)
            self.epoch = int(state["epoch"])
        except KeyError as e:
            raise FormatError(f"checkpoint state is missing {e}") from None
        if self.early.patience != self.cfg.patience:
            self.early = EarlyStopState(
                patience=self.cfg.patience,
                best_val_loss=self.early.best_val_loss,
                epochs_since_improve=min(self.early.epochs_since_improve, self.cfg.patience),
                best_epoch=self.early.best_epoch,
                epoch=self.early.epoch,
            )
        dtype = self.cfg.precision.dtype
        for name in self.model.parameters:
            m, v = ckpt.tensors.get(optim_m_name(name)), ckpt.tensors.get(optim_v_name(name))
            if m is not None and v is not None:
                self.optimizer.m[name] = m.astype(dtype)
                self.optimizer.v[name] = v.astype(dtype)
        log.info("resumed at epoch %d (optimizer step %d)", self.epoch, self.optimizer.t)
