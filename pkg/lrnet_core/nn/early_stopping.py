from __future__ import annotations

import math
from dataclasses import dataclass, replace

from lrnet_core.framework.errors import NumericError
from lrnet_core.framework.guard import Guard
from lrnet_core.framework.serialization.serde import PrimitiveSerde
from lrnet_core.nn.enums import StopDecision

DEFAULT_PATIENCE = 30


@dataclass(frozen=True)
class EarlyStopState(PrimitiveSerde):
    """
    Validation-loss patience counter. Epochs are numbered from 1;
    best_epoch is 0 until the first update.
    """

    patience: int = DEFAULT_PATIENCE
    best_val_loss: float = math.inf
    epochs_since_improve: int = 0
    best_epoch: int = 0
    epoch: int = 0

    def __post_init__(self) -> None:
        Guard.positive(self.patience, "patience")
        Guard.check(0 <= self.epochs_since_improve <= self.patience, "epochs_since_improve out of [0, patience]")

    @property
    def should_stop(self) -> bool:
        return self.epochs_since_improve >= self.patience


def early_stop_update(state: EarlyStopState, val_loss: float) -> tuple[StopDecision, EarlyStopState]:
    """
    Strict improvement resets the counter and records the epoch; anything else
    (including an equal loss) counts as a non-improving epoch.
    """
    if not math.isfinite(val_loss):
        raise NumericError(f"validation loss is not finite: {val_loss}")
    epoch = state.epoch + 1
    if val_loss < state.best_val_loss:
        new = replace(state, best_val_loss=float(val_loss), epochs_since_improve=0, best_epoch=epoch, epoch=epoch)
    else:
        new = replace(state, epochs_since_improve=state.epochs_since_improve + 1, epoch=epoch)
    return (StopDecision.STOP if new.should_stop else StopDecision.CONTINUE), new
