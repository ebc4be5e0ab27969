from __future__ import annotations

import csv
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import IO

from lrnet_core.framework.errors import FormatError

METRICS_HEADER = ("epoch", "train_loss", "train_acc", "val_loss", "val_acc", "seconds")


@dataclass(frozen=True)
class MetricsRow:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    seconds: float

    def cells(self) -> list[str]:
        # repr gives the shortest string that parses back to the same float
        return [str(self.epoch)] + [repr(float(v)) for v in astuple(self)[1:]]

    @classmethod
    def parse(cls, cells: list[str]) -> "MetricsRow":
        if len(cells) != len(METRICS_HEADER):
            raise FormatError(f"metrics row has {len(cells)} cells, expected {len(METRICS_HEADER)}")
        try:
            return cls(int(cells[0]), *(float(c) for c in cells[1:]))
        except ValueError as e:
            raise FormatError(f"bad metrics row {cells}: {e}") from e


class MetricsWriter:
    """Append-only CSV; every row is flushed as soon as it is written."""

    def __init__(self, path: str | Path, *, append: bool = False) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        resume = append and self.path.exists() and self.path.stat().st_size > 0
        self._fh: IO[str] = open(self.path, "a" if resume else "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        if not resume:
            self._writer.writerow(METRICS_HEADER)
            self._fh.flush()

    def write(self, row: MetricsRow) -> None:
        self._writer.writerow(row.cells())
        self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "MetricsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_metrics(path: str | Path) -> list[MetricsRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != METRICS_HEADER:
            raise FormatError(f"{path}: expected header {','.join(METRICS_HEADER)}, got {header}")
        return [MetricsRow.parse(cells) for cells in reader if cells]
