from __future__ import annotations

import logging
import queue
import threading
from typing import Generic, Iterable, Iterator, TypeVar

from lrnet_core.framework.concurrency.models import ProducerFailure
from lrnet_core.framework.guard import Guard

log = logging.getLogger(__name__)

T = TypeVar("T")

_DONE = object()  # sentinel: producer exhausted


class Prefetcher(Generic[T]):
    """
    Runs an iterable on a daemon thread, `depth` items ahead of the consumer.

    Items come out in production order. An exception raised by the producer is
    re-raised on the consuming thread at the point it occurred. depth=0 makes
    the prefetcher a plain pass-through with no thread.

        with Prefetcher(batches(ds, it, epoch), depth=2) as stream:
            for x, y in stream:
                ...
    """

    def __init__(self, source: Iterable[T], *, depth: int = 2, name: str = "prefetch") -> None:
        if depth < 0:
            Guard.check(False, f"prefetch depth must be >= 0, got {depth}")
        self._source = source
        self._depth = depth
        self._name = name
        self._stop = threading.Event()
        self._queue: queue.Queue[object] = queue.Queue(maxsize=max(depth, 1))
        self._thread: threading.Thread | None = None

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def __iter__(self) -> Iterator[T]:
        if self._depth == 0:
            yield from self._source
            return

        self._start()
        while True:
            item = self._queue.get()
            if item is _DONE:
                return
            if isinstance(item, ProducerFailure):
                raise item.error
            yield item  # type: ignore[misc]

    def close(self, timeout: float = 5.0) -> None:
        """Stop the producer and drain whatever it left behind."""
        self._stop.set()
        if self._thread is None:
            return
        while self._thread.is_alive():
            try:
                self._queue.get_nowait()
            except queue.Empty:
                self._thread.join(timeout=0.05)
        self._thread.join(timeout=timeout)

    def __enter__(self) -> "Prefetcher[T]":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # ------------------------------------------------------------------
    # Internal
    # ------------------------------------------------------------------

    def _start(self) -> None:
        if self._thread is not None:
            raise RuntimeError(f"prefetcher {self._name!r} can only be iterated once")
        self._thread = threading.Thread(target=self._produce, daemon=True, name=self._name)
        self._thread.start()

    def _put(self, item: object) -> bool:
        while not self._stop.is_set():
            try:
                self._queue.put(item, timeout=0.05)
                return True
            except queue.Full:
                continue
        return False

    def _produce(self) -> None:
        try:
            for item in self._source:
                if not self._put(item):
                    return
        except BaseException as exc:
            log.debug("producer %s failed: %r", self._name, exc)
            self._put(ProducerFailure(exc))
            return
        self._put(_DONE)
