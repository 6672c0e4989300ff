"""Request coalescing: a worker thread drains queued frames and runs them
through the model in one padded forward, up to the configured batch size.
Endpoint threads block on a future, so responses stay independent per
request while forwards amortize across concurrent callers."""

from __future__ import annotations

import queue
import threading
from concurrent.futures import Future
from typing import Sequence

from .model import ForwardResult, MaskedLm

_SHUTDOWN = object()


class Batcher:
    def __init__(self, model: MaskedLm, max_batch_size: int = 8, timeout: float = 120.0):
        if max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
        self.model = model
        self.max_batch_size = max_batch_size
        self.timeout = timeout
        self._queue: queue.SimpleQueue = queue.SimpleQueue()
        self._thread = threading.Thread(target=self._loop, name="scorer-batcher", daemon=True)
        self._thread.start()

    def submit(self, ids: Sequence[int]) -> ForwardResult:
        """Enqueue one frame and block until its forward result is ready."""
        future: Future = Future()
        self._queue.put((list(ids), future))
        return future.result(timeout=self.timeout)

    def close(self) -> None:
        self._queue.put(_SHUTDOWN)
        self._thread.join(timeout=5.0)

    def _loop(self) -> None:
        while True:
            item = self._queue.get()
            if item is _SHUTDOWN:
                return
            batch = [item]
            while len(batch) < self.max_batch_size:
                try:
                    extra = self._queue.get_nowait()
                except queue.Empty:
                    break
                if extra is _SHUTDOWN:
                    self._queue.put(_SHUTDOWN)
                    break
                batch.append(extra)
            try:
                results = self.model.forward_batch([ids for ids, _ in batch])
            except Exception as exc:  # propagate to every waiting caller
                for _, future in batch:
                    future.set_exception(exc)
                continue
            for (_, future), result in zip(batch, results):
                future.set_result(result)
