from __future__ import annotations

import logging
import os
import threading
from collections.abc import Callable

import numpy as np

from .errors import ComputationCancelled

logger = logging.getLogger(__name__)

THREADS_ENV = "DISCNORM_THREADS"
DEFAULT_CHUNK = 8192

_cancel_event = threading.Event()


def cancel_event() -> threading.Event:
    """Process-wide stop signal observed by every grid evaluation."""
    return _cancel_event


def resolve_thread_count(environ: dict[str, str] | None = None) -> int:
    env = os.environ if environ is None else environ
    raw = env.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return max(1, os.cpu_count() or 1)
    try:
        count = int(raw.strip())
    except ValueError:
        logger.warning("%s=%r is not an integer; using 1 thread.", THREADS_ENV, raw)
        return 1
    if count < 1:
        logger.warning("%s=%r must be at least 1; using 1 thread.", THREADS_ENV, raw)
        return 1
    return count


class GridWorker(threading.Thread):
    """Evaluate a share of the chunks of a flat point array into a shared output."""

    def __init__(
        self,
        fn: Callable[[np.ndarray], np.ndarray],
        points: np.ndarray,
        out: np.ndarray,
        chunks: list[slice],
        stop_event: threading.Event,
        abort_event: threading.Event,
        on_error: Callable[[Exception], None] | None,
    ) -> None:
        super().__init__(name="GridWorker", daemon=True)
        self._fn = fn
        self._points = points
        self._out = out
        self._chunks = chunks
        self._stop_event = stop_event
        self._abort_event = abort_event
        self._on_error = on_error

    def run(self) -> None:
        for chunk in self._chunks:
            if self._stop_event.is_set() or self._abort_event.is_set():
                break
            try:
                self._out[chunk] = self._fn(self._points[chunk])
            except Exception as exc:  # noqa: BLE001
                if self._on_error is not None:
                    self._on_error(exc)
                break


def evaluate_on_grid(
    fn: Callable[[np.ndarray], np.ndarray],
    points,
    *,
    dtype=float,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
    stop_event: threading.Event | None = None,
) -> np.ndarray:
    """Apply an elementwise vectorised fn to every point, in parallel chunks.

    Each chunk writes its own slice of the output, so the result does not depend on the
    number of threads or their scheduling.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1.")
    array = np.asarray(points)
    flat = array.reshape(-1)
    out = np.empty(flat.shape, dtype=dtype)
    chunks = [slice(i, min(i + chunk_size, flat.size)) for i in range(0, flat.size, chunk_size)]
    stop = cancel_event() if stop_event is None else stop_event
    abort = threading.Event()
    errors: list[Exception] = []
    lock = threading.Lock()

    def on_error(exc: Exception) -> None:
        with lock:
            errors.append(exc)
        abort.set()

    count = min(threads or resolve_thread_count(), len(chunks))
    if count <= 1:
        GridWorker(fn, flat, out, chunks, stop, abort, on_error).run()
    else:
        workers = [
            GridWorker(fn, flat, out, chunks[k::count], stop, abort, on_error)
            for k in range(count)
        ]
        for worker in workers:
            worker.start()
        for worker in workers:
            worker.join()

    if errors:
        raise errors[0]
    if stop.is_set():
        raise ComputationCancelled("Grid evaluation was interrupted.")
    return out.reshape(array.shape)
