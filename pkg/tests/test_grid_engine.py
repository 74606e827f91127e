from __future__ import annotations

import threading

import numpy as np
import pytest

from discnorm.errors import ComputationCancelled
from discnorm.grid_engine import (
    THREADS_ENV,
    GridWorker,
    evaluate_on_grid,
    resolve_thread_count,
)


def test_grid_result_does_not_depend_on_thread_count() -> None:
    points = np.linspace(0.0, 0.99, 1001).reshape(7, 143)

    single = evaluate_on_grid(np.sqrt, points, chunk_size=50, threads=1)
    many = evaluate_on_grid(np.sqrt, points, chunk_size=50, threads=4)

    assert single.shape == (7, 143)
    assert np.array_equal(single, many)
    assert np.array_equal(single, np.sqrt(points))


def test_grid_keeps_complex_dtype() -> None:
    z = np.array([0.5, 0.5j, -0.25])

    values = evaluate_on_grid(lambda x: x * x, z, dtype=complex, threads=2)

    assert values.dtype == complex
    assert values == pytest.approx(z * z)


def test_grid_reports_errors_from_workers() -> None:
    def fn(_points: np.ndarray) -> np.ndarray:
        raise RuntimeError("evaluation failed")

    with pytest.raises(RuntimeError, match="evaluation failed"):
        evaluate_on_grid(fn, np.zeros(100), chunk_size=10, threads=3)


def test_grid_stops_when_cancelled() -> None:
    stop_event = threading.Event()
    calls: list[int] = []

    def fn(points: np.ndarray) -> np.ndarray:
        calls.append(points.size)
        stop_event.set()
        return points

    with pytest.raises(ComputationCancelled):
        evaluate_on_grid(fn, np.zeros(100), chunk_size=10, threads=1, stop_event=stop_event)
    assert calls == [10]


def test_grid_worker_reports_errors() -> None:
    captured_errors: list[Exception] = []
    out = np.zeros(4)

    def fn(_points: np.ndarray) -> np.ndarray:
        raise ValueError("bad chunk")

    worker = GridWorker(
        fn,
        np.zeros(4),
        out,
        [slice(0, 2), slice(2, 4)],
        stop_event=threading.Event(),
        abort_event=threading.Event(),
        on_error=captured_errors.append,
    )
    worker.start()
    worker.join(timeout=1.0)

    assert not worker.is_alive()
    assert len(captured_errors) == 1
    assert str(captured_errors[0]) == "bad chunk"


def test_grid_worker_skips_chunks_after_abort() -> None:
    abort_event = threading.Event()
    abort_event.set()
    out = np.full(4, -1.0)

    worker = GridWorker(
        np.sqrt,
        np.ones(4),
        out,
        [slice(0, 4)],
        stop_event=threading.Event(),
        abort_event=abort_event,
        on_error=None,
    )
    worker.run()

    assert np.all(out == -1.0)


def test_empty_grid() -> None:
    values = evaluate_on_grid(np.sqrt, np.zeros((0, 3)))

    assert values.shape == (0, 3)


def test_chunk_size_must_be_positive() -> None:
    with pytest.raises(ValueError):
        evaluate_on_grid(np.sqrt, np.zeros(3), chunk_size=0)


@pytest.mark.parametrize(
    ("raw", "expected"),
    [("4", 4), (" 2 ", 2), ("0", 1), ("-3", 1), ("many", 1)],
)
def test_resolve_thread_count(raw: str, expected: int) -> None:
    assert resolve_thread_count({THREADS_ENV: raw}) == expected


def test_resolve_thread_count_defaults_to_cpu_count(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr("discnorm.grid_engine.os.cpu_count", lambda: 6)

    assert resolve_thread_count({}) == 6
    assert resolve_thread_count({THREADS_ENV: ""}) == 6
