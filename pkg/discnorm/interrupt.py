from __future__ import annotations

import signal
import threading
from collections.abc import Callable


class InterruptController:
    """Route Ctrl-C to a callback while a command runs; a second Ctrl-C aborts hard."""

    def __init__(self, on_interrupt: Callable[[], None]) -> None:
        self._on_interrupt = on_interrupt
        self._previous = None
        self._installed = False
        self._presses = 0
        self._lock = threading.Lock()

    def start(self) -> None:
        with self._lock:
            if self._installed:
                return
            # Signal handlers can only be installed from the main thread.
            if threading.current_thread() is not threading.main_thread():
                return
            self._previous = signal.signal(signal.SIGINT, self._on_signal)
            self._installed = True

    def stop(self) -> None:
        with self._lock:
            installed = self._installed
            previous = self._previous
            self._installed = False
            self._previous = None

        if installed:
            signal.signal(signal.SIGINT, previous if previous is not None else signal.SIG_DFL)

    def __enter__(self) -> InterruptController:
        self.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()

    def _on_signal(self, signum: int, frame) -> None:
        if signum != signal.SIGINT:
            return
        self._presses += 1
        if self._presses > 1:
            raise KeyboardInterrupt
        self._on_interrupt()
