from __future__ import annotations

import sys
from collections.abc import Iterator
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from discnorm.grid_engine import cancel_event  # noqa: E402


@pytest.fixture(autouse=True)
def clear_cancel_event() -> Iterator[None]:
    """Grid evaluations share one process-wide stop flag; start every test with it clear."""
    cancel_event().clear()
    yield
    cancel_event().clear()
