from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

import corpus

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parents[1] / "src" / "pfc" / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter) -> None:
    if not corpus.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(corpus.RESULTS):
        passed, detail = corpus.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
