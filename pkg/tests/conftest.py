from __future__ import annotations

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance_record():
    """Record one criterion outcome; all outcomes are repeated in the terminal summary."""

    def record(name: str, ok: bool, detail: str) -> None:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        _ACCEPTANCE.append((name, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
