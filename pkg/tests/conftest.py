from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
GOLDEN = ROOT / "tests" / "golden"

_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": [], "details": []})


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    entry = _criteria[number]
    entry["title"] = title
    entry["outcomes"].append(rep.passed)
    entry["details"].extend(f"{k}={v}" for k, v in item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if all(entry["outcomes"]) else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"[{status}] AC{number} {entry['title']}" + (f" ({detail})" if detail else ""))
