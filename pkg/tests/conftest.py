import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]

_acceptance: dict[str, list[tuple[str, str, str]]] = {}


@pytest.fixture(scope="session")
def programs_dir() -> Path:
    return ROOT / "programs"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return ROOT / "tests" / "golden"


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    _acceptance.setdefault(crit, []).append((name, report.outcome, getattr(report, "wall", "")))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        rep.criterion = marker.args[0]
        rep.wall = f"{call.duration:.2f}s"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test checks")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_acceptance, key=lambda c: int(c[2:])):
        parts = _acceptance[crit]
        ok = all(o == "passed" for _, o, _ in parts)
        detail = ", ".join(f"{n.removeprefix('test_')} {o} ({w})" for n, o, w in parts)
        tr.write_line(f"{crit:5s} {'PASS' if ok else 'FAIL'}  {detail}")
