import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, tuple[str, str, float, str]] = {}
_SETUP: dict[str, float] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    failed = report.failed
    if report.when == "setup":
        # module fixtures do the heavy lifting for some criteria
        _SETUP[item.nodeid] = report.duration
    if report.when == "call" or (failed and n not in _CRITERIA):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        seconds = report.duration + _SETUP.get(item.nodeid, 0.0)
        _CRITERIA[n] = (title, "FAIL" if failed else "PASS", seconds, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status, seconds, detail = _CRITERIA[n]
        line = f"criterion {n}: {status}  {title} ({seconds:.2f} s)"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
