"""Shared pytest wiring.

Tests marked @pytest.mark.acceptance(name=...) are the release gate; the
terminal summary prints one PASS/FAIL line per named criterion so the
gate's verdict is readable without scrolling the full test listing.
"""

import pytest

_ACCEPTANCE_RESULTS: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): names the release criterion a test verifies"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.kwargs.get("name") or (marker.args[0] if marker.args else item.name)
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = report.passed and _ACCEPTANCE_RESULTS.get(name, True)
    elif report.failed:
        # setup/teardown crashes count as criterion failures too
        _ACCEPTANCE_RESULTS[name] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {name}")
