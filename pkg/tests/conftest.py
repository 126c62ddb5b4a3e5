import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.kwargs:
        return
    key = (marker.kwargs["criterion"], marker.kwargs["title"])
    if report.when == "call" or report.failed:
        ok = report.passed and _RESULTS.get(key, True)
        _RESULTS[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_RESULTS.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}: {title}")
