"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

import pytest

# criterion number -> (title, [(test name, outcome)])
_CRITERIA: dict[int, tuple[str, list[tuple[str, str]]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    # a failure in setup counts; otherwise only the call phase decides
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = mark.args
        _, parts = _CRITERIA.setdefault(number, (title, []))
        parts.append((item.name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, parts = _CRITERIA[number]
        status = "PASS" if all(o == "PASS" for _, o in parts) else "FAIL"
        tr.write_line(f"{status} criterion {number:2d}: {title}")
        if status == "FAIL" and len(parts) > 1:
            for name, o in parts:
                tr.write_line(f"       {o} {name}")
