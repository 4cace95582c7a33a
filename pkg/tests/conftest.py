"""Print one pass/fail line per acceptance criterion at the end of the run."""

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _ACCEPTANCE.get(report.nodeid)
        if prev is None or prev[0] == "PASS":
            _ACCEPTANCE[report.nodeid] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (status, secs) in sorted(_ACCEPTANCE.items()):
        name = nodeid.split("::")[-1].removeprefix("test_")
        terminalreporter.write_line(f"{status}  {name}  ({secs:.1f}s)")
