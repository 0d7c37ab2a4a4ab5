import re

import pytest

_CRITERIA = {}
_DETAILS = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[key] = report.outcome
        notes = [text for name, text in report.user_properties if name == "detail"]
        _DETAILS[key] = "; ".join(notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, name in sorted(_CRITERIA):
        status = "PASS" if _CRITERIA[num, name] == "passed" else "FAIL"
        detail = _DETAILS.get((num, name), "")
        terminalreporter.write_line(f"criterion {num:>2} {name:<32} {status}  {detail}")


@pytest.fixture
def detail(record_property):
    """Attach a short measurement note to the acceptance summary line."""
    def add(text):
        record_property("detail", text)
    return add
