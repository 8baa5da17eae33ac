import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion.

    Usage: ``criterion(number, description)`` returns a dict the test fills
    with ``detail``; the outcome is taken from the test result.
    """
    record = {}

    def start(number, description):
        record.update(number=number, description=description, detail="")
        return record

    yield start
    if record:
        rep = getattr(request.node, "rep_call", None)
        passed = rep is not None and rep.passed
        ACCEPTANCE_LINES[record["number"]] = (passed, record["description"], record["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        passed, description, detail = ACCEPTANCE_LINES[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {description}  [{detail}]")
