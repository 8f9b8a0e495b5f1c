import pytest

from lowsum.graphs import SpanningForest, gen_forest, validate_labeling

_acceptance = []


@pytest.fixture
def L4():
    """c(12)=c(13)=c(14)=+1, c(23)=c(24)=c(34)=-1."""
    return validate_labeling(4, [(1, 2, 1), (1, 3, 1), (1, 4, 1), (2, 3, -1), (2, 4, -1), (3, 4, -1)])


@pytest.fixture
def P3():
    """Path 1-2-3 plus the isolated vertex 4."""
    return SpanningForest(4, [(1, 2), (2, 3)])


@pytest.fixture
def star4():
    return gen_forest(4, "star")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and (report.when == "call" or (report.when == "setup" and report.failed)):
        number, title = marker.args
        _acceptance.append((number, title, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(_acceptance):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title}")
