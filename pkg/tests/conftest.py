import pytest

from support import path3, triangle

_criteria: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion listed in the summary")


@pytest.fixture
def tri():
    return triangle()


@pytest.fixture
def path():
    return path3()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    detail = dict(item.user_properties).get("detail", "")
    _criteria.append(("PASS" if rep.passed else "FAIL", marker.args[0], detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, name, detail in _criteria:
        terminalreporter.write_line(f"[{outcome}] {name}" + (f"  ({detail})" if detail else ""))
