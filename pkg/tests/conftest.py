import pytest

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, name): acceptance criterion id")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    num, name = mark.args
    detail = dict(item.user_properties).get("detail", "")
    prev = _RESULTS.get(num)
    ok = rep.passed and (prev is None or prev[1])
    _RESULTS[num] = (name, ok, detail if rep.passed else str(rep.longrepr).splitlines()[-1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        name, ok, detail = _RESULTS[num]
        tr.write_line(f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}")
