import pytest

import fkstates as fk

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.append((mark.args[0], mark.args[1], rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    merged = {}
    for n, text, outcome in _CRITERIA:
        text0, ok = merged.get(n, (text, True))
        merged[n] = (text0, ok and outcome == "passed")
    for n in sorted(merged):
        text, ok = merged[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {text}")


_ANALYSES = {}


@pytest.fixture(scope="session")
def analyzed():
    """Cached (records, ctx, report) for presets at p=1, q=2, density 64."""

    def get(name, density=64):
        key = (name, density)
        if key not in _ANALYSES:
            _ANALYSES[key] = fk.analyze(fk.preset(name), 1, 2, density=density)
        return _ANALYSES[key]

    return get


PRESETS = ["standard:1", "standard:12", "threeharmonic:1.2", "example4"]
