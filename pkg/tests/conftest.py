import math

import pytest

NU_VALUES = (0.6, math.sqrt(5) / 2, 2.5)

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.fixture(params=NU_VALUES, ids=lambda v: f"nu={v:.4f}")
def nu(request):
    return request.param


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    num, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "observed")
    _CRITERIA.setdefault(num, []).append((title, rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        rows = _CRITERIA[num]
        ok = all(r[1] for r in rows)
        details = " | ".join(r[2] for r in rows if r[2])
        terminalreporter.write_line(f"criterion {num} [{'PASS' if ok else 'FAIL'}] {rows[0][0]}: {details}")
