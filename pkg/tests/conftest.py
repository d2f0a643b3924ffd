import pytest

import conjugacy
from conjugacy import linearize

# every chart built during the session, audited at the end of the run
CHARTS = []

_koenigs, _extend = linearize.koenigs, linearize.extend_basin


def _recording(fn):
    def wrapper(*args, **kwargs):
        chart = fn(*args, **kwargs)
        CHARTS.append(chart)
        return chart

    wrapper.__wrapped__ = fn
    wrapper.__doc__ = fn.__doc__
    return wrapper


linearize.koenigs = conjugacy.koenigs = _recording(_koenigs)
linearize.extend_basin = conjugacy.extend_basin = _recording(_extend)

_ACCEPTANCE = {}


def pytest_addoption(parser):
    parser.addoption("--update-golden", action="store_true", default=False,
                     help="rewrite CLI golden files instead of comparing")


def pytest_configure(config):
    for n in range(1, 11):
        config.addinivalue_line("markers", f"criterion_{n}: acceptance criterion {n}")


@pytest.fixture
def update_golden(request):
    return request.config.getoption("--update-golden")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key in report.keywords:
        if key.startswith("criterion_"):
            n = int(key.split("_")[1])
            prev = _ACCEPTANCE.get(n, True)
            _ACCEPTANCE[n] = prev and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if _ACCEPTANCE[n] else 'FAIL'}")
