import pytest

from quasifold import fixtures

_acceptance: dict[int, list[tuple[str, str]]] = {}
_titles: dict[int, str] = {}


@pytest.fixture(params=sorted(fixtures.ALL_SIMPLE))
def simple_polytope(request):
    return fixtures.ALL_SIMPLE[request.param]()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        _acceptance.setdefault(marker, []).append((report.nodeid, report.outcome))


def pytest_runtest_setup(item):
    m = item.get_closest_marker("acceptance")
    if m:
        item.user_properties.append(("acceptance", m.args[0]))
        _titles[m.args[0]] = m.args[1] if len(m.args) > 1 else ""


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        outcomes = [o for _, o in _acceptance[n]]
        ok = all(o == "passed" for o in outcomes)
        passed = sum(o == "passed" for o in outcomes)
        terminalreporter.write_line(
            f"criterion {n}: {'PASS' if ok else 'FAIL'}  {_titles.get(n, '')} ({passed}/{len(outcomes)} tests)")
