import itertools

import pytest

from clan.fixtures import karate_club, two_triangles

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if not marker:
        return
    n, title = marker
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True})
    entry["ok"] &= report.passed


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}")


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


@pytest.fixture
def lines_file(tmp_path):
    counter = itertools.count()

    def make(lines, suffix=".txt"):
        return write_lines(tmp_path / f"f{next(counter)}{suffix}", lines)

    return make


@pytest.fixture
def triangles():
    return two_triangles()


@pytest.fixture
def karate():
    return karate_club()
