from pathlib import Path

import pytest

from fipsynth.io import load_game, load_twotape
from fipsynth.normalize import normalize

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

GAME_FIXTURES = ["peek", "sync-reach", "nosync-reach", "chain", "hier4"]
# the four games the knowledge construction is checked on exhaustively
KNOWLEDGE_FIXTURES = ["peek", "sync-reach", "chain", "hier4"]


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def game(name: str):
    return load_game(fixture_path(name))


def relation(name: str):
    return load_twotape(fixture_path(name))


_normalized = {}


def normalized(name: str):
    # normalization is deterministic; share it across tests
    if name not in _normalized:
        _normalized[name] = normalize(game(name))
    return _normalized[name]


@pytest.fixture
def peek():
    return game("peek")


@pytest.fixture
def peek_n():
    return normalized("peek")


# -- acceptance report: one line per criterion after the run ------------------------

_criteria: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "xfailed": [], "ran": 0})
    if report.when == "call" or report.outcome != "passed":
        if hasattr(report, "wasxfail"):
            entry["xfailed"].append(item.name)
        elif report.failed:
            entry["failed"].append(item.name)
        if report.when == "call":
            entry["ran"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        verdict = "FAIL" if e["failed"] or not e["ran"] else "PASS"
        line = f"criterion {number}: {verdict}  {e['title']}"
        if e["failed"]:
            line += f"  [failed: {', '.join(e['failed'])}]"
        if e["xfailed"]:
            line += f"  [expected failure, see notes: {', '.join(e['xfailed'])}]"
        terminalreporter.write_line(line)
