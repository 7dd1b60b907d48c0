from __future__ import annotations

import pytest

from erpreserve.core import EntityType, ErModel, RelationshipType, sc

E = EntityType("E", "Ke", ("A1", "A2"))
S = EntityType("S", "Ks", ("A1", "A2"))


def binary(left, right, name: str = "R", entities=(E, S)) -> ErModel:
    """Two-entity model with one relationship; ``left``/``right`` are (min, max)."""
    a, b = entities
    rel = RelationshipType(name, a.name, b.name, sc(*left), sc(*right))
    return ErModel((a, b), (rel,))


@pytest.fixture
def total_left_1to1() -> ErModel:
    return binary((1, 1), (0, 1))


@pytest.fixture
def total_right_1to1() -> ErModel:
    return binary((0, 1), (1, 1))


@pytest.fixture
def left_one_1toN() -> ErModel:
    return binary((1, 1), (0, "N"))


@pytest.fixture
def many_to_many() -> ErModel:
    return binary((0, 2), (0, 3))


# -- acceptance summary -------------------------------------------------------

_criteria: list[tuple[int, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        _criteria.append((marker.args[0], marker.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    grouped: dict[int, tuple[str, list[str]]] = {}
    for number, title, outcome in _criteria:
        grouped.setdefault(number, (title, []))[1].append(outcome)
    terminalreporter.section("acceptance criteria")
    for number, (title, outcomes) in sorted(grouped.items()):
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        cases = f" ({len(outcomes)} cases)" if len(outcomes) > 1 else ""
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}{cases}")
