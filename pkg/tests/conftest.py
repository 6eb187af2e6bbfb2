from __future__ import annotations

import functools

import pytest

from polyterm.search import corpus

_CRITERIA: list[tuple[int, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@functools.lru_cache(maxsize=None)
def acceptance_corpus() -> tuple:
    """All univariate pairs (degree <= 2, coefficients 0..2) plus all
    bivariate pairs whose polynomials have at most two monomials."""
    seen = {}
    for pair in corpus(n_vars=1):
        seen.setdefault(pair, None)
    for pair in corpus(n_vars=2, max_terms=2):
        seen.setdefault(pair, None)
    return tuple(seen)


@pytest.fixture(scope="session")
def pairs():
    return acceptance_corpus()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        number, title = marker.args
        _CRITERIA.append((number, title, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, outcome, duration in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number}: {title} ({duration:.2f}s)")
