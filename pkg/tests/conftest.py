from __future__ import annotations

import time

import pytest

from arithfuchs.catalog import load_catalog
from arithfuchs.ford import ford_pipeline
from arithfuchs.orders import maximal_order

# criterion number -> (status, detail), filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}

_FORD_CACHE: dict[tuple[str, str], tuple[object, float]] = {}


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def ford_run(catalog):
    """Run the Ford pipeline once per (field, algebra) and share it across tests."""

    def run(field_key: str, algebra_key: str):
        key = (field_key, algebra_key)
        if key not in _FORD_CACHE:
            t0 = time.perf_counter()
            O = maximal_order(catalog.algebra(field_key, algebra_key))
            res = ford_pipeline(O)
            _FORD_CACHE[key] = (res, time.perf_counter() - t0)
        return _FORD_CACHE[key]

    return run


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str) -> None:
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE[number] = (status, detail)
        print(f"criterion {number}: {status} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status} - {detail}")
