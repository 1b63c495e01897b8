from __future__ import annotations

from fractions import Fraction

import pytest

from qfinder.catalog import power_potential
from qfinder.constraints import Potential
from qfinder.geometry import GeometryConfig

_ACCEPTANCE: list[str] = []


def kepler_family(n: int, k, ell: int) -> Potential:
    return Potential(n, power_potential(n, Fraction(k), ell))


@pytest.fixture
def e3():
    return GeometryConfig(3)


@pytest.fixture
def e2():
    return GeometryConfig(2)


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
