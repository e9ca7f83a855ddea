"""Shared fixtures and the acceptance-criteria reporting hook."""

from __future__ import annotations

import numpy as np
import pytest

import qprob as q


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, name): acceptance criterion metadata"
    )


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker:
        item.user_properties.append(("criterion", (marker.args[0], marker.args[1])))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion, printed after the run."""
    rows = set()
    for status, outcome in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            for key, value in getattr(report, "user_properties", []):
                if key == "criterion":
                    rows.add((value[0], value[1], outcome))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for number, name, outcome in sorted(rows):
            terminalreporter.write_line(f"criterion {number:2d} [{name}]: {outcome}")


@pytest.fixture
def ket0() -> q.StateVector:
    return q.basis_state(2, 0)


@pytest.fixture
def ket1() -> q.StateVector:
    return q.basis_state(2, 1)


@pytest.fixture
def ket_plus() -> q.StateVector:
    return q.StateVector(np.array([1.0, 1.0]) / np.sqrt(2.0))


@pytest.fixture
def proj0(ket0) -> q.PositiveOperator:
    return q.projector(ket0)


@pytest.fixture
def proj1(ket1) -> q.PositiveOperator:
    return q.projector(ket1)


@pytest.fixture
def proj_plus(ket_plus) -> q.PositiveOperator:
    return q.projector(ket_plus)


@pytest.fixture
def skew_procedure(proj0, proj_plus) -> q.MeasurementProcedure:
    """The non-standard workhorse: {m0: |0><0|, m1: |+><+|}."""
    return q.MeasurementProcedure([("m0", proj0), ("m1", proj_plus)])


@pytest.fixture
def zero_plus_ensemble(proj0, proj_plus) -> q.PreparationEnsemble:
    """Equal mixture of |0> and |+> preparations."""
    return q.PreparationEnsemble(
        [
            ("s0", 0.5, q.DensityOperator(proj0.matrix)),
            ("s1", 0.5, q.DensityOperator(proj_plus.matrix)),
        ]
    )
