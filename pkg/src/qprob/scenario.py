"""Scenario-document parsing: JSON structures into domain objects.

One ingestion path for every front end.  Matrices are nested row-major
arrays whose entries are either bare reals or two-element [re, im] pairs;
kets are amplitude lists (same entry format) and are normalized before
being turned into projectors.

Structural problems raise :class:`ParseError` with a field path such as
``ensemble[1].matrix[0][2]``; physics-level problems (non-positive
operators, bad priors, ...) surface as the domain errors of the core
modules.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

import numpy as np

from .measurement import MeasurementProcedure
from .operators import DensityOperator, PositiveOperator, StateVector, projector
from .probability import PreparationEnsemble

__all__ = [
    "ParseError",
    "parse_matrix",
    "parse_ket",
    "state_from_spec",
    "ensemble_from_spec",
    "procedure_from_spec",
]


class ParseError(Exception):
    """A scenario document is structurally malformed."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _parse_entry(value: Any, path: str) -> complex:
    if isinstance(value, bool):
        raise ParseError(path, "expected a number or [re, im] pair, got a boolean")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, Sequence) and not isinstance(value, (str, bytes)):
        if len(value) != 2:
            raise ParseError(path, f"complex entries need exactly [re, im], got {len(value)} items")
        re, im = value
        if isinstance(re, bool) or isinstance(im, bool):
            raise ParseError(path, "complex components must be numbers")
        if not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
            raise ParseError(path, "complex components must be numbers")
        return complex(float(re), float(im))
    raise ParseError(path, f"expected a number or [re, im] pair, got {type(value).__name__}")


def parse_matrix(data: Any, dim: int, path: str) -> np.ndarray:
    """Row-major matrix literal into a dim x dim complex array."""
    if not isinstance(data, Sequence) or isinstance(data, (str, bytes)):
        raise ParseError(path, "expected a list of rows")
    if len(data) != dim:
        raise ParseError(path, f"expected {dim} rows, got {len(data)}")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, Sequence) or isinstance(row, (str, bytes)):
            raise ParseError(f"{path}[{i}]", "expected a list of entries")
        if len(row) != dim:
            raise ParseError(f"{path}[{i}]", f"expected {dim} entries, got {len(row)}")
        for j, value in enumerate(row):
            out[i, j] = _parse_entry(value, f"{path}[{i}][{j}]")
    return out


def parse_ket(data: Any, dim: int, path: str) -> StateVector:
    """Amplitude-list literal into a normalized state vector."""
    if not isinstance(data, Sequence) or isinstance(data, (str, bytes)):
        raise ParseError(path, "expected a list of amplitudes")
    if len(data) != dim:
        raise ParseError(path, f"expected {dim} amplitudes, got {len(data)}")
    amplitudes = np.array(
        [_parse_entry(value, f"{path}[{idx}]") for idx, value in enumerate(data)],
        dtype=complex,
    )
    norm = float(np.linalg.norm(amplitudes))
    if norm <= 0.0:
        raise ParseError(path, "ket must not be the zero vector")
    return StateVector(amplitudes / norm)


def state_from_spec(spec: Any, dim: int, path: str) -> DensityOperator:
    """A {'matrix': ...} or {'ket': ...} record into a density operator."""
    if not isinstance(spec, Mapping):
        raise ParseError(path, "expected an object with a 'matrix' or 'ket' field")
    has_matrix = spec.get("matrix") is not None
    has_ket = spec.get("ket") is not None
    if has_matrix == has_ket:
        raise ParseError(path, "exactly one of 'matrix' or 'ket' is required")
    if has_ket:
        return DensityOperator(projector(parse_ket(spec["ket"], dim, f"{path}.ket")).matrix)
    return DensityOperator(parse_matrix(spec["matrix"], dim, f"{path}.matrix"))


def ensemble_from_spec(entries: Any, dim: int, path: str = "ensemble") -> PreparationEnsemble:
    """List of {label, prior, matrix|ket} records into an ensemble."""
    if not isinstance(entries, Sequence) or isinstance(entries, (str, bytes)):
        raise ParseError(path, "expected a list of ensemble entries")
    if not entries:
        raise ParseError(path, "the ensemble must not be empty")
    rows = []
    for index, entry in enumerate(entries):
        entry_path = f"{path}[{index}]"
        if not isinstance(entry, Mapping):
            raise ParseError(entry_path, "expected an object")
        label = entry.get("label")
        if not isinstance(label, str) or not label:
            raise ParseError(f"{entry_path}.label", "a non-empty string label is required")
        prior = entry.get("prior")
        if isinstance(prior, bool) or not isinstance(prior, (int, float)):
            raise ParseError(f"{entry_path}.prior", "a numeric prior is required")
        rows.append((label, float(prior), state_from_spec(entry, dim, entry_path)))
    return PreparationEnsemble(rows)


def procedure_from_spec(outcomes: Any, dim: int, path: str = "procedure") -> MeasurementProcedure:
    """List of {label, matrix} records into a measurement procedure."""
    if not isinstance(outcomes, Sequence) or isinstance(outcomes, (str, bytes)):
        raise ParseError(path, "expected a list of outcomes")
    if not outcomes:
        raise ParseError(path, "the procedure must not be empty")
    rows = []
    for index, outcome in enumerate(outcomes):
        outcome_path = f"{path}[{index}]"
        if not isinstance(outcome, Mapping):
            raise ParseError(outcome_path, "expected an object")
        label = outcome.get("label")
        if not isinstance(label, str) or not label:
            raise ParseError(f"{outcome_path}.label", "a non-empty string label is required")
        if outcome.get("matrix") is None:
            raise ParseError(f"{outcome_path}.matrix", "an outcome matrix is required")
        matrix = parse_matrix(outcome["matrix"], dim, f"{outcome_path}.matrix")
        rows.append((label, PositiveOperator(matrix)))
    return MeasurementProcedure(rows)
