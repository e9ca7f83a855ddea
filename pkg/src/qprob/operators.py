"""Finite-dimensional operator algebra on complex matrices.

Immutable wrappers around read-only numpy arrays, validated at construction:
Hermitian operators, positive operators, density operators, unitaries and
state vectors.  All functions here are pure; instances can be shared freely
across threads.

Hermitian matrices are stored exactly conjugate-symmetric: the input may
deviate from symmetry by at most the hermiticity tolerance and is then
replaced by (A + A^dag)/2, so sums and products of validated operators do
not accumulate symmetry drift.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .config import tolerances
from .errors import (
    DimensionMismatchError,
    InternalConsistencyError,
    NotPositiveError,
    ValidationError,
)

__all__ = [
    "HermitianOperator",
    "PositiveOperator",
    "DensityOperator",
    "UnitaryOperator",
    "StateVector",
    "EigenDecomposition",
    "identity",
    "basis_state",
    "trace_product",
    "eigh",
    "check_positive",
    "tensor_product",
    "projector",
    "positive_power",
    "random_hermitian",
    "random_positive",
    "random_density",
    "random_unitary",
    "random_state",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError(f"{what} contains non-finite entries")


class HermitianOperator:
    """A d x d complex matrix equal to its conjugate transpose."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix) -> None:
        arr = np.asarray(matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValidationError("operator dimension must be at least 1")
        _require_finite(arr, "operator")
        gap = float(np.max(np.abs(arr - arr.conj().T)))
        if gap > tolerances().hermitian:
            raise ValidationError(f"matrix is not Hermitian: max |A - A^dag| = {gap:.3e}")
        self._matrix = _readonly((arr + arr.conj().T) / 2.0)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class PositiveOperator(HermitianOperator):
    """Hermitian operator with non-negative spectrum (within tolerance).

    Eigenvalues inside [-positivity_tolerance, 0) are kept as stored matrix
    entries but treated as zero by spectral consumers (``positive_power``,
    ``clamped_eigenvalues``).
    """

    __slots__ = ("_eigenvalues",)

    def __init__(self, matrix) -> None:
        super().__init__(matrix)
        values = np.linalg.eigvalsh(self._matrix)
        lam_min = float(values[0])
        if lam_min < -tolerances().positivity:
            raise NotPositiveError(lam_min)
        values.setflags(write=False)
        self._eigenvalues = values

    @property
    def eigenvalues(self) -> np.ndarray:
        """Spectrum in ascending order, as validated at construction."""
        return self._eigenvalues

    @property
    def clamped_eigenvalues(self) -> np.ndarray:
        return np.maximum(self._eigenvalues, 0.0)

    @property
    def min_eigenvalue(self) -> float:
        return float(self._eigenvalues[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(self._eigenvalues[-1])

    def trace(self) -> float:
        return float(self._matrix.trace().real)


class DensityOperator(PositiveOperator):
    """Positive operator with unit trace; a predictive or retrodictive state."""

    __slots__ = ()

    def __init__(self, matrix) -> None:
        super().__init__(matrix)
        tr = self.trace()
        if abs(tr - 1.0) > tolerances().trace:
            raise ValidationError(f"density operator must have unit trace, got {tr!r}")


class UnitaryOperator:
    """A d x d complex matrix with U U^dag = identity (within tolerance)."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix) -> None:
        arr = np.asarray(matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValidationError("operator dimension must be at least 1")
        _require_finite(arr, "unitary")
        gap = float(np.max(np.abs(arr @ arr.conj().T - np.eye(arr.shape[0]))))
        if gap > tolerances().unitarity:
            raise ValidationError(f"matrix is not unitary: max |U U^dag - I| = {gap:.3e}")
        self._matrix = _readonly(arr)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def column(self, index: int) -> StateVector:
        """Basis vector ``index`` of the orthonormal basis formed by the columns."""
        return StateVector(self._matrix[:, index])

    def __repr__(self) -> str:
        return f"UnitaryOperator(dim={self.dim})"


class StateVector:
    """A normalized complex amplitude vector."""

    __slots__ = ("_amplitudes",)

    def __init__(self, amplitudes) -> None:
        arr = np.asarray(amplitudes, dtype=complex)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValidationError(f"expected a 1-d amplitude vector, got shape {arr.shape}")
        _require_finite(arr, "state vector")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > tolerances().state_norm:
            raise ValidationError(f"state vector must be normalized, got norm {norm!r}")
        self._amplitudes = _readonly(arr)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def dim(self) -> int:
        return self._amplitudes.shape[0]

    def expectation(self, operator: HermitianOperator) -> float:
        """<v|A|v> as a real number."""
        if operator.dim != self.dim:
            raise DimensionMismatchError(
                f"state of dimension {self.dim} vs operator of dimension {operator.dim}"
            )
        v = self._amplitudes
        return float(np.real(v.conj() @ operator.matrix @ v))

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim})"


class EigenDecomposition:
    """Ascending eigenvalues with an orthonormal eigenvector basis.

    The basis is stored as a matrix whose columns are the eigenvectors;
    orthonormality is required within 1e-10 at construction.
    """

    __slots__ = ("_eigenvalues", "_basis")

    _ORTHO_TOL = 1e-10

    def __init__(self, eigenvalues, basis) -> None:
        values = np.asarray(eigenvalues, dtype=float)
        vectors = np.asarray(basis, dtype=complex)
        d = values.shape[0]
        if vectors.shape != (d, d):
            raise ValidationError(
                f"basis shape {vectors.shape} does not match {d} eigenvalues"
            )
        if np.any(np.diff(values) < 0):
            raise ValidationError("eigenvalues must be in ascending order")
        gram_gap = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(d))))
        if gram_gap > self._ORTHO_TOL:
            raise ValidationError(f"eigenvector set is not orthonormal: gap {gram_gap:.3e}")
        values = values.copy()
        values.setflags(write=False)
        self._eigenvalues = values
        self._basis = _readonly(vectors)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigenvalues

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def eigenvectors(self) -> tuple[StateVector, ...]:
        return tuple(StateVector(self._basis[:, i]) for i in range(self._basis.shape[0]))

    def reconstruct(self) -> np.ndarray:
        """Sum of eigenvalue-weighted projectors, as a plain matrix."""
        v = self._basis
        return (v * self._eigenvalues) @ v.conj().T


def identity(dim: int) -> PositiveOperator:
    return PositiveOperator(np.eye(dim))


def basis_state(dim: int, index: int) -> StateVector:
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dimension {dim}")
    amp = np.zeros(dim, dtype=complex)
    amp[index] = 1.0
    return StateVector(amp)


def trace_product(a: HermitianOperator, b: HermitianOperator) -> float:
    """Re Tr(A B) for Hermitian A, B.

    Tr(AB) is real for Hermitian operands; the (round-off) imaginary part is
    checked against the internal-consistency bound before being discarded.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions {a.dim} and {b.dim} differ")
    value = complex(np.sum(a.matrix * b.matrix.T))
    if abs(value.imag) > tolerances().trace_imag:
        raise InternalConsistencyError(
            f"Tr(AB) of Hermitian operands has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def eigh(operator: HermitianOperator) -> EigenDecomposition:
    """Eigendecomposition with ascending eigenvalues."""
    try:
        values, vectors = np.linalg.eigh(operator.matrix)
    except np.linalg.LinAlgError as exc:  # iteration cap exceeded in LAPACK
        raise InternalConsistencyError(f"eigendecomposition did not converge: {exc}") from exc
    return EigenDecomposition(values, vectors)


def check_positive(operator: HermitianOperator) -> PositiveOperator:
    """Certify an operator as positive, or raise NotPositiveError.

    The error carries the offending minimum eigenvalue.  Eigenvalues within
    the positivity tolerance below zero are accepted (and clamped to zero by
    spectral consumers).
    """
    if isinstance(operator, PositiveOperator):
        return operator
    return PositiveOperator(operator.matrix)


def tensor_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Kronecker product; positive when both factors are positive."""
    product = np.kron(a.matrix, b.matrix)
    if isinstance(a, PositiveOperator) and isinstance(b, PositiveOperator):
        return PositiveOperator(product)
    return HermitianOperator(product)


def projector(state: StateVector) -> PositiveOperator:
    """Rank-1 projector |v><v| of a normalized state vector."""
    v = state.amplitudes
    return PositiveOperator(np.outer(v, v.conj()))


def positive_power(operator: PositiveOperator, exponent: float) -> PositiveOperator:
    """Spectral power of a positive operator.

    Eigenvalues within tolerance below zero are clamped to zero first.  For
    negative exponents every eigenvalue must exceed the positivity tolerance.
    """
    decomp = eigh(operator)
    values = np.maximum(decomp.eigenvalues, 0.0)
    if exponent < 0 and float(values[0]) <= tolerances().positivity:
        raise ValidationError(
            f"operator is numerically singular (min eigenvalue {values[0]:.3e}); "
            f"cannot raise to power {exponent}"
        )
    powered = values**exponent
    v = decomp.basis
    return PositiveOperator((v * powered) @ v.conj().T)


# -- seeded random ensembles -------------------------------------------------
#
# All generators accept either an integer seed or a numpy Generator, so they
# compose: callers that need several draws pass one Generator through.


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. standard complex Gaussian entries (unit total variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(dim: int, seed=None, scale: float = 1.0) -> HermitianOperator:
    g = _complex_gaussian(_rng(seed), (dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2.0)


def random_positive(dim: int, seed=None) -> PositiveOperator:
    """Unnormalized Wishart-style positive operator G G^dag."""
    g = _complex_gaussian(_rng(seed), (dim, dim))
    return PositiveOperator(g @ g.conj().T)


def random_density(dim: int, seed=None) -> DensityOperator:
    """Trace-normalized Ginibre construction: rho = G G^dag / Tr(G G^dag)."""
    if dim < 1:
        raise ValidationError("dimension must be at least 1")
    g = _complex_gaussian(_rng(seed), (dim, dim))
    w = g @ g.conj().T
    return DensityOperator(w / w.trace().real)


def random_state(dim: int, seed=None) -> StateVector:
    g = _complex_gaussian(_rng(seed), dim)
    return StateVector(g / np.linalg.norm(g))


def _orthonormalize(matrix: np.ndarray) -> np.ndarray | None:
    """Column-wise Gram-Schmidt with one re-orthogonalization pass.

    Returns None when a column is numerically dependent on its predecessors
    (so the caller can redraw).
    """
    q = matrix.astype(complex, copy=True)
    d = q.shape[0]
    for j in range(d):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i].conj() @ q[:, j]) * q[:, i]
        norm = np.linalg.norm(q[:, j])
        if norm < 1e-12:
            return None
        q[:, j] /= norm
    return q


def random_unitary(dim: int, seed=None) -> UnitaryOperator:
    """Seeded Haar-style unitary via Gram-Schmidt of a Gaussian matrix.

    The phase of each column is fixed by making its first non-negligible
    entry real positive, so the output is reproducible at the algorithmic
    level for a fixed seed.
    """
    if dim < 1:
        raise ValidationError("dimension must be at least 1")
    rng = _rng(seed)
    q = None
    while q is None:  # rank deficiency has probability zero; redraw regardless
        q = _orthonormalize(_complex_gaussian(rng, (dim, dim)))
    for j in range(dim):
        col = q[:, j]
        pivots = np.flatnonzero(np.abs(col) > 1e-12)
        phase = col[pivots[0]] / abs(col[pivots[0]])
        q[:, j] = col * phase.conjugate()
    return UnitaryOperator(q)
