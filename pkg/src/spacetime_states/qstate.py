"""Dense state vectors, density operators and the operations between them.

Tensor factors are ordered left to right: factor 0 is the leftmost slot and
basis indices are big-endian in factor order, so for two qubits the index of
``|a>|b>`` is ``2 * a + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import settings
from .errors import DimensionError, InvalidStateError, NotUnitaryError


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TensorFactorization:
    """Ordered dimensions of the tensor factors of a Hilbert space."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def uniform(cls, n: int, d: int = 2) -> "TensorFactorization":
        return cls([d] * n)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __add__(self, other: "TensorFactorization") -> "TensorFactorization":
        return TensorFactorization(self.dims + other.dims)

    def sub(self, indices: Sequence[int]) -> "TensorFactorization":
        return TensorFactorization([self.dims[i] for i in indices])

    def check(self, dim: int) -> None:
        if dim != self.dim:
            raise DimensionError(
                f"object of dimension {dim} does not match factorization {self.dims}"
            )

    def check_indices(self, indices: Sequence[int], what: str = "factor") -> list[int]:
        indices = [int(i) for i in indices]
        if not indices:
            raise DimensionError(f"no {what} indices given")
        if len(set(indices)) != len(indices):
            raise DimensionError(f"repeated {what} indices {indices}")
        bad = [i for i in indices if not 0 <= i < len(self.dims)]
        if bad:
            raise DimensionError(f"{what} indices {bad} out of range for {len(self.dims)} factors")
        return indices


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state."""

    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, amplitudes, *, check: bool = True):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise DimensionError("state vector must have positive dimension")
        if check:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > settings.norm_tol():
                raise InvalidStateError(f"state vector norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def product(cls, *factors) -> "StateVector":
        """Product state from per-factor amplitude vectors."""
        return cls(reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors]))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray = field(repr=False)

    def __init__(self, matrix, *, check: bool = True):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DimensionError(f"density operator must be square, got shape {mat.shape}")
        if check:
            _validate_density(mat)
        object.__setattr__(self, "matrix", _frozen(mat))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, probabilities) -> "DensityOperator":
        return cls(np.diag(np.asarray(probabilities, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending spectrum; drift in ``[-tol, 0)`` is clamped to zero."""
        return _clamped_spectrum(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, op) -> complex:
        op = op.matrix if isinstance(op, LinearOperator) else np.asarray(op)
        return complex(np.trace(self.matrix @ op))


@dataclass(frozen=True)
class LinearOperator:
    matrix: np.ndarray = field(repr=False)
    unitary: bool = False

    def __init__(self, matrix, unitary: bool = False):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DimensionError(f"operator must be square, got shape {mat.shape}")
        if unitary and not is_unitary(mat):
            raise NotUnitaryError("matrix flagged unitary fails U^dagger U = I")
        object.__setattr__(self, "matrix", _frozen(mat))
        object.__setattr__(self, "unitary", bool(unitary))

    @classmethod
    def identity(cls, dim: int) -> "LinearOperator":
        return cls(np.eye(dim), unitary=True)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "LinearOperator":
        return LinearOperator(self.matrix.conj().T, unitary=self.unitary)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.matrix @ other.matrix, unitary=self.unitary and other.unitary)


def is_unitary(matrix, atol: float | None = None) -> bool:
    matrix = np.asarray(matrix)
    atol = settings.tol() if atol is None else atol
    return bool(np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), rtol=0, atol=atol))


def _clamped_spectrum(matrix: np.ndarray) -> np.ndarray:
    evals = np.linalg.eigvalsh(matrix)
    tol = settings.tol()
    if evals.size and evals[0] < -tol:
        raise InvalidStateError(f"negative eigenvalue {evals[0]!r} below -{tol}")
    return np.where(evals < 0, 0.0, evals)


def _validate_density(mat: np.ndarray) -> None:
    tol = settings.tol()
    if not np.allclose(mat, mat.conj().T, rtol=0, atol=tol):
        raise InvalidStateError("density operator is not Hermitian")
    trace = np.trace(mat)
    if abs(trace - 1.0) > tol:
        raise InvalidStateError(f"density operator trace {trace!r} differs from 1")
    _clamped_spectrum(mat)


def tensor_product(a, b):
    """Kronecker product of two states or operators of the same kind."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix))
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        return LinearOperator(np.kron(a.matrix, b.matrix), unitary=a.unitary and b.unitary)
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def density_of(psi: StateVector) -> DensityOperator:
    """The projector ``|psi><psi|``; blind to global phase."""
    amps = psi.amplitudes
    return DensityOperator(np.outer(amps, amps.conj()), check=False)


def _keep_indices(f: TensorFactorization, keep) -> list[int]:
    return sorted(f.check_indices(list(keep)))


def partial_trace(rho: DensityOperator, f: TensorFactorization, keep) -> DensityOperator:
    """Reduce ``rho`` onto the factors in ``keep`` (returned in ascending order)."""
    f.check(rho.dim)
    keep = _keep_indices(f, keep)
    n = len(f)
    tensor = rho.matrix.reshape(f.dims + f.dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = keep + [n + i for i in keep]
    reduced = np.einsum(tensor, row + col, out)
    d = math.prod(f.dims[i] for i in keep)
    return DensityOperator(reduced.reshape(d, d), check=False)


def reduced_density(psi: StateVector, f: TensorFactorization, keep) -> DensityOperator:
    """Partial trace of ``|psi><psi|`` without forming the global projector."""
    f.check(psi.dim)
    keep = _keep_indices(f, keep)
    rest = [i for i in range(len(f)) if i not in keep]
    d = math.prod(f.dims[i] for i in keep)
    mat = psi.amplitudes.reshape(f.dims).transpose(keep + rest).reshape(d, -1)
    return DensityOperator(mat @ mat.conj().T, check=False)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of ``rho - sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    evals = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(min(1.0, 0.5 * np.sum(np.abs(evals))))


def pure_distance(psi: StateVector, phi: StateVector) -> float:
    """Trace distance between ``|psi><psi|`` and ``|phi><phi|``.

    Equals the norm of the part of ``phi`` orthogonal to ``psi``. Computing
    the residual directly avoids the cancellation in ``sqrt(1 - |<psi|phi>|^2)``.
    """
    if psi.dim != phi.dim:
        raise DimensionError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    a, b = psi.amplitudes, phi.amplitudes
    if np.array_equal(a, b):
        return 0.0
    residual = b - np.vdot(a, b) * a
    return float(min(1.0, np.linalg.norm(residual)))


def apply_local(
    u: LinearOperator,
    state: StateVector,
    f: TensorFactorization,
    targets: Sequence[int],
) -> StateVector:
    """Apply unitary ``u`` to the ordered ``targets`` factors, identity elsewhere.

    The first target is the leftmost factor of ``u``.
    """
    f.check(state.dim)
    targets = f.check_indices(targets, "target")
    if not u.unitary and not is_unitary(u.matrix):
        raise NotUnitaryError("apply_local requires a unitary operator")
    return StateVector(apply_operator(u.matrix, state.amplitudes, f, targets), check=False)


def apply_operator(matrix: np.ndarray, amplitudes: np.ndarray, f: TensorFactorization, targets: Sequence[int]) -> np.ndarray:
    """Raw contraction of ``matrix`` into ``targets``; no unitarity or norm checks."""
    tdims = [f.dims[t] for t in targets]
    k = len(targets)
    if matrix.shape != (math.prod(tdims), math.prod(tdims)):
        raise DimensionError(
            f"operator of shape {matrix.shape} does not act on targets with dims {tdims}"
        )
    psi = amplitudes.reshape(f.dims)
    op = matrix.reshape(tdims + tdims)
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the target axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(-1)


def expectation(psi: StateVector, op) -> complex:
    op = op.matrix if isinstance(op, LinearOperator) else np.asarray(op)
    return complex(np.vdot(psi.amplitudes, op @ psi.amplitudes))


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(z)


def random_unitary(dim: int, rng: np.random.Generator) -> LinearOperator:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return LinearOperator(q, unitary=True)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)
