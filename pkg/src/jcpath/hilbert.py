"""Truncated tensor-product Hilbert spaces.

The composite space is always ordered control (x) atom (x) field0 (x) field1.
The atom basis is ``(|e>, |g>)`` so that ``sigma_z = diag(+1, -1)``; each
field uses the Fock basis ``|0>, ..., |n_max>``.

Single-subsystem states are plain 1-D complex numpy arrays. Composite states
and operators are wrapped in small immutable containers that carry their
:class:`SpaceShape` and check their invariants on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError, ShapeMismatchError, TruncationError

CONTROL, ATOM, FIELD0, FIELD1 = 0, 1, 2, 3
E, G = 0, 1  # atom basis indices

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class SpaceShape:
    """Ordered subsystem dimensions of a (sub)space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DomainError(f"every subsystem dimension must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def composite(cls, n_max: int) -> SpaceShape:
        if n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {n_max}")
        return cls((2, 2, n_max + 1, n_max + 1))

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_max(self) -> int:
        """Photon-number cutoff of a composite shape."""
        if len(self.dims) != 4:
            raise ShapeMismatchError("n_max is only defined for composite shapes")
        return self.dims[FIELD0] - 1


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"expected a 1-D state vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("state vector has non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CompositeState:
    """Normalized pure state on control (x) atom (x) field0 (x) field1."""

    shape: SpaceShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _as_vector(self.amplitudes)
        if amps.size != self.shape.dim:
            raise ShapeMismatchError(
                f"{amps.size} amplitudes for a space of dimension {self.shape.dim}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_unnormalized(cls, shape: SpaceShape, amplitudes) -> CompositeState:
        amps = _as_vector(amplitudes)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(shape, amps / norm)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amplitudes.reshape(self.shape.dims)

    @property
    def n_max(self) -> int:
        return self.shape.n_max

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, control: int, atom: int, n0: int, n1: int) -> complex:
        return complex(self.tensor[control, atom, n0, n1])


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator acting on the space described by ``shape``.

    The ``hermitian`` and ``unitary`` flags are claims checked at
    construction time, not hints.
    """

    shape: SpaceShape
    entries: np.ndarray = field(repr=False)
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        dim = self.shape.dim
        if m.shape != (dim, dim):
            raise ShapeMismatchError(f"operator of shape {m.shape} on a space of dimension {dim}")
        if not np.all(np.isfinite(m)):
            raise DomainError("operator has non-finite entries")
        if self.hermitian:
            err = np.max(np.abs(m - m.conj().T)) if dim else 0.0
            if err > HERMITIAN_TOL:
                raise DomainError(f"operator flagged Hermitian but |A - A^dag| = {err:.3e}")
        if self.unitary:
            err = np.max(np.abs(m.conj().T @ m - np.eye(dim)))
            if err > UNITARY_TOL:
                raise DomainError(f"operator flagged unitary but |U^dag U - I| = {err:.3e}")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.shape.dim

    def dag(self) -> OperatorMatrix:
        return OperatorMatrix(
            self.shape, self.entries.conj().T, hermitian=self.hermitian, unitary=self.unitary
        )

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_same(self.shape, other.shape)
            return OperatorMatrix(
                self.shape,
                self.entries @ other.entries,
                unitary=self.unitary and other.unitary,
            )
        if isinstance(other, CompositeState):
            _check_same(self.shape, other.shape)
            return self.entries @ other.amplitudes
        return self.entries @ np.asarray(other)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        _check_same(self.shape, other.shape)
        return OperatorMatrix(
            self.shape, self.entries + other.entries, hermitian=self.hermitian and other.hermitian
        )

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        _check_same(self.shape, other.shape)
        return OperatorMatrix(
            self.shape, self.entries - other.entries, hermitian=self.hermitian and other.hermitian
        )

    def __mul__(self, scalar) -> OperatorMatrix:
        scalar = complex(scalar)
        return OperatorMatrix(
            self.shape,
            scalar * self.entries,
            hermitian=self.hermitian and scalar.imag == 0.0,
        )

    __rmul__ = __mul__

    def commutator(self, other: OperatorMatrix) -> np.ndarray:
        _check_same(self.shape, other.shape)
        return self.entries @ other.entries - other.entries @ self.entries

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def unitarity_error(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))


def _check_same(a: SpaceShape, b: SpaceShape) -> None:
    if a != b:
        raise ShapeMismatchError(f"space mismatch: {a.dims} vs {b.dims}")


# ---------------------------------------------------------------------------
# single-subsystem states


def fock_state(n: int, n_max: int) -> np.ndarray:
    """Fock state ``|n>`` truncated at ``n_max``."""
    if n < 0:
        raise DomainError(f"photon number must be non-negative, got {n}")
    if n > n_max:
        raise TruncationError(f"|{n}> does not fit below n_max = {n_max}", required_n_max=n)
    v = np.zeros(n_max + 1, dtype=np.complex128)
    v[n] = 1.0
    return v


def coherent_tail_weight(alpha: complex, n_max: int) -> float:
    """Poisson weight ``sum_{n > n_max} e^{-|a|^2} |a|^{2n} / n!`` discarded by truncation."""
    mu = abs(alpha) ** 2
    if mu == 0.0:
        return 0.0
    log_mu = math.log(mu)
    total = 0.0
    n = n_max + 1
    # terms decrease monotonically once n > mu
    while True:
        term = math.exp(-mu + n * log_mu - math.lgamma(n + 1))
        total += term
        if n > mu and term < 1e-18 * max(total, 1e-300):
            break
        if n > mu + 60 * math.sqrt(mu) + 200:
            break
        n += 1
    return total


def required_n_max(alpha: complex, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest cutoff whose discarded coherent-state weight is ``<= tol``."""
    n = max(1, int(abs(alpha) ** 2))
    while coherent_tail_weight(alpha, n) > tol:
        n += 1
    return n


def coherent_state(
    alpha: complex,
    n_max: int,
    tol: float = DEFAULT_TAIL_TOL,
    return_tail: bool = False,
):
    """Truncated coherent state ``|alpha>`` renormalized on ``|0>..|n_max>``.

    Args:
        alpha: Complex coherent amplitude.
        n_max: Photon-number cutoff.
        tol: Largest discarded Poisson weight accepted.
        return_tail: Also return the discarded weight.

    Raises:
        TruncationError: The discarded weight exceeds ``tol``. The error
            carries the smallest cutoff that would satisfy it.
    """
    alpha = complex(alpha)
    tail = coherent_tail_weight(alpha, n_max)
    if tail > tol:
        need = required_n_max(alpha, tol)
        raise TruncationError(
            f"coherent state |alpha|^2 = {abs(alpha) ** 2:.4g} loses weight {tail:.3e} "
            f"at n_max = {n_max}; need n_max >= {need}",
            required_n_max=need,
        )
    amps = np.empty(n_max + 1, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    amps /= np.linalg.norm(amps)
    return (amps, tail) if return_tail else amps


def tensor(factors: Sequence) -> CompositeState:
    """Kronecker product of control, atom, field0 and field1 states."""
    vecs = [_as_vector(f) for f in factors]
    if len(vecs) != 4:
        raise ShapeMismatchError(f"expected 4 factors (control, atom, field0, field1), got {len(vecs)}")
    if vecs[CONTROL].size != 2 or vecs[ATOM].size != 2:
        raise ShapeMismatchError("control and atom factors must be 2-dimensional")
    if vecs[FIELD0].size != vecs[FIELD1].size:
        raise ShapeMismatchError("both fields must share the same truncation")
    shape = SpaceShape.composite(vecs[FIELD0].size - 1)
    return CompositeState(shape, reduce(np.kron, vecs))


def kron(*vecs) -> np.ndarray:
    """Plain Kronecker product of 1-D vectors (e.g. two-field states)."""
    return reduce(np.kron, [_as_vector(v) for v in vecs])


# ---------------------------------------------------------------------------
# operators


def ladder_ops(n_max: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Truncated annihilation and creation operators ``(a, a_dagger)``."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(np.complex128)
    shape = SpaceShape((n_max + 1,))
    return OperatorMatrix(shape, a), OperatorMatrix(shape, a.conj().T)


def number_op(n_max: int) -> OperatorMatrix:
    return OperatorMatrix(
        SpaceShape((n_max + 1,)), np.diag(np.arange(n_max + 1, dtype=float)), hermitian=True
    )


_ATOM = SpaceShape((2,))

SIGMA_PLUS = OperatorMatrix(_ATOM, [[0, 1], [0, 0]])  # |e><g|
SIGMA_MINUS = OperatorMatrix(_ATOM, [[0, 0], [1, 0]])  # |g><e|
SIGMA_X = OperatorMatrix(_ATOM, [[0, 1], [1, 0]], hermitian=True)
SIGMA_Y = OperatorMatrix(_ATOM, [[0, -1j], [1j, 0]], hermitian=True)
SIGMA_Z = OperatorMatrix(_ATOM, [[1, 0], [0, -1]], hermitian=True)
IDENTITY_2 = OperatorMatrix(_ATOM, np.eye(2), hermitian=True, unitary=True)


def projector(vector) -> np.ndarray:
    v = _as_vector(vector)
    return np.outer(v, v.conj())


def embed(op: OperatorMatrix | np.ndarray, subsystem: int, shape: SpaceShape) -> OperatorMatrix:
    """Lift a single-subsystem operator to ``shape``, identity elsewhere."""
    m = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=np.complex128)
    if not 0 <= subsystem < len(shape.dims):
        raise ShapeMismatchError(f"no subsystem {subsystem} in {shape.dims}")
    if m.shape != (shape.dims[subsystem],) * 2:
        raise ShapeMismatchError(
            f"operator of shape {m.shape} does not act on subsystem of dim {shape.dims[subsystem]}"
        )
    factors = [np.eye(d) for d in shape.dims]
    factors[subsystem] = m
    hermitian = op.hermitian if isinstance(op, OperatorMatrix) else False
    unitary = op.unitary if isinstance(op, OperatorMatrix) else False
    return OperatorMatrix(shape, reduce(np.kron, factors), hermitian=hermitian, unitary=unitary)


def identity(shape: SpaceShape) -> OperatorMatrix:
    return OperatorMatrix(shape, np.eye(shape.dim), hermitian=True, unitary=True)


def expectation(op: OperatorMatrix, state: CompositeState):
    """``<psi|A|psi>``; real-valued for Hermitian operators."""
    _check_same(op.shape, state.shape)
    psi = state.amplitudes
    value = complex(np.vdot(psi, op.entries @ psi))
    if op.hermitian:
        if abs(value.imag) > 1e-10:
            raise DomainError(f"Hermitian expectation has imaginary part {value.imag:.3e}")
        return value.real
    return value


def fidelity(psi, phi) -> float:
    """``|<psi|phi>|^2`` for normalized pure states."""
    if isinstance(psi, CompositeState) and isinstance(phi, CompositeState):
        _check_same(psi.shape, phi.shape)
    a = psi.amplitudes if isinstance(psi, CompositeState) else _as_vector(psi)
    b = phi.amplitudes if isinstance(phi, CompositeState) else _as_vector(phi)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"state shapes differ: {a.shape} vs {b.shape}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))
