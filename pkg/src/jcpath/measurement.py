"""Projective measurements on the control qubit and on the atom.

Measurements condition on a caller-chosen outcome; they never sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroProbabilityError
from .hilbert import ATOM, CONTROL, CompositeState

ZERO_PROBABILITY = 1e-14
_SUBSYSTEMS = {"control": CONTROL, "atom": ATOM}


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal basis of a two-level subsystem with outcome labels."""

    subsystem: str
    vectors: np.ndarray
    labels: tuple[str, str]

    def __post_init__(self):
        if self.subsystem not in _SUBSYSTEMS:
            raise DomainError(f"cannot measure subsystem {self.subsystem!r}")
        v = np.array(self.vectors, dtype=np.complex128)
        if v.shape != (2, 2):
            raise DomainError("a two-level basis needs two 2-dimensional vectors")
        if np.max(np.abs(v.conj() @ v.T - np.eye(2))) > 1e-12:
            raise DomainError("basis vectors are not orthonormal")
        if len(set(self.labels)) != 2:
            raise DomainError("outcome labels must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "labels", tuple(self.labels))

    def index(self, outcome) -> int:
        if isinstance(outcome, (int, np.integer)) and outcome in (0, 1):
            return int(outcome)
        try:
            return self.labels.index(outcome)
        except ValueError:
            raise DomainError(f"unknown outcome {outcome!r}; expected one of {self.labels}") from None

    def vector(self, outcome) -> np.ndarray:
        return self.vectors[self.index(outcome)]


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: str
    probability: float
    post_state: CompositeState


def control_basis(theta: float, phi: float) -> MeasurementBasis:
    """``{|theta,phi>, sin(theta)|0> - e^{i phi} cos(theta)|1>}`` labeled ``+``/``-``."""
    ph = np.exp(1j * phi)
    return MeasurementBasis(
        "control",
        [[math.cos(theta), ph * math.sin(theta)], [math.sin(theta), -ph * math.cos(theta)]],
        ("+", "-"),
    )


def control_computational_basis() -> MeasurementBasis:
    return MeasurementBasis("control", np.eye(2), ("0", "1"))


def atom_z_basis() -> MeasurementBasis:
    return MeasurementBasis("atom", np.eye(2), ("e", "g"))


def atom_x_basis() -> MeasurementBasis:
    """``|+-x> = (|e> +- |g>) / sqrt(2)``."""
    s = 1 / math.sqrt(2)
    return MeasurementBasis("atom", [[s, s], [s, -s]], ("+x", "-x"))


def _project(state: CompositeState, basis: MeasurementBasis, outcome) -> np.ndarray:
    v = basis.vector(outcome)
    axis = _SUBSYSTEMS[basis.subsystem]
    t = np.moveaxis(state.tensor, axis, 0)
    amp = np.tensordot(v.conj(), t, axes=(0, 0))
    projected = np.multiply.outer(v, amp)
    return np.moveaxis(projected, 0, axis).ravel()


def outcome_probability(state: CompositeState, basis: MeasurementBasis, outcome) -> float:
    return float(np.linalg.norm(_project(state, basis, outcome)) ** 2)


def outcome_probabilities(state: CompositeState, basis: MeasurementBasis) -> dict[str, float]:
    return {label: outcome_probability(state, basis, label) for label in basis.labels}


def measure(state: CompositeState, basis: MeasurementBasis, outcome) -> MeasurementRecord:
    """Condition ``state`` on ``outcome`` of a projective measurement in ``basis``.

    Raises:
        ZeroProbabilityError: The outcome probability is below 1e-14, so the
            post-measurement state is undefined.
    """
    projected = _project(state, basis, outcome)
    prob = float(np.linalg.norm(projected) ** 2)
    label = basis.labels[basis.index(outcome)]
    if prob < ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome {label!r} has probability {prob:.3e}")
    return MeasurementRecord(label, prob, CompositeState.from_unnormalized(state.shape, projected))
