"""Hamiltonians and propagators of the two-cavity Jaynes-Cummings system.

All Hamiltonians are stored with hbar factored out, in rad/s. Propagators
are applied to states through :mod:`jcpath.kernels`; dense matrices are only
materialized on request via :attr:`Propagator.matrix`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import kernels
from .errors import DomainError, IntervalError, RegimeError, RWAWarning, TruncationWarning
from .hilbert import (
    ATOM,
    E,
    FIELD0,
    G,
    CompositeState,
    OperatorMatrix,
    SpaceShape,
    embed,
    ladder_ops,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
)

EDGE_POPULATION_TOL = 1e-10
RWA_FRACTION = 0.1
METHODS = ("closed_form", "numeric_expm", "dispersive", "free", "composite")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the atom and the two cavities.

    ``delta_0``/``delta_1`` are the detunings ``omega_a - omega_k``. The RWA
    condition ``|g_k|, |Delta_k| << omega_a + omega_k`` is checked against
    ``RWA_FRACTION`` and reported through :class:`RWAWarning`.
    """

    omega_a: float
    omega_0: float
    omega_1: float
    g_0: float
    g_1: float
    n_max: int

    def __post_init__(self):
        for name in ("omega_a", "omega_0", "omega_1"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive frequency, got {value!r}")
        for name in ("g_0", "g_1"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        object.__setattr__(self, "n_max", int(self.n_max))
        for k in (0, 1):
            bound = RWA_FRACTION * (self.omega_a + self.omega(k))
            if abs(self.g(k)) > bound or abs(self.delta(k)) > bound:
                warnings.warn(
                    f"cavity {k}: |g|={abs(self.g(k)):.3g}, |Delta|={abs(self.delta(k)):.3g} "
                    f"not small against omega_a + omega_{k} = {self.omega_a + self.omega(k):.3g}",
                    RWAWarning,
                    stacklevel=3,
                )

    @classmethod
    def identical(cls, omega: float, delta: float, g: float, n_max: int) -> SystemParams:
        """Two identical cavities at frequency ``omega``, atom at ``omega + delta``."""
        return cls(omega + delta, omega, omega, g, g, n_max)

    def omega(self, k: int) -> float:
        return (self.omega_0, self.omega_1)[k]

    def g(self, k: int) -> float:
        return (self.g_0, self.g_1)[k]

    def delta(self, k: int) -> float:
        return self.omega_a - self.omega(k)

    @property
    def delta_0(self) -> float:
        return self.delta(0)

    @property
    def delta_1(self) -> float:
        return self.delta(1)

    @property
    def shape(self) -> SpaceShape:
        return SpaceShape.composite(self.n_max)

    def lam(self, k: int = 0) -> float:
        """Dispersive parameter ``g_k / |Delta_k|``."""
        d = abs(self.delta(k))
        if d == 0.0:
            raise DomainError("dispersive parameter undefined at zero detuning")
        return abs(self.g(k)) / d


@dataclass(frozen=True)
class Propagator:
    """Unitary evolution over ``interval`` on the composite space.

    ``action`` maps a (dim, batch) complex array to its image; it must not
    modify its argument.
    """

    shape: SpaceShape
    interval: tuple[float, float]
    method: str
    action: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    edge_check: Callable[[np.ndarray], float] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown propagator method {self.method!r}")

    def apply(self, state: CompositeState) -> CompositeState:
        if state.shape != self.shape:
            raise DomainError(f"propagator on {self.shape.dims} applied to state on {state.shape.dims}")
        psi = state.amplitudes
        if self.edge_check is not None:
            leak = self.edge_check(psi)
            if leak >= EDGE_POPULATION_TOL:
                warnings.warn(
                    f"population {leak:.3e} at the truncated edge |e, n_max>; raise n_max",
                    TruncationWarning,
                    stacklevel=2,
                )
        out = self.action(psi[:, None])[:, 0]
        # renormalize away accumulated rounding so chained evolutions keep norm 1
        return CompositeState(self.shape, out / np.linalg.norm(out))

    def __call__(self, state: CompositeState) -> CompositeState:
        return self.apply(state)

    @cached_property
    def matrix(self) -> OperatorMatrix:
        return OperatorMatrix(self.shape, self.action(np.eye(self.shape.dim, dtype=np.complex128)), unitary=True)

    @property
    def duration(self) -> float:
        return self.interval[1] - self.interval[0]


def compose(*props: Propagator) -> Propagator:
    """Chain propagators given in time order (earliest first)."""
    if not props:
        raise DomainError("nothing to compose")
    for a, b in zip(props, props[1:]):
        if a.shape != b.shape:
            raise DomainError("cannot compose propagators on different spaces")
        if not math.isclose(a.interval[1], b.interval[0], rel_tol=1e-12, abs_tol=1e-12):
            raise IntervalError(f"intervals {a.interval} and {b.interval} are not adjacent")

    def action(psi):
        for p in props:
            psi = p.action(psi)
        return psi

    return Propagator(
        props[0].shape,
        (props[0].interval[0], props[-1].interval[1]),
        "composite",
        action,
        props[0].edge_check,
    )


# ---------------------------------------------------------------------------
# Hamiltonians


def _field_number(shape: SpaceShape, k: int) -> OperatorMatrix:
    a, ad = ladder_ops(shape.n_max)
    return embed(OperatorMatrix(a.shape, ad.entries @ a.entries, hermitian=True), FIELD0 + k, shape)


def _control_projector(shape: SpaceShape, c: int) -> np.ndarray:
    p = np.zeros((2, 2))
    p[c, c] = 1.0
    return embed(p, 0, shape).entries


def free_hamiltonian(params: SystemParams) -> OperatorMatrix:
    """``omega_a sigma_z / 2 + omega_0 n_0 + omega_1 n_1`` (identity on control)."""
    shape = params.shape
    h = (
        0.5 * params.omega_a * embed(SIGMA_Z, ATOM, shape).entries
        + params.omega_0 * _field_number(shape, 0).entries
        + params.omega_1 * _field_number(shape, 1).entries
    )
    return OperatorMatrix(shape, h, hermitian=True)


def jc_hamiltonian(params: SystemParams, k: int) -> OperatorMatrix:
    """``H_JC^(k)`` of the atom and cavity ``k`` embedded in the composite space."""
    shape = params.shape
    a, ad = ladder_ops(shape.n_max)
    sp = embed(SIGMA_PLUS, ATOM, shape).entries
    sm = embed(SIGMA_MINUS, ATOM, shape).entries
    ak = embed(a, FIELD0 + k, shape).entries
    adk = embed(ad, FIELD0 + k, shape).entries
    h = (
        0.5 * params.omega_a * embed(SIGMA_Z, ATOM, shape).entries
        + params.omega(k) * _field_number(shape, k).entries
        + params.g(k) * (sm @ adk + sp @ ak)
    )
    return OperatorMatrix(shape, h, hermitian=True)


def interaction_hamiltonian(params: SystemParams) -> OperatorMatrix:
    """Path-superposed interaction Hamiltonian ``H_I``.

    ``|0><0|_c (x) (H_JC^(0) + omega_1 n_1) + |1><1|_c (x) (H_JC^(1) + omega_0 n_0)``
    """
    shape = params.shape
    h = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
    for k in (0, 1):
        other = 1 - k
        branch = jc_hamiltonian(params, k).entries + params.omega(other) * _field_number(shape, other).entries
        h += _control_projector(shape, k) @ branch
    return OperatorMatrix(shape, h, hermitian=True)


def excitation_number(shape: SpaceShape, k: int) -> OperatorMatrix:
    """``N_k = n_k + sigma_z / 2`` on the composite space."""
    return OperatorMatrix(
        shape,
        _field_number(shape, k).entries + 0.5 * embed(SIGMA_Z, ATOM, shape).entries,
        hermitian=True,
    )


def branch_excitation_number(shape: SpaceShape) -> OperatorMatrix:
    """``|0><0| (x) N_0 + |1><1| (x) N_1``, conserved by ``H_I``."""
    return OperatorMatrix(
        shape,
        _control_projector(shape, 0) @ excitation_number(shape, 0).entries
        + _control_projector(shape, 1) @ excitation_number(shape, 1).entries,
        hermitian=True,
    )


# ---------------------------------------------------------------------------
# closed-form propagators


def _rabi_blocks(g: float, delta: float, dt: float, n_max: int):
    """``exp(-i V dt)`` on the excitation blocks of one atom-cavity pair.

    Returns the 2x2 matrices on ``(|e,n>, |g,n+1>)`` for ``n < n_max``, the
    phase on ``|g,0>`` and the phase on the truncated ``|e,n_max>``.
    """
    x = np.arange(1, n_max + 1, dtype=float)  # N + 1/2 on block n
    omega = np.sqrt(g * g * x + 0.25 * delta * delta)
    c = np.cos(omega * dt)
    s = dt * np.sinc(omega * dt / np.pi)  # sin(omega dt) / omega, finite at omega = 0
    off = -1j * s * g * np.sqrt(x)
    blocks = np.empty((n_max, 2, 2), dtype=np.complex128)
    blocks[:, 0, 0] = c - 0.5j * delta * s
    blocks[:, 1, 1] = c + 0.5j * delta * s
    blocks[:, 0, 1] = off
    blocks[:, 1, 0] = off
    # |g,0> and |e,n_max> are V eigenstates on the truncated space
    g0 = np.exp(0.5j * delta * dt)
    edge = np.exp(-0.5j * delta * dt)
    return blocks, g0, edge


def klimov_W(params: SystemParams, k: int, dt: float) -> OperatorMatrix:
    """``W_k = exp(-i V_k dt)`` assembled blockwise from the closed form.

    Acts on atom (x) field_k and as the identity on control and the other
    field.
    """
    n_max = params.n_max
    blocks, g0, edge = _rabi_blocks(params.g(k), params.delta(k), dt, n_max)
    d = n_max + 1
    w = np.zeros((2, d, 2, d), dtype=np.complex128)  # (atom, n) x (atom, n)
    for n in range(n_max):
        w[E, n, E, n] = blocks[n, 0, 0]
        w[E, n, G, n + 1] = blocks[n, 0, 1]
        w[G, n + 1, E, n] = blocks[n, 1, 0]
        w[G, n + 1, G, n + 1] = blocks[n, 1, 1]
    w[G, 0, G, 0] = g0
    w[E, n_max, E, n_max] = edge
    shape = params.shape
    # out (atom a, field_k i) <- in (atom b, field_k j); u/v is the other field
    spec = "aibj,xy,uv->xaiuybjv" if k == 0 else "aibj,xy,uv->xauiybvj"
    full = np.einsum(spec, w, np.eye(2), np.eye(d)).reshape(shape.dim, shape.dim)
    return OperatorMatrix(shape, full, unitary=True)


def _controlled_coefficients(params: SystemParams, dt: float):
    """Per-branch kernel coefficients of ``Lambda_k W_k`` over ``dt``."""
    d = params.n_max + 1
    m = np.arange(d, dtype=float)
    coeffs = []
    for k in (0, 1):
        wk = params.omega(k)
        blocks, g0, edge = _rabi_blocks(params.g(k), params.delta(k), dt, params.n_max)
        n_phase = np.exp(-1j * wk * (np.arange(params.n_max) + 0.5) * dt)
        blocks = blocks * n_phase[:, None, None]
        g0 = g0 * np.exp(0.5j * wk * dt)  # N_k = -1/2 on |g,0>
        edge = edge * np.exp(-1j * wk * (params.n_max + 0.5) * dt)
        spectator = np.exp(-1j * params.omega(1 - k) * m * dt)
        coeffs.append((np.ascontiguousarray(blocks), complex(g0), complex(edge), spectator))
    return coeffs


def _branch_views(psi4: np.ndarray):
    """(atom, coupled, spectator, batch) views of both control branches."""
    return psi4[0], psi4[1].transpose(0, 2, 1, 3)


def _edge_population(n_max: int):
    d = n_max + 1

    def check(psi):
        t = np.asarray(psi).reshape(2, 2, d, d)
        return float(np.sum(np.abs(t[0, E, n_max, :]) ** 2) + np.sum(np.abs(t[1, E, :, n_max]) ** 2))

    return check


def controlled_propagator(params: SystemParams, t0: float, t: float) -> Propagator:
    """Closed-form ``exp(-i H_I (t - t0))`` as ``sum_k |k><k| (x) Lambda_k W_k``."""
    if t < t0:
        raise IntervalError(f"t = {t} precedes t0 = {t0}")
    dt = t - t0
    coeffs = _controlled_coefficients(params, dt)
    shape = params.shape
    d = params.n_max + 1

    def action(psi):
        out = np.array(psi, dtype=np.complex128, order="C", copy=True)
        psi4 = out.reshape(2, 2, d, d, out.shape[1])
        for view, (blocks, g0, edge, spectator) in zip(_branch_views(psi4), coeffs):
            kernels.apply_branch(view, blocks, g0, edge, spectator)
        return out

    return Propagator(shape, (t0, t), "closed_form", action, _edge_population(params.n_max))


def _diagonal_propagator(shape, interval, method, diag):
    diag = np.ascontiguousarray(diag, dtype=np.complex128)

    def action(psi):
        out = np.array(psi, dtype=np.complex128, order="C", copy=True)
        kernels.apply_diagonal(out, diag)
        return out

    return Propagator(shape, interval, method, action)


def _basis_grids(shape: SpaceShape):
    d = shape.dims[FIELD0]
    c, a, n0, n1 = np.meshgrid(np.arange(2), np.arange(2), np.arange(d), np.arange(d), indexing="ij")
    sz = np.where(a == E, 1.0, -1.0)
    return c.ravel(), sz.ravel(), n0.ravel().astype(float), n1.ravel().astype(float)


def free_propagator(params: SystemParams, t0: float, t: float) -> Propagator:
    """``exp(-i H_free (t - t0))``; diagonal in the product basis."""
    if t < t0:
        raise IntervalError(f"t = {t} precedes t0 = {t0}")
    _, sz, n0, n1 = _basis_grids(params.shape)
    energy = 0.5 * params.omega_a * sz + params.omega_0 * n0 + params.omega_1 * n1
    return _diagonal_propagator(params.shape, (t0, t), "free", np.exp(-1j * energy * (t - t0)))


def numeric_expm(H: OperatorMatrix, dt: float, t0: float = 0.0) -> Propagator:
    """``exp(-i H dt)`` by Hermitian eigendecomposition (independent oracle)."""
    if not H.is_hermitian():
        raise DomainError("numeric_expm requires a Hermitian generator")
    evals, evecs = np.linalg.eigh(H.entries)
    u = (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T

    def action(psi):
        return u @ psi

    return Propagator(H.shape, (t0, t0 + dt), "numeric_expm", action)


# ---------------------------------------------------------------------------
# dispersive regime

DISPERSIVE_LAMBDA_MAX = 0.02
DISPERSIVE_BOUND = 1e-2


def check_dispersive_params(params: SystemParams, n_max: int | None = None) -> float:
    """Check identical cavities and the linear dispersive regime; return ``Delta lambda^2``."""
    if not (math.isclose(params.omega_0, params.omega_1, rel_tol=1e-12)
            and math.isclose(params.g_0, params.g_1, rel_tol=1e-12)):
        raise RegimeError("dispersive propagator requires identical cavities")
    delta = params.delta(0)
    if delta == 0.0:
        raise RegimeError("dispersive regime undefined at zero detuning")
    lam = params.lam(0)
    n_max = params.n_max if n_max is None else n_max
    problems = []
    if lam > DISPERSIVE_LAMBDA_MAX:
        problems.append(f"lambda = {lam:.4g} > {DISPERSIVE_LAMBDA_MAX}")
    if lam * lam * (n_max + 1) > DISPERSIVE_BOUND:
        problems.append(
            f"lambda^2 (n_max + 1) = {lam * lam * (n_max + 1):.4g} > {DISPERSIVE_BOUND} "
            f"(n_max = {n_max}; need lambda <= {math.sqrt(DISPERSIVE_BOUND / (n_max + 1)):.4g})"
        )
    if problems:
        raise RegimeError("outside the linear dispersive regime: " + "; ".join(problems))
    return params.g_0 ** 2 / delta


def dispersive_propagator(params: SystemParams, t_m: float, t0: float = 0.0) -> Propagator:
    """Linear-dispersive approximation of ``exp(-i H_I t_m)`` (diagonal).

    Each control branch evolves its cavity under
    ``(omega_a + chi) sigma_z / 2 + (omega + chi sigma_z) n_k + chi / 2`` with
    ``chi = Delta lambda^2 = g^2 / Delta``; the other cavity rotates freely.
    """
    chi = check_dispersive_params(params)
    if t_m < 0:
        raise IntervalError(f"negative interaction time {t_m}")
    c, sz, n0, n1 = _basis_grids(params.shape)
    w = params.omega_0
    nk = np.where(c == 0, n0, n1)
    other = np.where(c == 0, n1, n0)
    energy = 0.5 * (params.omega_a + chi) * sz + (w + chi * sz) * nk + 0.5 * chi + w * other
    return _diagonal_propagator(params.shape, (t0, t0 + t_m), "dispersive", np.exp(-1j * energy * t_m))
