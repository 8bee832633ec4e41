"""State-vector pipelines: prepare, evolve, project, evolve again.

These run the full simulation that the closed forms in :mod:`jcpath.analytic`
and :mod:`jcpath.dispersive` are checked against. Nothing here uses those
closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    SystemParams,
    compose,
    controlled_propagator,
    dispersive_propagator,
    free_propagator,
)
from .hilbert import CompositeState, coherent_state, fock_state, tensor
from .measurement import (
    MeasurementRecord,
    atom_x_basis,
    atom_z_basis,
    control_basis,
    measure,
)


@dataclass(frozen=True)
class RabiRun:
    """Result of the Fock-state pipeline."""

    state: CompositeState  # at time t
    measurement: MeasurementRecord  # control projection at t_m

    def inversion(self) -> float:
        p = np.abs(self.state.tensor) ** 2
        return float(p[:, 0].sum() - p[:, 1].sum())

    def photon_average(self, j: int) -> float:
        p = np.abs(self.state.tensor) ** 2
        marginal = p.sum(axis=(0, 1, 3 - j))
        return float(marginal @ np.arange(marginal.size))

    def probability(self, control: int, atom: int, n0: int, n1: int) -> float:
        return abs(self.state.amplitude(control, atom, n0, n1)) ** 2


def rabi_params(s, n_max: int | None = None) -> SystemParams:
    """System parameters matching an analytic ``RabiScenario``."""
    if n_max is None:
        n_max = max(s.n0, s.n1) + 2
    return SystemParams(s.omega_a, s.omega0, s.omega1, s.g0, s.g1, n_max)


def rabi_initial_state(theta: float, phi: float, n0: int, n1: int, n_max: int) -> CompositeState:
    control = [math.cos(theta), np.exp(1j * phi) * math.sin(theta)]
    return tensor([control, [1.0, 0.0], fock_state(n0, n_max), fock_state(n1, n_max)])


def run_rabi(s, n_max: int | None = None, params: SystemParams | None = None) -> RabiRun:
    """Evolve to ``t_m``, project the control on ``|theta, phi>``, evolve to ``t``.

    ``s`` must hold scalar ``t`` and ``t_m``.
    """
    params = params or rabi_params(s, n_max)
    t_m, t = float(s.t_m), float(s.t)
    psi = rabi_initial_state(s.theta, s.phi, s.n0, s.n1, params.n_max)
    psi = controlled_propagator(params, 0.0, t_m).apply(psi)
    record = measure(psi, control_basis(s.theta, s.phi), "+")
    psi = controlled_propagator(params, t_m, t).apply(record.post_state)
    return RabiRun(psi, record)


# ---------------------------------------------------------------------------
# dispersive scheme


def dispersive_initial_state(alpha: complex, chi: float, n_max: int) -> CompositeState:
    """``|+>_c (|g> + e^{i chi}|e>)/sqrt(2) |alpha>|alpha>``."""
    field = coherent_state(alpha, n_max)
    s = 1 / math.sqrt(2)
    return tensor([[s, s], [s * np.exp(1j * chi), s], field, field])


def evolve_dispersive(scn, exact: bool = False) -> CompositeState:
    """State at ``scn.t``: free flight, cavity passage for ``t_m``, free flight.

    With ``exact=True`` the passage uses the full JC propagator instead of
    the linear dispersive approximation.
    """
    p = scn.params
    t_m = scn.t_m
    t_in, t_out = scn.T0, scn.T0 + t_m
    passage = controlled_propagator(p, t_in, t_out) if exact else dispersive_propagator(p, t_m, t_in)
    u = compose(free_propagator(p, 0.0, t_in), passage, free_propagator(p, t_out, scn.t))
    return u.apply(dispersive_initial_state(scn.alpha, scn.chi, p.n_max))


def condition_dispersive(state: CompositeState, control: str, atom: str | None = None):
    """Project on ``|+->_c`` and optionally on an atom outcome (``e, g, +x, -x``).

    Returns ``(post_state, control_record, atom_record_or_None)``.
    """
    rec_c = measure(state, control_basis(math.pi / 4, 0.0), control)
    if atom is None:
        return rec_c.post_state, rec_c, None
    basis = atom_z_basis() if atom in ("e", "g") else atom_x_basis()
    rec_a = measure(rec_c.post_state, basis, atom)
    return rec_a.post_state, rec_c, rec_a
