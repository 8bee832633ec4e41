"""Dispersive passage through both cavities: cat and Bell-like field states.

The atom enters at ``T0`` in ``(|g> + e^{i chi}|e>)/sqrt(2)``, both cavities
hold ``|alpha>``, and it leaves after the interaction time ``t_m`` of
schedule index ``m``. At ``t >= T0 + t_m`` the control and then the atom are
measured.

Sign conventions: with ``p = (-1)^m sign(Delta)`` the rotated amplitude is
``alpha_m(t) = i p alpha e^{-i omega t}`` and the atom phase is
``i p e^{i(chi - omega_a t)}``. For ``Delta > 0`` this is the usual
``(-1)^m`` form; a negative detuning flips the parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DISPERSIVE_BOUND, DISPERSIVE_LAMBDA_MAX, SystemParams
from .errors import DomainError, IntervalError, RegimeError, ZeroProbabilityError
from .hilbert import SpaceShape, CompositeState, coherent_state, kron

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RegimeReport:
    lam: float
    n_max_estimate: int
    lam_bound: float  # largest lambda allowed by lambda^2 (n_max + 1) <= 1e-2
    lam_ok: bool
    bound_ok: bool

    @property
    def ok(self) -> bool:
        return self.lam_ok and self.bound_ok

    @property
    def lam_margin(self) -> float:
        return DISPERSIVE_LAMBDA_MAX - self.lam

    @property
    def bound_margin(self) -> float:
        return DISPERSIVE_BOUND - self.lam ** 2 * (self.n_max_estimate + 1)

    def __str__(self):
        status = "ok" if self.ok else "VIOLATED"
        return (
            f"dispersive regime {status}: lambda = {self.lam:.4g} (<= {DISPERSIVE_LAMBDA_MAX}: {self.lam_ok}), "
            f"lambda^2 (n_max + 1) = {self.lam ** 2 * (self.n_max_estimate + 1):.4g} with n_max = "
            f"{self.n_max_estimate} (<= {DISPERSIVE_BOUND}: {self.bound_ok}; lambda bound {self.lam_bound:.4g})"
        )


def n_max_estimate(alpha: complex) -> int:
    """Cutoff ``ceil(<n> + 10 std(n))`` for a coherent state: ``ceil(|a|^2 + 10|a|)``."""
    a = abs(alpha)
    return max(1, math.ceil(a * a + 10 * a - 1e-12))


def lambda_bound(n_max: int) -> float:
    return math.sqrt(DISPERSIVE_BOUND / (n_max + 1))


def regime_report(lam: float, n_max: int) -> RegimeReport:
    return RegimeReport(
        lam=lam,
        n_max_estimate=n_max,
        lam_bound=lambda_bound(n_max),
        lam_ok=lam <= DISPERSIVE_LAMBDA_MAX,
        bound_ok=lam * lam * (n_max + 1) <= DISPERSIVE_BOUND,
    )


def interaction_time(m: int, params: SystemParams) -> float:
    """Passage time ``(2m - 1) pi |Delta| / (2 g^2)``: dispersive phase of an odd multiple of pi/2."""
    if m < 1 or int(m) != m:
        raise DomainError(f"schedule index m must be a positive integer, got {m}")
    delta = params.delta(0)
    if delta == 0.0:
        raise DomainError("interaction time undefined at zero detuning")
    if params.g_0 <= 0:
        raise DomainError("interaction time needs g > 0")
    return (2 * m - 1) * math.pi * abs(delta) / (2 * params.g_0 ** 2)


def theta_param(m: int, chi: float, omega_a: float, t: float) -> float:
    """Effective phase ``(-1)^m (chi - omega_a t)`` reduced to ``[0, 2 pi)``."""
    value = (-1) ** m * (chi - omega_a * t)
    value = math.fmod(value, TWO_PI)
    if value < 0:
        value += TWO_PI
    return 0.0 if value >= TWO_PI else value


def time_for_theta(theta: float, m: int, chi: float, omega_a: float, branch: int = 0) -> float:
    """A measurement time ``t`` giving ``theta_param(m, chi, omega_a, t) == theta``."""
    return (chi - (-1) ** m * theta + TWO_PI * branch) / omega_a


def double_cat_probability(Theta, alpha_sq):
    """Probability of ``|cat>_0 |cat>_1`` after the ``(+, +x)`` outcomes.

    Vectorized over ``Theta`` and ``alpha_sq``.
    """
    Theta = np.asarray(Theta, dtype=float)
    alpha_sq = np.asarray(alpha_sq, dtype=float)
    if np.any(alpha_sq < 0):
        raise DomainError("|alpha|^2 must be non-negative")
    shifted = np.sin(Theta + 2 * alpha_sq)
    value = 2 * (1 - shifted) / (np.exp(2 * alpha_sq) + 1 - np.sin(Theta) - shifted)
    return value[()] if value.ndim == 0 else value


@dataclass(frozen=True)
class DispersiveScenario:
    alpha: complex
    chi: float
    m: int
    T0: float
    t: float
    params: SystemParams

    def __post_init__(self):
        p = self.params
        if not (math.isclose(p.omega_0, p.omega_1, rel_tol=1e-12) and math.isclose(p.g_0, p.g_1, rel_tol=1e-12)):
            raise DomainError("the dispersive scheme assumes identical cavities")
        if self.T0 < 0:
            raise IntervalError("T0 must be non-negative")
        if self.t < self.T0 + self.t_m * (1 - 1e-12):
            raise IntervalError(f"measurement time {self.t} precedes exit time {self.T0 + self.t_m}")

    @property
    def t_m(self) -> float:
        return interaction_time(self.m, self.params)

    @property
    def omega(self) -> float:
        return self.params.omega_0

    @property
    def delta(self) -> float:
        return self.params.delta(0)

    @property
    def parity(self) -> int:
        """``(-1)^m sign(Delta)``."""
        return (-1) ** self.m * (1 if self.delta > 0 else -1)

    @property
    def phase(self) -> float:
        """``chi - omega_a t``."""
        return self.chi - self.params.omega_a * self.t

    @property
    def Theta(self) -> float:
        """Effective phase entering the double-cat probability, in ``[0, 2 pi)``."""
        value = theta_param(self.m, self.chi, self.params.omega_a, self.t)
        if self.delta < 0:
            value = (-value) % TWO_PI
        return value

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def alpha_m(self) -> complex:
        return 1j * self.parity * self.alpha * np.exp(-1j * self.omega * self.t)

    @property
    def atom_phase(self) -> complex:
        """Relative amplitude ``i p e^{i(chi - omega_a t)}`` of the excited branch."""
        return 1j * self.parity * np.exp(1j * self.phase)


def validate_regime(s: DispersiveScenario) -> RegimeReport:
    """Check ``lambda <= 0.02`` and ``lambda^2 (n_max + 1) <= 1e-2`` for the estimated cutoff."""
    return regime_report(s.params.lam(0), n_max_estimate(s.alpha))


@dataclass(frozen=True)
class CatBellStates:
    """Field states produced by the passage; single-mode states are shared by both cavities.

    ``bell_plus``/``bell_minus`` are ``None`` when their norm vanishes
    (``alpha = 0``). ``norm_cat``, ``norm_Bell`` and ``norm_bell`` are the
    closed-form normalization constants.
    """

    cat: np.ndarray
    up_plus: np.ndarray
    up_minus: np.ndarray
    down: np.ndarray
    Bell_plus: np.ndarray
    Bell_minus: np.ndarray
    bell_plus: np.ndarray | None
    bell_minus: np.ndarray | None
    norm_cat: float
    norm_Bell: float
    norm_bell: float
    overlaps: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def closed_form_norms(s: DispersiveScenario) -> tuple[float, float, float]:
    """``(N, N_Bell, N_bell)`` for the cat and the two Bell-like families."""
    q = math.exp(-2 * s.alpha_sq)
    n_cat = math.sqrt(2) * math.sqrt(1 - s.parity * q * math.sin(s.phase))
    return n_cat, math.sqrt(2) * math.sqrt(1 + q), math.sqrt(2) * math.sqrt(max(0.0, 1 - q))


def _normalized(v):
    return v / np.linalg.norm(v)


def build_states(s: DispersiveScenario, n_max: int | None = None, tol: float = 1e-10) -> CatBellStates:
    """Construct cat, coherent and Bell-like states on the truncated Fock space."""
    n_max = s.params.n_max if n_max is None else n_max
    a = s.alpha_sq
    up_plus = coherent_state(s.alpha_m, n_max, tol)
    up_minus = coherent_state(-s.alpha_m, n_max, tol)
    down = coherent_state(s.alpha * np.exp(-1j * s.omega * s.t), n_max, tol)
    n_cat, n_Bell, n_bell = closed_form_norms(s)
    cat = _normalized(up_minus + s.atom_phase * up_plus)

    def pair(up, sign):
        return kron(up, down) + sign * kron(down, up)

    Bell_plus = _normalized(pair(up_plus, 1))
    Bell_minus = _normalized(pair(up_minus, 1))
    notes = []
    if n_bell < 1e-7:
        bell_plus = bell_minus = None
        notes.append("alpha = 0: bell states have zero norm and are undefined")
    else:
        bell_plus = _normalized(pair(up_plus, -1))
        bell_minus = _normalized(pair(up_minus, -1))
    overlaps = {
        "cat_components": math.exp(-2 * a),
        "up_down": math.exp(-a),
        "down_cat_bound": 2 * math.exp(-a) / n_cat,
    }
    flags = {
        "cat_distinguishable": math.exp(-2 * a) <= 1e-2,
        "bell_like": math.exp(-a) <= 1e-2,
        "cat_orthogonal_to_down": overlaps["down_cat_bound"] < 1e-2,
    }
    return CatBellStates(
        cat, up_plus, up_minus, down, Bell_plus, Bell_minus, bell_plus, bell_minus,
        n_cat, n_Bell, n_bell, overlaps, flags, tuple(notes),
    )


_CONTROL_VEC = {"+": np.array([1.0, 1.0]) / math.sqrt(2), "-": np.array([1.0, -1.0]) / math.sqrt(2)}
_ATOM_VEC = {
    "e": np.array([1.0, 0.0]),
    "g": np.array([0.0, 1.0]),
    "+x": np.array([1.0, 1.0]) / math.sqrt(2),
    "-x": np.array([1.0, -1.0]) / math.sqrt(2),
}


def _composite(control, atom, fields, n_max) -> CompositeState:
    amps = np.kron(np.kron(control, atom), fields)
    return CompositeState.from_unnormalized(SpaceShape.composite(n_max), amps)


def conditioned_state(
    s: DispersiveScenario,
    control_outcome: str,
    atom_outcome: str | None = None,
    states: CatBellStates | None = None,
) -> CompositeState:
    """State right after measuring the control (and optionally the atom), built from the field states.

    * ``(+, None)``: ``|+>_c [ |g> |Bell_-> + c |e> |Bell_+> ] / sqrt(2)``
    * ``(-, None)``: same with the ``bell`` family.
    * ``(+-, e|g)``: fields in ``Bell_+ / Bell_-`` (or ``bell_+ / bell_-``).
    * ``(+-, +x)``: fields in ``|cat>|down> +- |down>|cat>``.
    * ``(+-, -x)``: as ``+x`` with ``chi -> chi + pi``.

    Here ``c`` is the atom phase ``i p e^{i(chi - omega_a t)}``.
    """
    if control_outcome not in _CONTROL_VEC:
        raise DomainError(f"control outcome must be '+' or '-', got {control_outcome!r}")
    if atom_outcome is not None and atom_outcome not in _ATOM_VEC:
        raise DomainError(f"atom outcome must be one of e, g, +x, -x; got {atom_outcome!r}")
    n_max = s.params.n_max
    if atom_outcome == "-x":
        shifted = DispersiveScenario(s.alpha, s.chi + math.pi, s.m, s.T0, s.t, s.params)
        states = build_states(shifted, n_max)
        return _cat_branch(shifted, control_outcome, "-x", states, n_max)
    states = states or build_states(s, n_max)
    plus = control_outcome == "+"
    hi = states.Bell_plus if plus else states.bell_plus
    lo = states.Bell_minus if plus else states.bell_minus
    if hi is None or lo is None:
        raise ZeroProbabilityError("the bell branch has zero probability at alpha = 0")
    ctl = _CONTROL_VEC[control_outcome]
    if atom_outcome is None:
        amps = np.kron(np.kron(ctl, _ATOM_VEC["g"]), lo) + s.atom_phase * np.kron(np.kron(ctl, _ATOM_VEC["e"]), hi)
        return CompositeState.from_unnormalized(SpaceShape.composite(n_max), amps)
    if atom_outcome == "e":
        return _composite(ctl, _ATOM_VEC["e"], hi, n_max)
    if atom_outcome == "g":
        return _composite(ctl, _ATOM_VEC["g"], lo, n_max)
    return _cat_branch(s, control_outcome, "+x", states, n_max)


def _cat_branch(s, control_outcome, atom_outcome, states, n_max):
    sign = 1.0 if control_outcome == "+" else -1.0
    fields = kron(states.cat, states.down) + sign * kron(states.down, states.cat)
    if np.linalg.norm(fields) < 1e-7:
        raise ZeroProbabilityError("cat branch has zero norm")
    return _composite(_CONTROL_VEC[control_outcome], _ATOM_VEC[atom_outcome], fields, n_max)


def double_cat_overlap(states: CatBellStates, control_outcome: str = "+") -> float:
    """``|<cat|<cat| B>|^2`` for the normalized bracket ``B`` computed from truncated vectors."""
    sign = 1.0 if control_outcome == "+" else -1.0
    bracket = _normalized(kron(states.cat, states.down) + sign * kron(states.down, states.cat))
    return float(abs(np.vdot(kron(states.cat, states.cat), bracket)) ** 2)


def require_regime(s: DispersiveScenario) -> RegimeReport:
    """Raise :class:`RegimeError` carrying the report when the regime is violated."""
    report = validate_regime(s)
    if not report.ok:
        raise RegimeError(str(report), report=report)
    return report
