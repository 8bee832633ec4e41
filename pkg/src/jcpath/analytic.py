"""Closed-form observables for an atom sent through two cavities on a superposed path.

The atom starts excited, the cavities in Fock states ``|n0>, |n1>`` and the
control qubit in ``cos(theta)|0> + e^{i phi} sin(theta)|1>``. The control is
projected back onto that state at ``t_m`` and the system is observed at
``t >= t_m``.

Every function here is vectorized over ``t`` and ``t_m``: pass numpy arrays
(broadcast against each other) to evaluate whole grids at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

RESONANCE_TOL = 1e-15


@dataclass(frozen=True)
class RabiScenario:
    """Parameters of one Fock-state run.

    ``omega_a`` is implied by ``omega0 + Delta0`` and must agree with
    ``omega1 + Delta1``.
    """

    theta: float
    n0: int
    n1: int
    g0: float
    g1: float
    t_m: float | np.ndarray
    t: float | np.ndarray
    phi: float = 0.0
    Delta0: float = 0.0
    Delta1: float = 0.0
    omega0: float = 1.0
    omega1: float = 1.0

    def __post_init__(self):
        if self.n0 < 0 or self.n1 < 0 or int(self.n0) != self.n0 or int(self.n1) != self.n1:
            raise DomainError("photon numbers must be non-negative integers")
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "n1", int(self.n1))
        t_m = np.asarray(self.t_m, dtype=float)
        t = np.asarray(self.t, dtype=float)
        if np.any(t_m < 0) or np.any(t < t_m):
            raise DomainError("need t >= t_m >= 0")
        if not math.isclose(self.omega0 + self.Delta0, self.omega1 + self.Delta1, rel_tol=1e-12, abs_tol=1e-12):
            raise DomainError("omega0 + Delta0 and omega1 + Delta1 disagree on omega_a")

    @classmethod
    def identical(cls, theta, g, n, t_m, t, phi=0.0, omega=1.0) -> RabiScenario:
        """Identical resonant cavities with equal photon numbers."""
        return cls(theta, n, n, g, g, t_m, t, phi=phi, omega0=omega, omega1=omega)

    @property
    def omega_a(self) -> float:
        return self.omega0 + self.Delta0

    @property
    def resonant(self) -> bool:
        return abs(self.Delta0) <= RESONANCE_TOL and abs(self.Delta1) <= RESONANCE_TOL

    @property
    def identical_cavities(self) -> bool:
        return self.g0 == self.g1 and self.n0 == self.n1

    def g(self, k):
        return (self.g0, self.g1)[k]

    def n(self, k):
        return (self.n0, self.n1)[k]

    def delta(self, k):
        return (self.Delta0, self.Delta1)[k]

    def omega(self, k):
        return (self.omega0, self.omega1)[k]

    def swapped(self) -> RabiScenario:
        """Relabel the cavities and move ``theta`` to ``pi/2 - theta``."""
        return RabiScenario(
            math.pi / 2 - self.theta, self.n1, self.n0, self.g1, self.g0, self.t_m, self.t,
            phi=self.phi, Delta0=self.Delta1, Delta1=self.Delta0,
            omega0=self.omega1, omega1=self.omega0,
        )


@dataclass(frozen=True)
class XiCoefficients:
    """Amplitudes of the eight basis states reachable from ``|e, n0, n1>``.

    ``xi[j]`` multiplies ``basis[j] = (control, atom, n0, n1)``; the state at
    ``t`` is ``sum_j xi[j] |basis[j]> / norm_N0``. Entries whose basis state
    would need a negative photon number are zero.
    """

    xi: np.ndarray
    norm_N0: np.ndarray | float
    basis: tuple[tuple[int, int, int, int], ...]

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.xi) ** 2 / np.asarray(self.norm_N0) ** 2

    @property
    def shuttle_probabilities(self) -> tuple:
        """Probabilities of ``|e, n0-1, n1+1>`` (branch 0) and ``|e, n0+1, n1-1>`` (branch 1)."""
        p = self.probabilities
        return p[3], p[7]


def omega_rabi(g, n, delta):
    """Generalized Rabi frequency ``sqrt(g^2 n + delta^2 / 4)``."""
    return np.sqrt(g * g * n + 0.25 * delta * delta)


def f_c(n, delta, g, t):
    """Amplitude kept on ``|e, n-1>`` (equivalently ``conj`` on ``|g, n>``)."""
    om = omega_rabi(g, n, delta)
    t = np.asarray(t, dtype=float)
    s = t * np.sinc(om * t / np.pi)
    return np.cos(om * t) - 0.5j * delta * s


def h_c(n, delta, g, t):
    """Amplitude transferred between ``|e, n-1>`` and ``|g, n>``."""
    om = omega_rabi(g, n, delta)
    t = np.asarray(t, dtype=float)
    return -1j * g * math.sqrt(n) * t * np.sinc(om * t / np.pi)


def _branch_phase(s: RabiScenario, k, atom_sign, n0, n1, dt):
    """Phase of ``Lambda_k`` on ``|atom, n0, n1>``: ``omega_a`` replaced by ``omega_k``."""
    energy = 0.5 * s.omega(k) * atom_sign + s.omega0 * n0 + s.omega1 * n1
    return np.exp(-1j * energy * np.asarray(dt, dtype=float))


def xi_coefficients(s: RabiScenario) -> XiCoefficients:
    """Amplitudes of the state at ``t`` in the reachable basis (general detuning)."""
    c, sn = math.cos(s.theta), math.sin(s.theta)
    ep = np.exp(1j * s.phi)
    n0, n1 = s.n0, s.n1
    t_m = np.asarray(s.t_m, dtype=float)
    t = np.asarray(s.t, dtype=float)
    tau = t - t_m

    def f(n, k, dt):
        return f_c(n, s.delta(k), s.g(k), dt)

    def h(n, k, dt):
        return h_c(n, s.delta(k), s.g(k), dt)

    P = lambda k, sgn, a, b, dt: _branch_phase(s, k, sgn, a, b, dt)  # noqa: E731
    p0_tm = P(0, 1, n0, n1, t_m)
    p1_tm = P(1, 1, n0, n1, t_m)

    xi1 = c ** 3 * P(0, 1, n0, n1, t) * f(n0 + 1, 0, t) + c * sn ** 2 * P(0, 1, n0, n1, tau) * p1_tm * f(
        n0 + 1, 0, tau
    ) * f(n1 + 1, 1, t_m)
    xi2 = c ** 3 * P(0, -1, n0 + 1, n1, t) * h(n0 + 1, 0, t) + c * sn ** 2 * P(0, -1, n0 + 1, n1, tau) * p1_tm * h(
        n0 + 1, 0, tau
    ) * f(n1 + 1, 1, t_m)
    xi3 = c * sn ** 2 * P(0, -1, n0, n1 + 1, tau) * p1_tm * h(n1 + 1, 1, t_m) * np.conj(f(n0, 0, tau))
    xi4 = c * sn ** 2 * P(0, 1, n0 - 1, n1 + 1, tau) * p1_tm * h(n1 + 1, 1, t_m) * h(n0, 0, tau)
    xi5 = ep * (
        c ** 2 * sn * P(1, 1, n0, n1, tau) * p0_tm * f(n0 + 1, 0, t_m) * f(n1 + 1, 1, tau)
        + sn ** 3 * P(1, 1, n0, n1, t) * f(n1 + 1, 1, t)
    )
    xi6 = ep * (
        c ** 2 * sn * P(1, -1, n0, n1 + 1, tau) * p0_tm * f(n0 + 1, 0, t_m) * h(n1 + 1, 1, tau)
        + sn ** 3 * P(1, -1, n0, n1 + 1, t) * h(n1 + 1, 1, t)
    )
    xi7 = ep * c ** 2 * sn * P(1, -1, n0 + 1, n1, tau) * p0_tm * h(n0 + 1, 0, t_m) * np.conj(f(n1, 1, tau))
    xi8 = ep * c ** 2 * sn * P(1, 1, n0 + 1, n1 - 1, tau) * p0_tm * h(n0 + 1, 0, t_m) * h(n1, 1, tau)

    xi = np.array(np.broadcast_arrays(xi1, xi2, xi3, xi4, xi5, xi6, xi7, xi8))
    basis = (
        (0, 0, n0, n1), (0, 1, n0 + 1, n1), (0, 1, n0, n1 + 1), (0, 0, n0 - 1, n1 + 1),
        (1, 0, n0, n1), (1, 1, n0, n1 + 1), (1, 1, n0 + 1, n1), (1, 0, n0 + 1, n1 - 1),
    )
    return XiCoefficients(xi, norm_N0(s), basis)


def norm_N0(s: RabiScenario):
    """Norm of the state right after the control projection (its square is the outcome probability)."""
    c2, s2 = math.cos(s.theta) ** 2, math.sin(s.theta) ** 2
    t_m = np.asarray(s.t_m, dtype=float)
    if s.resonant:
        overlap = np.cos(t_m * s.g0 * math.sqrt(s.n0 + 1)) * np.cos(t_m * s.g1 * math.sqrt(s.n1 + 1))
    else:
        w0 = _branch_phase(s, 0, 1, s.n0, s.n1, t_m) * f_c(s.n0 + 1, s.Delta0, s.g0, t_m)
        w1 = _branch_phase(s, 1, 1, s.n0, s.n1, t_m) * f_c(s.n1 + 1, s.Delta1, s.g1, t_m)
        overlap = np.real(np.conj(w0) * w1)
    return np.sqrt(c2 * c2 + s2 * s2 + 2 * c2 * s2 * overlap)


def _atom_sign_weights(xi: XiCoefficients):
    return np.array([1.0 if b[1] == 0 else -1.0 for b in xi.basis])


def _expect_from_xi(xi: XiCoefficients, values):
    p = xi.probabilities
    values = np.asarray(values, dtype=float).reshape((8,) + (1,) * (p.ndim - 1))
    return np.sum(p * values, axis=0)


def inversion(s: RabiScenario):
    """Population inversion ``<sigma_z>`` at time ``t``.

    Resonant scenarios use the explicit trigonometric expansion (identical
    cavities go through :func:`inversion_identical_resonant`); detuned ones
    are assembled from the xi amplitudes.
    """
    if not s.resonant:
        xi = xi_coefficients(s)
        return _expect_from_xi(xi, _atom_sign_weights(xi))
    if s.identical_cavities:
        return inversion_identical_resonant(s.theta, s.g0, s.n0, s.t, s.t_m)
    c, sn = math.cos(s.theta), math.sin(s.theta)
    t = np.asarray(s.t, dtype=float)
    t_m = np.asarray(s.t_m, dtype=float)
    tau = t - t_m
    a = [s.g(k) * math.sqrt(s.n(k) + 1) for k in (0, 1)]
    b = [s.g(k) * math.sqrt(s.n(k)) for k in (0, 1)]

    def same(j):  # <T_jj^dag sz T_jj>
        return np.cos(2 * a[j] * t)

    def cross(j, i):  # Re <T_ji^dag sz T_jj>
        return np.cos((2 * t - t_m) * a[j]) * np.cos(t_m * a[i])

    def mixed(j, i):  # <T_ji^dag sz T_ji>
        return np.cos(2 * tau * a[j]) * np.cos(t_m * a[i]) ** 2 - np.cos(2 * tau * b[j]) * np.sin(t_m * a[i]) ** 2

    total = (
        c ** 6 * same(0) + sn ** 6 * same(1)
        + 2 * c ** 4 * sn ** 2 * cross(0, 1) + 2 * sn ** 4 * c ** 2 * cross(1, 0)
        + c ** 2 * sn ** 4 * mixed(0, 1) + sn ** 2 * c ** 4 * mixed(1, 0)
    )
    return total / norm_N0(s) ** 2


def inversion_identical_resonant(theta, g, n, t, t_m):
    """``<sigma_z>`` for identical resonant cavities holding ``n`` photons each."""
    t = np.asarray(t, dtype=float)
    t_m = np.asarray(t_m, dtype=float)
    a = g * math.sqrt(n + 1)
    b = g * math.sqrt(n)
    s2 = math.sin(2 * theta) ** 2
    c4 = math.cos(4 * theta)
    num = 2 * (3 + c4) * np.cos(2 * a * t) + 2 * s2 * (
        np.cos(2 * a * (t - t_m)) * (1 + np.cos(a * t_m) ** 2) - np.cos(2 * b * (t - t_m)) * np.sin(a * t_m) ** 2
    )
    return num / (7 + c4 + 2 * s2 * np.cos(2 * a * t_m))


def single_cavity_inversion(g, n, delta, t):
    """Ordinary JC inversion for an excited atom in one cavity with ``n`` photons."""
    om = omega_rabi(g, n + 1, delta)
    r = 0.0 if om == 0 else delta * delta / (4 * om * om)
    return r + (1 - r) * np.cos(2 * om * np.asarray(t, dtype=float))


def photon_average(s: RabiScenario, j: int):
    """Mean photon number of cavity ``j`` at time ``t``.

    Resonant scenarios use the explicit expansion; detuned ones the xi
    amplitudes.
    """
    if j not in (0, 1):
        raise DomainError(f"cavity index must be 0 or 1, got {j}")
    if not s.resonant:
        xi = xi_coefficients(s)
        return _expect_from_xi(xi, [b[2 + j] for b in xi.basis])
    i = 1 - j
    c, sn = math.cos(s.theta), math.sin(s.theta)
    own, other = (c, sn) if j == 0 else (sn, c)
    t = np.asarray(s.t, dtype=float)
    t_m = np.asarray(s.t_m, dtype=float)
    tau = t - t_m
    aj = s.g(j) * math.sqrt(s.n(j) + 1)
    bj = s.g(j) * math.sqrt(s.n(j))
    ai = s.g(i) * math.sqrt(s.n(i) + 1)
    ci, si, sj = np.cos(ai * t_m), np.sin(ai * t_m), np.sin(aj * t_m)
    excess = (
        own ** 6 * np.sin(aj * t) ** 2
        + own ** 2 * other ** 4 * (ci ** 2 * np.sin(aj * tau) ** 2 - si ** 2 * np.sin(bj * tau) ** 2)
        + 2 * own ** 4 * other ** 2 * ci * np.sin(aj * tau) * np.sin(aj * t)
        + other ** 2 * own ** 4 * sj ** 2
    )
    return s.n(j) + excess / norm_N0(s) ** 2


def photon_average_identical(g, n, t, t_m):
    """Mean photon number per cavity for identical resonant cavities at ``theta = pi/4``."""
    t = np.asarray(t, dtype=float)
    t_m = np.asarray(t_m, dtype=float)
    a = g * math.sqrt(n + 1)
    b = g * math.sqrt(n)
    ca, sa = np.cos(a * t_m), np.sin(a * t_m)
    num = (np.sin(a * t) + ca * np.sin(a * (t - t_m))) ** 2 + sa ** 2 * np.cos(b * (t - t_m)) ** 2
    return n + num / (4 * (1 + ca ** 2))


def photon_average_uncorrected(s: RabiScenario, j: int):
    """Resonant photon average built with ``<T_ij^dag n_i T_ij> = sin^2(a_i tau) + n_i``.

    That coefficient drops the ``|g>`` branch of the second passage, so this
    form deviates from the simulation (by up to about 0.3 photons) whenever
    ``0 < theta < pi/2``. Kept only to quantify the difference; use
    :func:`photon_average`.
    """
    if j not in (0, 1):
        raise DomainError(f"cavity index must be 0 or 1, got {j}")
    i = 1 - j
    c, sn = math.cos(s.theta), math.sin(s.theta)
    own, other = (c, sn) if j == 0 else (sn, c)
    t = np.asarray(s.t, dtype=float)
    t_m = np.asarray(s.t_m, dtype=float)
    aj = s.g(j) * math.sqrt(s.n(j) + 1)
    ai = s.g(i) * math.sqrt(s.n(i) + 1)
    cross = np.sin(aj * t_m) ** 2 + 2 * np.sin(aj * t) * np.sin(aj * (t - t_m)) * np.cos(ai * t_m)
    excess = (
        own ** 2 * other ** 4 * np.sin(aj * (t - t_m)) ** 2
        + own ** 6 * np.sin(aj * t) ** 2
        + own ** 4 * other ** 2 * cross
    )
    return s.n(j) + excess / norm_N0(s) ** 2


def photon_average_identical_uncorrected(g, n, t, t_m):
    """Identical-cavity, ``theta = pi/4`` reduction of :func:`photon_average_uncorrected`."""
    t = np.asarray(t, dtype=float)
    t_m = np.asarray(t_m, dtype=float)
    a = g * math.sqrt(n + 1)
    return n - (np.cos(2 * a * (t - t_m)) + np.cos(2 * a * t) - 2) / (2 * (np.cos(2 * a * t_m) + 3))


def exchange_probability(s: RabiScenario):
    """Probability that the atom ends excited having moved one photon between the cavities.

    Uses the closed form for resonant scenarios at ``theta = pi/4``; any
    other scenario is evaluated from the xi amplitudes.
    """
    if s.resonant and math.isclose(s.theta, math.pi / 4, abs_tol=1e-15):
        t = np.asarray(s.t, dtype=float)
        t_m = np.asarray(s.t_m, dtype=float)
        tau = t - t_m
        a0 = s.g0 * math.sqrt(s.n0 + 1)
        a1 = s.g1 * math.sqrt(s.n1 + 1)
        num = (
            np.sin(s.g1 * math.sqrt(s.n1) * tau) ** 2 * np.sin(a0 * t_m) ** 2
            + np.sin(s.g0 * math.sqrt(s.n0) * tau) ** 2 * np.sin(a1 * t_m) ** 2
        )
        return num / (4 * np.cos(a0 * t_m) * np.cos(a1 * t_m) + 4)
    p4, p8 = xi_coefficients(s).shuttle_probabilities
    return p4 + p8


def exchange_probability_identical(g, n, t, t_m):
    """Exchange probability for identical resonant cavities at ``theta = pi/4``."""
    t = np.asarray(t, dtype=float)
    t_m = np.asarray(t_m, dtype=float)
    a = g * math.sqrt(n + 1)
    return np.sin(g * math.sqrt(n) * (t - t_m)) ** 2 * np.sin(a * t_m) ** 2 / (np.cos(2 * a * t_m) + 3)


def exchange_optimum(n: int, g: float, l: int = 1) -> tuple[float, float]:
    """Times ``(t_m, t)`` at which identical cavities exchange a photon with probability 1/2."""
    if n < 1:
        raise DomainError("no photon to exchange when n = 0")
    if l < 1:
        raise DomainError(f"branch index l must be >= 1, got {l}")
    k = 2 * l - 1
    t_m = math.pi * k / (2 * g * math.sqrt(n + 1))
    t = math.pi / (2 * g) * (1 / math.sqrt(n) + 1 / math.sqrt(n + 1)) * k
    return t_m, t
