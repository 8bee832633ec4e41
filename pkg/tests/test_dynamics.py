import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from jcpath.errors import DomainError, IntervalError, RegimeError, RWAWarning, TruncationWarning
from jcpath.hilbert import (
    ATOM,
    FIELD1,
    SIGMA_Z,
    CompositeState,
    OperatorMatrix,
    SpaceShape,
    coherent_state,
    embed,
    expectation,
    fock_state,
    number_op,
    tensor,
)
from jcpath.dynamics import (
    SystemParams,
    branch_excitation_number,
    compose,
    controlled_propagator,
    dispersive_propagator,
    excitation_number,
    free_hamiltonian,
    interaction_hamiltonian,
    jc_hamiltonian,
    klimov_W,
    numeric_expm,
    free_propagator,
)

E_VEC = np.array([1.0, 0.0])
G_VEC = np.array([0.0, 1.0])


def params(n_max=6, **kw):
    base = dict(omega_a=7.2, omega_0=7.0, omega_1=7.5, g_0=0.4, g_1=0.7, n_max=n_max)
    base.update(kw)
    return SystemParams(**base)


def random_state(shape, rng):
    v = rng.normal(size=shape.dim) + 1j * rng.normal(size=shape.dim)
    return CompositeState.from_unnormalized(shape, v)


def test_free_hamiltonian_diagonal():
    p = params(n_max=3)
    h = free_hamiltonian(p)
    psi = tensor([[1, 0], E_VEC, fock_state(0, 3), fock_state(0, 3)])
    assert expectation(h, psi) == pytest.approx(p.omega_a / 2)
    psi = tensor([[1, 0], G_VEC, fock_state(2, 3), fock_state(1, 3)])
    assert expectation(h, psi) == pytest.approx(-p.omega_a / 2 + 2 * p.omega_0 + p.omega_1)
    assert np.max(np.abs(h.entries - h.entries.conj().T)) <= 1e-14


def test_interaction_hamiltonian_conserves_branch_excitations():
    p = params(n_max=4)
    h = interaction_hamiltonian(p)
    assert np.max(np.abs(h.entries - h.entries.conj().T)) <= 1e-14
    assert np.max(np.abs(h.commutator(branch_excitation_number(p.shape)))) <= 1e-12


def test_interaction_hamiltonian_decoupled_limit():
    p = params(n_max=3, g_0=0.0, g_1=0.0)
    assert np.allclose(interaction_hamiltonian(p).entries, free_hamiltonian(p).entries, atol=0)


def test_rwa_warning():
    with pytest.warns(RWAWarning):
        SystemParams(1.0, 1.0, 1.0, 0.5, 0.5, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        params()


def test_system_params_validation():
    with pytest.raises(DomainError):
        SystemParams(-1.0, 1.0, 1.0, 0.01, 0.01, 3)
    with pytest.raises(DomainError):
        SystemParams(1.0, 1.0, 1.0, 0.01, 0.01, 0)


def test_klimov_identity_at_zero():
    assert np.allclose(klimov_W(params(), 0, 0.0).entries, np.eye(params().shape.dim))


def test_klimov_resonant_single_cavity():
    p = params(omega_a=7.0)
    n, dt = 2, 1.3
    w = klimov_W(p, 0, dt)
    psi = tensor([[1, 0], E_VEC, fock_state(n, 6), fock_state(0, 6)])
    out = CompositeState(p.shape, w.entries @ psi.amplitudes)
    a = p.g_0 * math.sqrt(n + 1) * dt
    assert out.amplitude(0, 0, n, 0) == pytest.approx(math.cos(a), abs=1e-14)
    assert out.amplitude(0, 1, n + 1, 0) == pytest.approx(-1j * math.sin(a), abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.0, 20.0), st.integers(0, 1))
def test_klimov_matches_expm(g, delta, dt, k):
    p = SystemParams(7.0 + delta, 7.0, 7.0, g, g, 6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        v = jc_hamiltonian(p, k).entries - p.omega(k) * excitation_number(p.shape, k).entries
    assert np.max(np.abs(klimov_W(p, k, dt).entries - expm(-1j * v * dt))) <= 1e-10


def test_klimov_zero_coupling_zero_detuning():
    p = SystemParams(7.0, 7.0, 7.0, 0.0, 0.0, 4)
    assert np.allclose(klimov_W(p, 0, 3.0).entries, np.eye(p.shape.dim))


@pytest.mark.filterwarnings("ignore::jcpath.errors.TruncationWarning")
def test_controlled_identity_and_interval_error():
    p = params()
    psi = random_state(p.shape, np.random.default_rng(0))
    assert np.allclose(controlled_propagator(p, 2.0, 2.0).apply(psi).amplitudes, psi.amplitudes, atol=1e-15)
    with pytest.raises(IntervalError):
        controlled_propagator(p, 2.0, 1.0)


def test_controlled_spectator_photons_invariant():
    p = params()
    psi = tensor([[1, 0], E_VEC, fock_state(2, 6), coherent_state(0.9, 6, tol=1e-3)])
    n1 = embed(number_op(6), FIELD1, p.shape)
    before = expectation(n1, psi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        after = expectation(n1, controlled_propagator(p, 0, 4.2).apply(psi))
    assert after == pytest.approx(before, abs=1e-12)


@pytest.mark.parametrize("delta", [0.0, 0.3, -0.5])
def test_controlled_matches_expm(delta):
    p = SystemParams(7.0 + delta, 7.0, 7.0 + delta - 0.2, 0.6, 0.9, 6)
    u = controlled_propagator(p, 0.5, 3.7).matrix
    ref = numeric_expm(interaction_hamiltonian(p), 3.2).matrix
    assert np.max(np.abs(u.entries - ref.entries)) <= 1e-9
    rng = np.random.default_rng(1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(3):
            psi = random_state(p.shape, rng)
            a = controlled_propagator(p, 0.5, 3.7).apply(psi)
            b = numeric_expm(interaction_hamiltonian(p), 3.2).apply(psi)
            assert np.max(np.abs(a.amplitudes - b.amplitudes)) <= 1e-9


def test_propagators_unitary():
    p = params()
    for prop in (controlled_propagator(p, 0, 5.0), free_propagator(p, 1.0, 4.0),
                 numeric_expm(interaction_hamiltonian(p), 2.0)):
        assert prop.matrix.unitarity_error() <= 1e-10


def test_composition_equals_single_interval():
    p = params()
    whole = controlled_propagator(p, 0.0, 5.0).matrix.entries
    parts = compose(controlled_propagator(p, 0.0, 2.1), controlled_propagator(p, 2.1, 5.0)).matrix.entries
    assert np.max(np.abs(whole - parts)) <= 1e-9
    with pytest.raises(IntervalError):
        compose(controlled_propagator(p, 0.0, 1.0), controlled_propagator(p, 2.0, 3.0))


def test_numeric_expm_basics():
    shape = SpaceShape((2,))
    zero = OperatorMatrix(shape, np.zeros((2, 2)), hermitian=True)
    assert np.allclose(numeric_expm(zero, 1.0).matrix.entries, np.eye(2))
    assert np.allclose(numeric_expm(SIGMA_Z, math.pi).matrix.entries, -np.eye(2), atol=1e-15)
    u1 = numeric_expm(SIGMA_Z, 0.4).matrix.entries
    assert np.allclose(u1 @ u1, numeric_expm(SIGMA_Z, 0.8).matrix.entries, atol=1e-10)
    with pytest.raises(DomainError):
        numeric_expm(OperatorMatrix(shape, [[0, 1], [0, 0]]), 1.0)


def test_excitation_number_conserved_per_branch():
    p = SystemParams(7.3, 7.0, 7.6, 0.5, 0.8, 7)
    rng = np.random.default_rng(3)
    psi = tensor([[0.6, 0.8], E_VEC, fock_state(2, 7), fock_state(1, 7)])
    nb = branch_excitation_number(p.shape)
    n0 = expectation(nb, psi)
    t = 0.0
    for dt in rng.uniform(0.1, 3.0, 5):
        psi = controlled_propagator(p, t, t + dt).apply(psi)
        t += dt
        assert expectation(nb, psi) == pytest.approx(n0, abs=1e-10)


def test_truncation_edge_warning():
    p = params(n_max=2)
    psi = tensor([[1, 0], E_VEC, fock_state(2, 2), fock_state(0, 2)])
    with pytest.warns(TruncationWarning):
        controlled_propagator(p, 0, 1.0).apply(psi)


def dispersive_params(n_max=28):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SystemParams.identical(1000.0, 1 / 0.015, 1.0, n_max)


def test_dispersive_propagator_diagonal_and_phase():
    p = dispersive_params(n_max=4)
    t_m = math.pi / (2 * 0.015 ** 2 * p.delta(0))
    u = dispersive_propagator(p, t_m).matrix.entries
    assert np.count_nonzero(u - np.diag(np.diag(u))) == 0
    chi = p.g_0 ** 2 / p.delta(0)
    n, m = 3, 2
    psi = tensor([[1, 0], E_VEC, fock_state(n, 4), fock_state(m, 4)])
    phase = -((p.omega_a + chi) / 2 + (p.omega_0 + chi) * n + chi / 2 + p.omega_1 * m) * t_m
    out = u @ psi.amplitudes
    assert out[np.flatnonzero(psi.amplitudes)[0]] == pytest.approx(np.exp(1j * phase), abs=1e-9)


def test_dispersive_field_becomes_rotated_coherent_state():
    p = dispersive_params()
    alpha = math.sqrt(1.155)
    t_m = math.pi * p.delta(0) / (2 * p.g_0 ** 2)
    field = coherent_state(alpha, 28)
    s = 1 / math.sqrt(2)
    psi = tensor([[1, 0], [s, s], field, field])
    out = dispersive_propagator(p, t_m).apply(psi).tensor[0]
    for atom in (0, 1):
        branch = out[atom].reshape(29, 29)
        f0 = branch.sum(axis=1)
        f0 = f0 / np.linalg.norm(f0)
        sign = 1 if atom == 0 else -1
        # chi t_m = pi/2 rotates the field by -+i on top of the free rotation
        target = coherent_state(-1j * sign * alpha * np.exp(-1j * p.omega_0 * t_m), 28)
        assert abs(np.vdot(target, f0)) ** 2 == pytest.approx(1, abs=1e-9)


def test_dispersive_regime_refusal():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = SystemParams.identical(1000.0, 10.0, 1.0, 10)
        q = SystemParams(1000.0, 990.0, 980.0, 0.1, 0.1, 10)
    with pytest.raises(RegimeError):
        dispersive_propagator(p, 1.0)
    with pytest.raises(RegimeError):
        dispersive_propagator(q, 1.0)


def test_dispersive_matches_full_model():
    p = dispersive_params()
    t_m = math.pi * p.delta(0) / (2 * p.g_0 ** 2)
    field = coherent_state(math.sqrt(1.155), 28)
    s = 1 / math.sqrt(2)
    psi = tensor([[s, s], [s * np.exp(0.3j), s], field, field])
    a = dispersive_propagator(p, t_m).apply(psi)
    b = controlled_propagator(p, 0.0, t_m).apply(psi)
    assert abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 >= 0.99


def test_sigma_z_embedding_sign():
    shape = SpaceShape.composite(1)
    psi = tensor([[1, 0], G_VEC, fock_state(0, 1), fock_state(0, 1)])
    assert expectation(embed(SIGMA_Z, ATOM, shape), psi) == -1.0
