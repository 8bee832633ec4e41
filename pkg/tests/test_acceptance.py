"""Acceptance criteria, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line; the lines are
printed as they happen and again in the pytest terminal summary.
"""

import math
import time
import warnings
from pathlib import Path

import numpy as np

from jcpath.analytic import (
    RabiScenario,
    exchange_optimum,
    exchange_probability,
    inversion_identical_resonant,
    xi_coefficients,
)
from jcpath.dispersive import (
    DispersiveScenario,
    build_states,
    conditioned_state,
    double_cat_probability,
    interaction_time,
)
from jcpath.dynamics import (
    SystemParams,
    branch_excitation_number,
    compose,
    controlled_propagator,
    dispersive_propagator,
    free_propagator,
    interaction_hamiltonian,
    numeric_expm,
)
from jcpath.hilbert import CompositeState, coherent_state, fidelity
from jcpath.measurement import (
    atom_x_basis,
    atom_z_basis,
    control_basis,
    control_computational_basis,
    outcome_probabilities,
)
from jcpath.pipeline import condition_dispersive, evolve_dispersive, rabi_initial_state, run_rabi
from jcpath.scenarios import preset_config, preset_names, run_scenario

GOLDEN = Path(__file__).parent / "golden"
PI = math.pi
RESULTS = []


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def quiet(fn, *args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kw)


def random_fock_scenario(rng):
    g0, g1 = rng.uniform(0.05, 1.0, 2)
    d0, d1 = rng.choice([0.0, 0.3, -0.3], 2)
    omega_a = 10.0
    t = rng.uniform(0, 20 / max(g0, g1))
    return dict(
        theta=rng.uniform(0, PI / 2), phi=rng.uniform(0, 2 * PI),
        n0=int(rng.integers(0, 6)), n1=int(rng.integers(0, 6)),
        g0=g0, g1=g1, Delta0=d0 * g0, Delta1=d1 * g1,
        omega0=omega_a - d0 * g0, omega1=omega_a - d1 * g1, omega_a=omega_a,
        t_m=rng.uniform(0, t), t=t,
    )


def test_criterion_1_oracle_equivalence():
    rng = np.random.Generator(np.random.PCG64(1))
    start = time.perf_counter()
    worst_matrix = worst_state = 0.0
    for _ in range(200):
        c = random_fock_scenario(rng)
        p = quiet(SystemParams, c["omega_a"], c["omega0"], c["omega1"], c["g0"], c["g1"], 8)
        u = quiet(controlled_propagator, p, 0.0, c["t"])
        ref = numeric_expm(interaction_hamiltonian(p), c["t"])
        worst_matrix = max(worst_matrix, np.max(np.abs(u.matrix.entries - ref.matrix.entries)))
        psi = rabi_initial_state(c["theta"], c["phi"], c["n0"], c["n1"], 8)
        a = quiet(u.apply, psi).amplitudes
        b = ref.apply(psi).amplitudes
        worst_state = max(worst_state, np.max(np.abs(a - b)))
    elapsed = time.perf_counter() - start
    ok = worst_matrix <= 1e-9 and worst_state <= 1e-9 and elapsed <= 60
    report(1, ok, f"200 scenarios, max |U - expm| = {worst_matrix:.2e}, max state error = {worst_state:.2e}, "
                  f"{elapsed:.1f} s")


def test_criterion_2_population_inversion():
    g = 0.7
    t_m = np.linspace(0, 10, 50)
    tau = np.linspace(0, 10, 50)
    worst = 0.0
    for n in (0, 1, 5):
        for theta in (0.0, PI / 8, PI / 4):
            for tm in t_m:
                for dt in tau:
                    s = RabiScenario.identical(theta, g, n, tm, tm + dt)
                    closed = inversion_identical_resonant(theta, g, n, tm + dt, tm)
                    worst = max(worst, abs(closed - quiet(run_rabi, s).inversion()))
    t = np.linspace(0, 40, 2000)
    spread = 0.0
    for r in (0, 1, 2, 3):
        tm = r * PI / g
        curves = [inversion_identical_resonant(th, g, 0, tm + t, tm) for th in (0.0, PI / 8, PI / 4, 1.0, PI / 2)]
        spread = max(spread, np.max(np.ptp(np.array(curves), axis=0)))
    highest = -np.inf
    for r in (0, 1, 2, 3):
        tm = (2 * r + 1) * PI / (2 * g)
        highest = max(highest, np.max(inversion_identical_resonant(PI / 4, g, 0, tm + t, tm)))
    ok = worst <= 1e-9 and spread <= 1e-12 and highest <= 1e-12
    report(2, ok, f"grid max error {worst:.2e}; theta spread at r pi/g {spread:.2e}; "
                  f"max at (2r+1) pi/(2g), theta = pi/4: {highest:.2e}")


def test_criterion_3_photon_exchange():
    g = 0.2
    worst = 0.0
    for n in (1, 2, 10):
        for l in (1, 2):
            tm, t = exchange_optimum(n, g, l)
            worst = max(worst, abs(exchange_probability(RabiScenario.identical(PI / 4, g, n, tm, t)) - 0.5))
    tm, dt = np.meshgrid(np.linspace(0, 60, 400), np.linspace(0, 60, 400))
    lo, hi, mixed_max = np.inf, -np.inf, 0.0
    for n0, n1 in [(1, 1), (2, 2), (10, 10), (1, 0), (10, 0), (0, 3), (2, 5)]:
        for theta in (PI / 8, PI / 4, 1.2):
            p = exchange_probability(RabiScenario(theta, n0, n1, g, g, tm, tm + dt))
            lo, hi = min(lo, p.min()), max(hi, p.max())
            if n0 != n1:
                mixed_max = max(mixed_max, p.max())
    ok = worst <= 1e-12 and lo >= 0 and hi <= 0.5 + 1e-12 and mixed_max < 0.5
    report(3, ok, f"optimum error {worst:.2e}; grid range [{lo:.3g}, {hi:.15g}]; mixed max {mixed_max:.6f}")


def test_criterion_4_xi_normalization():
    rng = np.random.Generator(np.random.PCG64(4))
    worst_norm = worst_amp = 0.0
    for _ in range(500):
        c = random_fock_scenario(rng)
        if c["Delta0"] == 0 and c["Delta1"] == 0:
            c["Delta0"], c["omega0"] = 0.3 * c["g0"], c["omega_a"] - 0.3 * c["g0"]
        s = RabiScenario(c["theta"], c["n0"], c["n1"], c["g0"], c["g1"], c["t_m"], c["t"], c["phi"],
                         c["Delta0"], c["Delta1"], c["omega0"], c["omega1"])
        xi = xi_coefficients(s)
        worst_norm = max(worst_norm, abs(np.sum(xi.probabilities) - 1))
        run = quiet(run_rabi, s, n_max=8)
        amp = np.array([run.state.amplitude(*b) if min(b[2:]) >= 0 else 0.0 for b in xi.basis])
        worst_amp = max(worst_amp, np.max(np.abs(amp - xi.xi / xi.norm_N0)))
    ok = worst_norm <= 1e-10 and worst_amp <= 1e-9
    report(4, ok, f"500 detuned scenarios, norm error {worst_norm:.2e}, amplitude error {worst_amp:.2e}")


def fig8_grid():
    theta = np.linspace(0, 2 * PI, 360, endpoint=False)
    alpha_sq = np.linspace(0, 5, 101)[1:]
    return double_cat_probability(theta[:, None], alpha_sq[None, :]), theta, alpha_sq


def test_criterion_5_double_cat_probability():
    point = float(double_cat_probability(2.25, 1.155))
    grid, theta, alpha_sq = fig8_grid()
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    top = grid[i, j]
    part_a = abs(point - 0.35) <= 0.005
    part_b = 0.34 <= top <= 0.36
    report(5, part_a and part_b,
           f"(a) P(2.25, 1.155) = {point:.6f} {'ok' if part_a else 'out of 0.35 +- 0.005'}; "
           f"(b) grid max {top:.5f} at Theta = {theta[i]:.4f}, |alpha|^2 = {alpha_sq[j]:.2f} "
           f"{'in' if part_b else 'outside'} [0.34, 0.36]")


def dispersive_case(m, sign):
    p = quiet(SystemParams.identical, 1000.0, sign / 0.015, 1.0, 28)
    t_m = interaction_time(m, p)
    return DispersiveScenario(math.sqrt(1.155), 0.4, m, 0.2, 0.2 + t_m + 0.83, p)


def test_criterion_6_cat_bell_fidelities():
    pairs = [(c, a) for c in "+-" for a in ("e", "g", "+x", "-x")]
    worst_disp, worst_exact = 1.0, 1.0
    for m, sign in [(1, 1), (2, 1), (1, -1)]:
        s = dispersive_case(m, sign)
        states = build_states(s)
        disp = evolve_dispersive(s)
        exact = evolve_dispersive(s, exact=True)
        for c, a in pairs:
            ref = conditioned_state(s, c, a, states).amplitudes
            worst_disp = min(worst_disp, fidelity(condition_dispersive(disp, c, a)[0].amplitudes, ref))
            worst_exact = min(worst_exact, fidelity(condition_dispersive(exact, c, a)[0].amplitudes, ref))
    ok = worst_disp >= 1 - 1e-9 and worst_exact >= 0.99
    report(6, ok, f"8 outcome pairs x 3 schedules, min fidelity vs dispersive {worst_disp:.12f}, "
                  f"vs exact JC {worst_exact:.6f}")


def test_criterion_7_overlaps():
    worst = 0.0
    for a2 in (0.1, 0.5, 1.155, 2.3, 4.0):
        a = math.sqrt(a2)
        ov = abs(np.vdot(coherent_state(-a, 40), coherent_state(a, 40)))
        worst = max(worst, abs(ov - math.exp(-2 * a2)))
    at_1155 = abs(np.vdot(coherent_state(-math.sqrt(1.155), 28), coherent_state(math.sqrt(1.155), 28)))
    at_23 = abs(np.vdot(coherent_state(-math.sqrt(2.3), 28), coherent_state(math.sqrt(2.3), 28)))
    ok = worst <= 1e-8 and abs(at_1155 - 0.099) <= 0.001 and at_23 <= 1e-2
    report(7, ok, f"max |overlap - exp(-2|a|^2)| = {worst:.2e}; |a|^2 = 1.155: {at_1155:.5f}; "
                  f"|a|^2 = 2.3: {at_23:.5f}")


def test_criterion_8_conservation_and_unitarity():
    rng = np.random.Generator(np.random.PCG64(8))
    worst_u = worst_n = worst_p = 0.0
    for _ in range(20):
        c = random_fock_scenario(rng)
        p = quiet(SystemParams, c["omega_a"], c["omega0"], c["omega1"], c["g0"], c["g1"], 6)
        nb = branch_excitation_number(p.shape).entries
        props = [
            quiet(controlled_propagator, p, 0.0, c["t"]),
            free_propagator(p, 0.0, c["t"]),
            numeric_expm(interaction_hamiltonian(p), c["t"]),
            compose(quiet(controlled_propagator, p, 0.0, c["t_m"]), quiet(controlled_propagator, p, c["t_m"], c["t"])),
        ]
        for u in props:
            m = u.matrix.entries
            worst_u = max(worst_u, u.matrix.unitarity_error())
            worst_n = max(worst_n, np.max(np.abs(m @ nb - nb @ m)))
        v = rng.normal(size=p.shape.dim) + 1j * rng.normal(size=p.shape.dim)
        psi = CompositeState.from_unnormalized(p.shape, v)
        for basis in (control_basis(c["theta"], c["phi"]), control_computational_basis(), atom_z_basis(),
                      atom_x_basis()):
            worst_p = max(worst_p, abs(sum(outcome_probabilities(psi, basis).values()) - 1))
    s = dispersive_case(1, 1)
    d = dispersive_propagator(quiet(SystemParams.identical, 1000.0, 1 / 0.015, 1.0, 10), s.t_m)
    worst_u = max(worst_u, d.matrix.unitarity_error())
    psi = evolve_dispersive(s)
    for c in "+-":
        post, rec, _ = condition_dispersive(psi, c)
        for basis in (atom_z_basis(), atom_x_basis()):
            worst_p = max(worst_p, abs(sum(outcome_probabilities(post, basis).values()) - 1))
    ok = worst_u <= 1e-10 and worst_n <= 1e-10 and worst_p <= 1e-10
    report(8, ok, f"unitarity error {worst_u:.2e}; branch excitation commutator {worst_n:.2e}; "
                  f"probability sum error {worst_p:.2e}")


def test_criterion_9_golden_files():
    mismatched = []
    for name in preset_names():
        expected = (GOLDEN / f"{name}.csv").read_text(encoding="utf-8")
        if run_scenario(preset_config(name)).to_csv() != expected:
            mismatched.append(name)
    lines = (GOLDEN / "fig8.csv").read_text(encoding="utf-8").splitlines()
    body = [l for l in lines if not l.startswith("#")]
    col = body[0].split(",").index("P")
    csv_max = max(float(l.split(",")[col]) for l in body[1:])
    grid_max = float(np.max(fig8_grid()[0]))
    ok = not mismatched and csv_max == grid_max
    report(9, ok, f"{len(preset_names()) - len(mismatched)}/{len(preset_names())} presets byte-identical"
                  f"{' (mismatch: ' + ', '.join(mismatched) + ')' if mismatched else ''}; "
                  f"fig8 max {csv_max!r} vs criterion-5 max {grid_max!r}")
