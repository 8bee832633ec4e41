"""Evaluate scenario configs into tables and write them as CSV."""

from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..analytic import (
    RabiScenario,
    exchange_probability,
    inversion,
    photon_average,
    single_cavity_inversion,
    xi_coefficients,
)
from ..dispersive import (
    DispersiveScenario,
    build_states,
    conditioned_state,
    double_cat_probability,
    interaction_time,
    n_max_estimate,
    require_regime,
    time_for_theta,
)
from ..dynamics import SystemParams
from ..errors import ConfigError, DomainError, IntervalError, ZeroProbabilityError
from ..hilbert import fidelity, kron, required_n_max
from ..measurement import atom_x_basis, atom_z_basis, control_basis, outcome_probability, measure
from ..pipeline import evolve_dispersive, run_rabi
from .config import ScenarioConfig

CHUNK = 256  # rows per work item; fixed so results never depend on the thread count
ORACLE_TOL = 1e-9
ATOM_CODES = {"e": 0, "g": 1, "+x": 2, "-x": 3}
CONTROL_CODES = {"+": 1, "-": -1}


@dataclass
class ResultTable:
    """Rectangular table of real values with a provenance header."""

    columns: list[str]
    rows: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))
        if np.isnan(self.rows).any() and "valid" not in self.columns:
            raise ValueError("NaN entries require a 'valid' flag column")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def select(self, names) -> ResultTable:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise ConfigError(f"unknown column(s) {', '.join(missing)}; available: {', '.join(self.columns)}",
                              "columns")
        names = list(names)
        if np.isnan(self.rows).any() and "valid" not in names:
            names.append("valid")
        idx = [self.columns.index(n) for n in names]
        return ResultTable(names, self.rows[:, idx], dict(self.provenance))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(["%.17g" % v for v in row])
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def provenance(cfg: ScenarioConfig, **extra) -> dict:
    info = {
        "generator": f"jcpath {__version__}",
        "numpy": np.__version__,
        "kind": cfg.kind,
        "figure": cfg.figure or "-",
        "units": cfg.units or "-",
        "config_sha256": cfg.sha256,
        "seed": cfg.seed,
    }
    info.update(extra)
    return info


# ---------------------------------------------------------------------------
# parameter resolution


def _pick(point: dict, name: str, k: int, default=None):
    """Value of ``name{k}`` falling back to the shared ``name``."""
    both = f"{name}{k}"
    if both in point:
        return point[both]
    if name in point:
        return point[name]
    if default is None:
        raise ConfigError(f"parameter {name} (or {name}0/{name}1) is required", name)
    return default


def _check_exclusive(cfg: ScenarioConfig, names) -> None:
    for name in names:
        if name in cfg.params and any(f"{name}{k}" in cfg.params for k in (0, 1)):
            raise ConfigError(f"{name} and {name}0/{name}1 both define the same quantity",
                              name, cfg.params[name].line)


def _as_int(name: str, value: float) -> int:
    if value != int(value) or value < 0:
        raise ConfigError(f"must be a non-negative integer, got {value!r}", name)
    return int(value)


def _time_scale(cfg: ScenarioConfig, g: float) -> float:
    if cfg.units != "inverse_g":
        return 1.0
    if g <= 0:
        raise ConfigError("times in units of 1/g need g > 0", "g")
    return 1.0 / g


def _fock_scenario(cfg: ScenarioConfig, point: dict, t_m, t) -> RabiScenario:
    g0, g1 = _pick(point, "g", 0), _pick(point, "g", 1)
    omega0, omega1 = _pick(point, "omega", 0, 1.0), _pick(point, "omega", 1, 1.0)
    delta0, delta1 = _pick(point, "Delta", 0, 0.0), _pick(point, "Delta", 1, 0.0)
    scale = _time_scale(cfg, g0)
    try:
        return RabiScenario(
            point["theta"], _as_int("n0", _pick(point, "n", 0)), _as_int("n1", _pick(point, "n", 1)),
            g0, g1, np.asarray(t_m) * scale, np.asarray(t) * scale, phi=point.get("phi", 0.0),
            Delta0=delta0, Delta1=delta1, omega0=omega0, omega1=omega1,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


_FOCK_OUTPUTS = {
    "rabi_inversion": ("inversion", lambda s, p: inversion(s)),
    "photon_average": ("photon_average", lambda s, p: photon_average(s, int(p.get("j", 0)))),
    "exchange_probability": ("exchange_probability", lambda s, p: exchange_probability(s)),
}


# ---------------------------------------------------------------------------
# grid evaluation


def _grid_points(cfg: ScenarioConfig):
    """Rows in grid order: the first swept parameter varies slowest."""
    swept = cfg.swept()
    fixed = {k: p.values[0] for k, p in cfg.params.items() if not p.swept}
    names = [p.name for p in swept]
    combos = list(itertools.product(*[p.values for p in swept])) if swept else [()]
    return names, fixed, combos


def _map_chunks(fn, n_rows: int, threads: int):
    chunks = [(i, min(i + CHUNK, n_rows)) for i in range(0, n_rows, CHUNK)]
    if threads <= 1 or len(chunks) <= 1:
        return [fn(a, b) for a, b in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ab: fn(*ab), chunks))


def _time_columns(names, grid, point, n):
    def col(name):
        return grid[:, names.index(name)] if name in names else np.full(n, point[name])
    return col("t_m"), col("t")


def _run_fock(cfg: ScenarioConfig, threads: int) -> ResultTable:
    _check_exclusive(cfg, ("g", "n", "Delta", "omega"))
    names, fixed, combos = _grid_points(cfg)
    n = len(combos)
    grid = np.array(combos, dtype=float).reshape(n, len(names))
    out_name, fn = _FOCK_OUTPUTS[cfg.kind]
    # only t and t_m swept: whole chunks go through the vectorized closed forms
    vectorized = all(k in ("t", "t_m") for k in names) and cfg.series not in ("g", "n", "n0", "n1", "g0", "g1")
    series = cfg.params[cfg.series] if cfg.series else None
    variants = [(out_name, {})] if series is None else [
        (f"{out_name}[{series.name}={lab}]", {series.name: v}) for v, lab in zip(series.values, series.labels)
    ]
    columns, blocks = list(names), [grid]
    flags = np.ones(n, dtype=bool)
    for col, override in variants:
        point = dict(fixed, **override)
        t_m, t = _time_columns(names, grid, point, n)
        ok = t >= t_m
        flags &= ok
        idx = np.flatnonzero(ok)

        def work(a, b, point=point, t_m=t_m, t=t, idx=idx):
            rows = idx[a:b]
            if vectorized:
                s = _fock_scenario(cfg, point, t_m[rows], t[rows])
                return np.broadcast_to(np.asarray(fn(s, point), dtype=float), rows.shape)
            out = []
            for r in rows:
                p = dict(point, **{k: grid[r, j] for j, k in enumerate(names)})
                out.append(float(fn(_fock_scenario(cfg, p, t_m[r], t[r]), p)))
            return np.array(out)

        values = np.full(n, np.nan)
        parts = _map_chunks(work, idx.size, threads)
        if parts:
            values[idx] = np.concatenate(parts)
        columns.append(col)
        blocks.append(values[:, None])
    if cfg.reference == "single_cavity":
        if cfg.kind != "rabi_inversion" or any(k not in ("t", "t_m") for k in names):
            raise ConfigError("the single-cavity reference needs a rabi_inversion sweep over t or t_m",
                              "reference")
        g0 = _pick(fixed, "g", 0)
        _, t = _time_columns(names, grid, dict(fixed, t_m=0.0), n)
        ref = single_cavity_inversion(g0, _as_int("n0", _pick(fixed, "n", 0)), _pick(fixed, "Delta", 0, 0.0),
                                      t * _time_scale(cfg, g0))
        columns.append("single_cavity")
        blocks.append(np.where(flags, ref, np.nan)[:, None])
    data = np.hstack(blocks)
    if not flags.all():
        columns.append("valid")
        data = np.column_stack([data, flags.astype(float)])
    return ResultTable(columns, data, provenance(cfg))


def _run_xi_table(cfg: ScenarioConfig, threads: int) -> ResultTable:
    _check_exclusive(cfg, ("g", "n", "Delta", "omega"))
    names, fixed, combos = _grid_points(cfg)
    if any(n not in ("t", "t_m") for n in names):
        raise ConfigError("xi_table sweeps only t and t_m", names[0])
    grid = np.array(combos, dtype=float).reshape(len(combos), len(names))
    t_m = grid[:, names.index("t_m")] if "t_m" in names else np.full(len(combos), fixed["t_m"])
    t = grid[:, names.index("t")] if "t" in names else np.full(len(combos), fixed["t"])
    ok = t >= t_m
    idx = np.flatnonzero(ok)
    scalar = {k: v for k, v in fixed.items() if k not in ("t", "t_m")}

    def work(a, b):
        rows = idx[a:b]
        xi = xi_coefficients(_fock_scenario(cfg, scalar, t_m[rows], t[rows]))
        p = xi.probabilities.reshape(8, -1)
        return np.column_stack([p.T, p.sum(axis=0), np.broadcast_to(np.asarray(xi.norm_N0) ** 2, rows.shape)])

    values = np.full((len(combos), 10), np.nan)
    parts = _map_chunks(work, idx.size, threads)
    if parts:
        values[idx] = np.concatenate(parts)
    columns = list(names) + [f"p_xi{j}" for j in range(1, 9)] + ["total", "control_probability"]
    data = np.column_stack([grid, values])
    if not ok.all():
        columns.append("valid")
        data = np.column_stack([data, ok.astype(float)])
    return ResultTable(columns, data, provenance(cfg))


def _run_catprob(cfg: ScenarioConfig, threads: int) -> ResultTable:
    names, fixed, combos = _grid_points(cfg)
    series = cfg.params[cfg.series] if cfg.series else None
    grid = np.array(combos, dtype=float).reshape(len(combos), len(names))
    columns, blocks = list(names), [grid]
    variants = [("P", {})] if series is None else [
        (f"P[{series.name}={lab}]", {series.name: v}) for v, lab in zip(series.values, series.labels)
    ]
    for col, override in variants:
        point = dict(fixed, **override)

        def col_of(name, point=point):
            return grid[:, names.index(name)] if name in names else np.full(len(combos), point[name])

        theta, a2 = col_of("Theta"), col_of("alpha_sq")
        if np.any(a2 < 0):
            raise ConfigError("|alpha|^2 must be non-negative", "alpha_sq", cfg.params["alpha_sq"].line)
        parts = _map_chunks(lambda a, b: np.atleast_1d(double_cat_probability(theta[a:b], a2[a:b])),
                            len(combos), threads)
        columns.append(col)
        blocks.append(np.concatenate(parts)[:, None])
    return ResultTable(columns, np.hstack(blocks), provenance(cfg))


# ---------------------------------------------------------------------------
# dispersive states


def dispersive_scenario(cfg: ScenarioConfig, point: dict) -> DispersiveScenario:
    """Build the scenario for one grid point; ``Theta`` may stand in for ``t``."""
    g, delta, omega = point["g"], point["Delta"], point["omega"]
    alpha = math.sqrt(point["alpha_sq"]) * np.exp(1j * point.get("alpha_phase", 0.0))
    if point["alpha_sq"] < 0:
        raise ConfigError("|alpha|^2 must be non-negative", "alpha_sq")
    m = _as_int("m", point.get("m", 1.0))
    estimate = n_max_estimate(alpha)
    if "n_max" in point:
        n_max = _as_int("n_max", point["n_max"])
    else:
        n_max = max(estimate, required_n_max(alpha))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = SystemParams.identical(omega, delta, g, n_max)
    scale = _time_scale(cfg, g)
    T0 = point.get("T0", 0.0) * scale
    chi = point.get("chi", 0.0)
    try:
        t_m = interaction_time(m, params)
    except DomainError as exc:
        raise ConfigError(str(exc), "Delta") from None
    if ("t" in point) == ("Theta" in point):
        raise ConfigError("give exactly one of t and Theta", "t")
    if "t" in point:
        t = point["t"] * scale
    else:
        theta = point["Theta"] if delta > 0 else -point["Theta"]
        base = time_for_theta(theta, m, chi, params.omega_a)
        period = 2 * math.pi / params.omega_a
        t = base + period * math.ceil((T0 + t_m - base) / period)
    try:
        return DispersiveScenario(alpha, chi, m, T0, t, params)
    except (DomainError, IntervalError) as exc:
        raise ConfigError(str(exc), "t") from None


def _atom_basis(atom: str):
    return atom_z_basis() if atom in ("e", "g") else atom_x_basis()


def _field_part(state, control_vec, atom_vec) -> np.ndarray:
    """Two-cavity field amplitudes left after projecting control and atom on the given vectors."""
    return np.einsum("c,a,cajk->jk", control_vec.conj(), atom_vec.conj(), state.tensor).ravel()


def outcome_table(s: DispersiveScenario, exact: bool = True) -> list[dict]:
    """Per outcome pair: probability, conditional double-cat probability and fidelities.

    ``probability`` is the joint probability of the control and atom
    outcomes for the atom basis the outcome belongs to, so the ``e/g`` rows
    sum to one and so do the ``+x/-x`` rows.

    ``double_cat`` is the probability of finding both cavities in the cat
    state of the branch (``chi -> chi + pi`` for ``-x``), measured on the
    simulated post-measurement state.
    """
    require_regime(s)
    state = evolve_dispersive(s)
    full = evolve_dispersive(s, exact=True) if exact else None
    states = build_states(s)
    shifted = build_states(DispersiveScenario(s.alpha, s.chi + math.pi, s.m, s.T0, s.t, s.params))
    cats = {"+x": kron(states.cat, states.cat), "-x": kron(shifted.cat, shifted.cat)}
    basis_c = control_basis(math.pi / 4, 0.0)
    rows = []
    for c in ("+", "-"):
        p_c = outcome_probability(state, basis_c, c)
        for a in ("e", "g", "+x", "-x"):
            row = {"control": CONTROL_CODES[c], "atom": ATOM_CODES[a], "probability": 0.0,
                   "double_cat": math.nan, "fidelity_dispersive": math.nan, "fidelity_exact": math.nan,
                   "valid": 0.0}
            rows.append(row)
            try:
                post_c = measure(state, basis_c, c)
                rec = measure(post_c.post_state, _atom_basis(a), a)
                ref = conditioned_state(s, c, a, states if a != "-x" else None)
            except ZeroProbabilityError:
                continue
            row["probability"] = p_c * rec.probability
            if a in cats:
                fields = _field_part(rec.post_state, basis_c.vector(c), _atom_basis(a).vector(a))
                row["double_cat"] = float(abs(np.vdot(cats[a], fields)) ** 2 / np.vdot(fields, fields).real)
            row["fidelity_dispersive"] = fidelity(rec.post_state, ref)
            if full is not None:
                try:
                    fc = measure(full, basis_c, c)
                    fa = measure(fc.post_state, _atom_basis(a), a)
                    row["fidelity_exact"] = fidelity(fa.post_state, ref)
                except ZeroProbabilityError:
                    pass
            row["valid"] = 1.0
    return rows


_STATE_COLUMNS = ["control", "atom", "probability", "double_cat", "fidelity_dispersive", "fidelity_exact"]


def _run_dispersive_states(cfg: ScenarioConfig, threads: int) -> ResultTable:
    names, fixed, combos = _grid_points(cfg)
    exact = bool(fixed.get("exact", 1.0))

    def one(combo):
        point = dict(fixed, **dict(zip(names, combo)))
        point.pop("exact", None)
        s = dispersive_scenario(cfg, point)
        return [list(combo) + [s.t, s.Theta] + [r[k] for k in _STATE_COLUMNS] + [r["valid"]]
                for r in outcome_table(s, exact)]

    if threads > 1 and len(combos) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(one, combos))
    else:
        blocks = [one(c) for c in combos]
    rows = [r for block in blocks for r in block]
    columns = list(names) + ["t_seconds", "Theta_effective"] + _STATE_COLUMNS + ["valid"]
    return ResultTable(columns, np.array(rows, dtype=float), provenance(cfg))


# ---------------------------------------------------------------------------
# oracle check


def oracle_cases(count: int, seed: int):
    """Random Fock-state scenarios (resonant and detuned) for the analytic-vs-simulation check."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cases = []
    for i in range(count):
        n0, n1 = (int(v) for v in rng.integers(0, 6, 2))
        g0, g1 = (float(v) for v in rng.uniform(0.1, 1.0, 2))
        omega0 = float(rng.uniform(5.0, 10.0))
        d0 = float(rng.choice([0.0, 0.3, -0.3])) * g0 if i % 2 else 0.0
        d1 = float(rng.choice([0.0, 0.3, -0.3])) * g1 if i % 2 else 0.0
        t_m = float(rng.uniform(0, 10))
        t = t_m + float(rng.uniform(0, 10))
        cases.append(RabiScenario(
            float(rng.uniform(0, math.pi / 2)), n0, n1, g0, g1, t_m, t, phi=float(rng.uniform(0, 2 * math.pi)),
            Delta0=d0, Delta1=d1, omega0=omega0, omega1=omega0 + d0 - d1,
        ))
    return cases


ORACLE_COLUMNS = ["case", "xi_amplitude", "control_probability", "inversion", "photon_0", "photon_1",
                  "exchange", "max_error"]


def oracle_row(i: int, s: RabiScenario, n_max: int) -> list[float]:
    run = run_rabi(s, n_max=n_max)
    xi = xi_coefficients(s)
    amp = np.array([run.state.amplitude(*b) if min(b[2:]) >= 0 else 0.0 for b in xi.basis])
    errs = [
        float(np.max(np.abs(amp - xi.xi / xi.norm_N0))),
        abs(float(xi.norm_N0) ** 2 - run.measurement.probability),
        abs(float(inversion(s)) - run.inversion()),
        abs(float(photon_average(s, 0)) - run.photon_average(0)),
        abs(float(photon_average(s, 1)) - run.photon_average(1)),
        abs(float(exchange_probability(s)) - (run.probability(0, 0, s.n0 - 1, s.n1 + 1) if s.n0 else 0.0)
            - (run.probability(1, 0, s.n0 + 1, s.n1 - 1) if s.n1 else 0.0)),
    ]
    return [float(i)] + errs + [max(errs)]


def _run_oracle(cfg: ScenarioConfig, threads: int) -> ResultTable:
    count = _as_int("cases", cfg.value("cases", 50.0))
    n_max = _as_int("n_max", cfg.value("n_max", 8.0))
    cases = oracle_cases(count, cfg.seed)
    if any(max(s.n0, s.n1) + 1 > n_max for s in cases):
        raise ConfigError("n_max must exceed the largest photon number (5) by at least one", "n_max")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(lambda a: oracle_row(a[0], a[1], n_max), enumerate(cases)))
        else:
            rows = [oracle_row(i, s, n_max) for i, s in enumerate(cases)]
    return ResultTable(ORACLE_COLUMNS, np.array(rows), provenance(cfg, tolerance=ORACLE_TOL))


_RUNNERS = {
    "rabi_inversion": _run_fock,
    "photon_average": _run_fock,
    "exchange_probability": _run_fock,
    "xi_table": _run_xi_table,
    "dispersive_catprob": _run_catprob,
    "dispersive_states": _run_dispersive_states,
    "oracle_check": _run_oracle,
}


def run_scenario(cfg: ScenarioConfig, threads: int = 1) -> ResultTable:
    """Evaluate a config. Row order follows the grid, whatever the thread count.

    Raises:
        ConfigError: Parameters are inconsistent.
        RegimeError: A dispersive scenario is outside the dispersive regime.
    """
    table = _RUNNERS[cfg.kind](cfg, max(1, int(threads)))
    if cfg.columns:
        table = table.select(cfg.columns)
    return table


# ---------------------------------------------------------------------------
# sampled measurements

SAMPLE_COLUMNS = ["event", "control", "atom", "count", "trials", "frequency", "probability", "bound"]


def sample_measurements(cfg: ScenarioConfig, shots: int) -> ResultTable:
    """Draw ``shots`` control-then-atom measurements per atom basis with a seeded PCG64 generator.

    Only ``dispersive_states`` configs with a single grid point can be
    sampled. The atom is read out in the ``e/g`` basis for one batch of
    shots and in the ``+x/-x`` basis for another. Rows with ``event = 0``
    count outcome pairs; rows with ``event = 1`` count double-cat detections
    among the ``(+-, +x)`` shots. ``bound`` is five binomial standard
    deviations.
    """
    if shots < 1:
        raise ConfigError("shots must be >= 1", "shots")
    if cfg.kind != "dispersive_states":
        raise ConfigError("sampling needs a dispersive_states scenario", "kind")
    names, fixed, _ = _grid_points(cfg)
    if names:
        raise ConfigError("sampling needs a single parameter point", names[0])
    fixed = dict(fixed)
    fixed.pop("exact", None)
    rows = outcome_table(dispersive_scenario(cfg, fixed), exact=False)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    counts = {}
    for basis in ((ATOM_CODES["e"], ATOM_CODES["g"]), (ATOM_CODES["+x"], ATOM_CODES["-x"])):
        group = [r for r in rows if r["atom"] in basis]
        for r, n in zip(group, sample_counts([r["probability"] for r in group], shots, rng)):
            counts[(r["control"], r["atom"])] = int(n)
    out = []
    for r in rows:
        p, n = r["probability"], counts[(r["control"], r["atom"])]
        out.append([0, r["control"], r["atom"], n, shots, n / shots, p, 5 * math.sqrt(p * (1 - p) / shots), 1.0])
    for r in rows:
        if r["atom"] != ATOM_CODES["+x"]:
            continue
        n = counts[(r["control"], r["atom"])]
        q = 0.0 if math.isnan(r["double_cat"]) else r["double_cat"]
        if n:
            hits = int(rng.binomial(n, q))
            out.append([1, r["control"], r["atom"], hits, n, hits / n, q, 5 * math.sqrt(q * (1 - q) / n), 1.0])
        else:
            out.append([1, r["control"], r["atom"], 0, 0, math.nan, q, math.nan, 0.0])
    return ResultTable(SAMPLE_COLUMNS + ["valid"], out, provenance(cfg, shots=shots, rng="numpy PCG64"))


def sample_counts(probs, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Outcome counts of ``shots`` independent draws (multinomial)."""
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    p = p / p.sum()
    return rng.multinomial(shots, p)
