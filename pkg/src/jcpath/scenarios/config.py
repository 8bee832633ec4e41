"""Scenario configuration files.

A config is an INI file with two sections::

    [scenario]
    kind = rabi_inversion
    units = inverse_g        # or seconds; required when any time field is set
    figure = fig2a           # optional tag copied into the CSV header
    series = theta           # optional: one output column per value
    columns = t, inversion[theta=pi/4]   # optional column selection
    reference = single_cavity  # optional: add the one-cavity inversion
    output = fig2a.csv       # optional default output path
    seed = 0                 # optional, used by sampled runs

    [params]
    g = 1
    n = 0
    t_m = pi/2
    t = pi/2:20:400          # grid start:stop:steps[:bounds]
    theta = 0, pi/8, pi/4    # explicit list

Values are arithmetic expressions over numbers, ``pi``, ``e`` and
``sqrt``. A grid ``a:b:n`` has ``n`` evenly spaced points from ``a`` to
``b``; an optional fourth field ``open_left``, ``open_right`` or ``open``
drops the corresponding end points.
"""

from __future__ import annotations

import ast
import configparser
import dataclasses
import hashlib
import math
import operator
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError

KINDS = (
    "rabi_inversion",
    "photon_average",
    "exchange_probability",
    "xi_table",
    "dispersive_catprob",
    "dispersive_states",
    "oracle_check",
)
UNITS = ("seconds", "inverse_g")
TIME_FIELDS = ("t", "t_m", "T0")

_FOCK = {
    "theta": (True, None), "phi": (False, 0.0),
    "g": (False, None), "g0": (False, None), "g1": (False, None),
    "n": (False, None), "n0": (False, None), "n1": (False, None),
    "Delta": (False, None), "Delta0": (False, None), "Delta1": (False, None),
    "omega": (False, None), "omega0": (False, None), "omega1": (False, None),
    "t_m": (True, None), "t": (True, None),
}
# name -> (required, default); pairs like g / g0, g1 are resolved in the runner
SCHEMAS = {
    "rabi_inversion": dict(_FOCK),
    "photon_average": dict(_FOCK, j=(False, 0.0)),
    "exchange_probability": dict(_FOCK),
    "xi_table": dict(_FOCK),
    "dispersive_catprob": {"Theta": (True, None), "alpha_sq": (True, None)},
    "dispersive_states": {
        "alpha_sq": (True, None), "alpha_phase": (False, 0.0), "chi": (False, 0.0), "m": (False, 1.0),
        "T0": (False, 0.0), "t": (False, None), "Theta": (False, None),
        "g": (True, None), "Delta": (True, None), "omega": (True, None),
        "n_max": (False, None), "exact": (False, 1.0),
    },
    "oracle_check": {"cases": (False, 50.0), "n_max": (False, 8.0)},
}

_BOUNDS = {"closed": (True, True), "open_left": (False, True), "open_right": (True, False), "open": (False, False)}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


def evaluate(text: str) -> float:
    """Evaluate an arithmetic expression without ``eval``."""

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](walk(node.operand))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        value = walk(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot evaluate {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


@dataclass(frozen=True)
class Param:
    """A parameter: fixed value, list, or grid. ``labels`` keep the source text of list entries."""

    name: str
    values: tuple[float, ...]
    labels: tuple[str, ...]
    text: str
    line: int | None
    grid: bool = False

    @property
    def swept(self) -> bool:
        return len(self.values) > 1


def parse_value(name: str, text: str, line: int | None = None) -> Param:
    text = text.strip()
    if not text:
        raise ConfigError("empty value", name, line)
    try:
        if ":" in text:
            parts = [p.strip() for p in text.split(":")]
            if len(parts) not in (3, 4):
                raise ValueError("grid needs start:stop:steps[:bounds]")
            start, stop = evaluate(parts[0]), evaluate(parts[1])
            steps = evaluate(parts[2])
            if steps != int(steps) or steps < 1:
                raise ValueError(f"grid size must be a positive integer, got {parts[2]}")
            bounds = parts[3] if len(parts) == 4 else "closed"
            if bounds not in _BOUNDS:
                raise ValueError(f"grid bounds must be one of {', '.join(_BOUNDS)}")
            left, right = _BOUNDS[bounds]
            n = int(steps)
            total = n - 1 + (not left) + (not right)
            if total == 0:
                values = np.array([start])
            else:
                values = start + (stop - start) * np.arange(int(not left), int(not left) + n) / total
            vals = tuple(float(v) for v in values)
            return Param(name, vals, tuple(repr(v) for v in vals), text, line, grid=True)
        items = [p.strip() for p in text.split(",")]
        vals = tuple(evaluate(p) for p in items)
        return Param(name, vals, tuple(items), text, line)
    except ValueError as exc:
        raise ConfigError(str(exc), name, line) from None


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario configuration."""

    kind: str
    params: dict
    units: str | None = None
    figure: str = ""
    series: str | None = None
    columns: tuple[str, ...] | None = None
    seed: int = 0
    output: str | None = None
    reference: str | None = None
    source: str = field(default="", repr=False)

    @property
    def sha256(self) -> str:
        return config_hash(self)

    def value(self, name: str, default=None) -> float | None:
        p = self.params.get(name)
        return default if p is None else p.values[0]

    def swept(self) -> list[Param]:
        return [p for p in self.params.values() if p.swept and p.name != self.series]

    def with_seed(self, seed: int) -> ScenarioConfig:
        return dataclasses.replace(self, seed=int(seed))


def canonical_text(cfg: ScenarioConfig) -> str:
    """Whitespace-insensitive text of a config; the basis of its hash.

    Parameters keep their declared order since it fixes the row order.
    """
    lines = [f"kind={cfg.kind}", f"units={cfg.units}", f"figure={cfg.figure}", f"series={cfg.series}",
             f"columns={','.join(cfg.columns) if cfg.columns else ''}", f"seed={cfg.seed}",
             f"reference={cfg.reference}"]
    lines += ["param.%s=%s" % (k, re.sub(r"\s+", "", cfg.params[k].text)) for k in cfg.params]
    return "\n".join(lines) + "\n"


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_text(cfg).encode("utf-8")).hexdigest()


def _line_numbers(text: str) -> dict:
    """Map ``(section, key)`` to the 1-based line it appears on."""
    found, section = {}, None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            found.setdefault((section, m.group(1).strip()), i)
    return found


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate config text.

    Raises:
        ConfigError: With the offending line and field where known.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("defined more than once", exc.option, exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"section [{exc.section}] defined more than once", None, exc.lineno) from None
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc.message.splitlines()[0]}", None, getattr(exc, "lineno", None)) from None
    lines = _line_numbers(text)
    for section in parser.sections():
        if section not in ("scenario", "params"):
            raise ConfigError(f"unknown section [{section}]", None, lines.get((section, None)))
    if not parser.has_section("scenario"):
        raise ConfigError("missing [scenario] section")
    sc = parser["scenario"]

    def where(key, section="scenario"):
        return lines.get((section, key))

    known = {"kind", "units", "figure", "series", "columns", "seed", "output", "reference"}
    for key in sc:
        if key not in known:
            raise ConfigError("unknown scenario field", key, where(key))
    kind = sc.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}", "kind", where("kind"))
    schema = SCHEMAS[kind]

    params = {}
    if parser.has_section("params"):
        for key, raw in parser["params"].items():
            if key not in schema:
                raise ConfigError(f"unknown parameter for kind {kind}", key, where(key, "params"))
            params[key] = parse_value(key, raw, where(key, "params"))
    for key, (required, _) in schema.items():
        if required and key not in params:
            raise ConfigError(f"required parameter missing for kind {kind}", key)

    units = sc.get("units")
    units = units.strip() if units is not None else None
    if units is not None and units not in UNITS:
        raise ConfigError(f"units must be one of {', '.join(UNITS)}", "units", where("units"))
    if units is None and any(k in params for k in TIME_FIELDS):
        raise ConfigError("time-valued parameters need a units declaration", "units")

    series = sc.get("series")
    series = series.strip() if series else None
    if series is not None and series not in params:
        raise ConfigError("series names an undefined parameter", "series", where("series"))
    if series is not None and kind in ("dispersive_states", "oracle_check", "xi_table"):
        raise ConfigError(f"kind {kind} does not support series", "series", where("series"))

    columns = sc.get("columns")
    columns = tuple(c.strip() for c in columns.split(",") if c.strip()) if columns else None
    try:
        seed = int(sc.get("seed", "0"))
    except ValueError:
        raise ConfigError("seed must be an integer", "seed", where("seed")) from None
    if seed < 0:
        raise ConfigError("seed must be non-negative", "seed", where("seed"))
    reference = sc.get("reference")
    reference = reference.strip() if reference else None
    if reference not in (None, "single_cavity"):
        raise ConfigError("reference must be single_cavity", "reference", where("reference"))
    output = sc.get("output")
    return ScenarioConfig(kind, params, units, sc.get("figure", "").strip(), series, columns, seed,
                          output.strip() if output else None, reference, text)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
