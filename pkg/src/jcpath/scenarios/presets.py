"""Named configs reproducing the figure data.

Rabi-inversion presets give times in units of 1/g (with g = 1); the photon
and exchange presets quote absolute couplings, so their times are in
seconds.
"""

from __future__ import annotations

from ..errors import ConfigError
from .config import ScenarioConfig, parse_config


def _fock(kind, figure, params, series=None, units="seconds", reference=None):
    head = f"[scenario]\nkind = {kind}\nunits = {units}\nfigure = {figure}\n"
    if series:
        head += f"series = {series}\n"
    if reference:
        head += f"reference = {reference}\n"
    body = "".join(f"{k} = {v}\n" for k, v in params.items())
    return head + "\n[params]\n" + body


def _photons(figure, n, j):
    return _fock("photon_average", figure, {
        "g": "0.5", "n": n, "j": j, "t_m": "pi/2", "t": "pi/2:40:400",
        "theta": "0, pi/8, pi/4, 3*pi/8, pi/2",
    }, series="theta")


def _exchange(figure, n0, n1):
    return _fock("exchange_probability", figure, {
        "g": "0.2", "n0": n0, "n1": n1, "theta": "pi/4", "t": "64*pi/5", "t_m": "0:64*pi/5:401",
    })


_PRESETS = {
    "fig2a": _fock("rabi_inversion", "fig2a", {
        "g": "1", "n": "0", "t_m": "pi/2", "t": "pi/2:20:400", "theta": "0, pi/8, pi/4",
    }, series="theta", units="inverse_g"),
    "fig2b": _fock("rabi_inversion", "fig2b", {
        "g": "1", "n": "0", "theta": "pi/4", "t": "pi:20:400", "t_m": "0, pi/4, pi/2, 3*pi/4, pi",
    }, series="t_m", units="inverse_g"),
    "fig3a": _fock("rabi_inversion", "fig3a", {
        "g": "1", "n": "1", "theta": "pi/4", "t_m": "pi", "t": "pi:40:400",
    }, units="inverse_g", reference="single_cavity"),
    "fig3b": _fock("rabi_inversion", "fig3b", {
        "g": "1", "n": "5", "theta": "pi/4", "t_m": "pi", "t": "pi:40:400",
    }, units="inverse_g", reference="single_cavity"),
    "fig4a": _photons("fig4a", "0", "0"),
    "fig4b": _photons("fig4b", "0", "1"),
    "fig4c": _photons("fig4c", "10", "0"),
    "fig4d": _photons("fig4d", "10", "1"),
    "fig5": _fock("photon_average", "fig5", {
        "g": "0.2", "n": "1", "j": "0", "theta": "pi/4", "t_m": "0:64*pi/5:81", "t": "0:64*pi/5:81",
    }),
    "fig6a": _exchange("fig6a", "1", "0"),
    "fig6b": _exchange("fig6b", "10", "0"),
    "fig6c": _exchange("fig6c", "1", "1"),
    "fig6d": _exchange("fig6d", "10", "10"),
    "fig7": _fock("exchange_probability", "fig7", {
        "g": "0.2", "n": "1", "theta": "pi/4", "t_m": "0:64*pi/5:81", "t": "0:64*pi/5:81",
    }),
    "fig8": (
        "[scenario]\nkind = dispersive_catprob\nfigure = fig8\n\n[params]\n"
        "Theta = 0:2*pi:360:open_right\nalpha_sq = 0:5:100:open_left\n"
    ),
}

ORACLE_CHECK = "[scenario]\nkind = oracle_check\nseed = 20240611\n\n[params]\ncases = 200\nn_max = 8\n"


def preset_names() -> list[str]:
    return list(_PRESETS)


def preset_text(name: str) -> str:
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}", "preset") from None


def preset_config(name: str) -> ScenarioConfig:
    return parse_config(preset_text(name))


def figure_presets() -> list[ScenarioConfig]:
    """All figure presets in figure order."""
    return [preset_config(name) for name in _PRESETS]
