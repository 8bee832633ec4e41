"""Scenario configs, figure presets, batch runs and CSV output."""

from .config import ScenarioConfig, load_config, parse_config
from .presets import figure_presets, preset_config, preset_names
from .runner import ResultTable, run_scenario, sample_measurements

__all__ = [
    "ResultTable",
    "ScenarioConfig",
    "figure_presets",
    "load_config",
    "parse_config",
    "preset_config",
    "preset_names",
    "run_scenario",
    "sample_measurements",
]
