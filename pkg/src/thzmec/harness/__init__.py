"""Scenario config, Monte-Carlo runner, figure presets and CSV output."""

from thzmec.harness.output import Table, emit_outputs
from thzmec.harness.presets import PRESETS, run_preset
from thzmec.harness.runner import TrialMetrics, monte_carlo, run_trial, run_trials
from thzmec.harness.scenario import Scenario, load_scenario

__all__ = [
    "PRESETS",
    "Scenario",
    "Table",
    "TrialMetrics",
    "emit_outputs",
    "load_scenario",
    "monte_carlo",
    "run_preset",
    "run_trial",
    "run_trials",
]
