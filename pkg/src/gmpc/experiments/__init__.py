"""Scenarios, trial runner, attack library, bound comparison and growth fits."""
from .attacks import ATTACKS, Attack, make_attack
from .bounds import BOUNDS, BoundReport, UniformityReport, compare_bounds, permutation_uniformity
from .complexity import GrowthFit, complexity_report, fit_polylog, fit_power
from .report import build_report, report_json, report_text
from .runner import TrialRecord, read_records, records_csv, run_scenario, run_trial, write_records
from .scenario import PROTOCOLS, Scenario, load_scenario, trial_seed

__all__ = [
    "ATTACKS", "Attack", "make_attack", "BOUNDS", "BoundReport", "UniformityReport", "compare_bounds",
    "permutation_uniformity", "GrowthFit", "complexity_report", "fit_polylog", "fit_power",
    "build_report", "report_json", "report_text", "TrialRecord", "read_records", "records_csv",
    "run_scenario", "run_trial", "write_records", "PROTOCOLS", "Scenario", "load_scenario", "trial_seed",
]
