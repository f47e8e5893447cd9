"""Monte Carlo harness: growth constants, ratios, and probes of the asymptotic claims."""
from .harness import csv_text, run_tasks, summary_json, write_csv
from .oned import OneDimDecomposition, interval_expectations, interval_monte_carlo, run_d1_decomposition
from .probes import (
    probe_additivity,
    probe_closeness,
    probe_cone,
    probe_empty_ball,
    probe_longest_edge,
    probe_smoothness,
    probe_tail,
    run_d1,
    run_gamma,
    run_ratio,
)
from .records import ExperimentConfig, ExperimentResult, GammaEstimate, Stats, TrialRecord, normalize

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "GammaEstimate",
    "OneDimDecomposition",
    "Stats",
    "TrialRecord",
    "csv_text",
    "interval_expectations",
    "interval_monte_carlo",
    "normalize",
    "probe_additivity",
    "probe_closeness",
    "probe_cone",
    "probe_empty_ball",
    "probe_longest_edge",
    "probe_smoothness",
    "probe_tail",
    "run_d1",
    "run_d1_decomposition",
    "run_gamma",
    "run_ratio",
    "run_tasks",
    "summary_json",
    "write_csv",
]
