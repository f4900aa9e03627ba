"""Monte Carlo experiments over the Kostlan ensemble, with statistics and records."""

from .config import DEFAULTS, EXPERIMENT_KINDS, ConfigError, default_config, normalize_config
from .experiments import (
    ExperimentRecord,
    latitude,
    run_config,
    run_equidist,
    run_large_deviation,
    run_lelong,
    run_mean_roots,
    run_tail_1d,
    run_tail_2d,
)
from .lelong import CutoffFn, deviation_variable, lelong_residual, lelong_terms
from .records import payload_bytes, read_record, write_record
from .stats import DecayFit, TailEstimate, fit_decay, wilson_ci

__all__ = [
    "DEFAULTS",
    "EXPERIMENT_KINDS",
    "ConfigError",
    "CutoffFn",
    "DecayFit",
    "ExperimentRecord",
    "TailEstimate",
    "default_config",
    "deviation_variable",
    "fit_decay",
    "latitude",
    "lelong_residual",
    "lelong_terms",
    "normalize_config",
    "payload_bytes",
    "read_record",
    "run_config",
    "run_equidist",
    "run_large_deviation",
    "run_lelong",
    "run_mean_roots",
    "run_tail_1d",
    "run_tail_2d",
    "wilson_ci",
    "write_record",
]
