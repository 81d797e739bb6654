"""Experiment registry, configuration, reports and the command line."""

from .config import EXPERIMENT_KINDS, ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import run_experiment
from .lemma2 import lemma2_bound, lemma2_sequence
from .report import CSV_COLUMNS, ExperimentReport, emit_report
