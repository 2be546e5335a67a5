"""Experiment drivers: single runs, convergence studies, time-step sweeps,
scheme comparison matrices, and file output."""

from .config import ConfigError, RunConfig, load_config, parse_overrides
from .run import Solver, cli_run, setup_run
from .convergence import ConvergenceReport, cli_convergence
from .sweep import SweepRow, cli_sweep_cfl
from .compare import cli_compare
