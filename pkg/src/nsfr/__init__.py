"""Nonlinearly stable flux reconstruction (NSFR) solver for the compressible
Euler equations, with a positivity-preserving limiter and a benchmark
harness (shock tubes, vortex-shock interaction, shock diffraction, double
Mach reflection, astrophysical jets, time-step sweeps)."""

from .cases import TestCase, get_case
from .euler import (InadmissibleStateError, conservative, entropy_function,
                    entropy_variables, is_admissible, max_wavespeed,
                    physical_flux, pressure, primitive)
from .limiter import Limiter, LimiterConfig
from .mesh import (CartesianMesh, DirichletFunction, Periodic,
                   SubsonicOutflow, SupersonicInflow, SupersonicOutflow,
                   Wall, build_mesh)
from .operators import (OperatorSet, build_operator_set,
                        correction_parameter, correction_parameter_table)
from .quadrature import GL, GLL, NodeFamily, make_nodes
from .residual import Discretization, PositivityError, ghost_state
from .time_integration import (FailureRecord, RunResult, StepControl,
                               compute_dt, run_to_time, ssprk3_step)
from .two_point import (FluxScheme, chra_flux, ch_flux, interface_flux,
                        ir_flux, kg_flux, log_mean, mean, two_point_flux)

__version__ = "0.1.0"
