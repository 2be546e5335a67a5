"""Single-run driver: assemble a solver from a RunConfig and write artifacts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import euler
from ..cases import get_case
from ..fields import extract_line, initialize_field
from ..limiter import Limiter, LimiterConfig
from ..mesh import build_mesh
from ..operators import build_operator_set, correction_parameter
from ..residual import Discretization
from ..time_integration import RunResult, StepControl, run_to_time
from ..two_point import FluxScheme
from .config import RunConfig
from .io import write_csv, write_failure, write_field, write_series_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POSITIVITY = 3
EXIT_BUDGET = 4


@dataclass
class Solver:
    config: RunConfig
    case: object
    mesh: object
    ops: object
    disc: Discretization
    limiter: Limiter | None
    u0: np.ndarray
    control: StepControl
    rhs: object

    def run(self) -> RunResult:
        return run_to_time(self.disc, self.u0, self.control, rhs=self.rhs,
                           limiter=self.limiter,
                           monitor_every=self.config.monitor_every)


def setup_run(config: RunConfig) -> Solver:
    config = config.validated()
    case = get_case(config.case)
    n = config.n if config.n is not None else case.default_n
    if len(n) != case.dim:
        raise ValueError(f"case {case.name} needs {case.dim} mesh counts")

    active = None
    if case.active_mask is not None:
        mesh_probe = build_mesh(**case.mesh_args(n), boundary=case.boundary)
        centers_all = _all_cell_centers(mesh_probe)
        active = case.active_mask(centers_all[..., 0], centers_all[..., 1])
    mesh = build_mesh(**case.mesh_args(n), boundary=case.boundary,
                      active=active)

    c_val = correction_parameter(config.p, config.c)
    ops = build_operator_set(config.p, case.dim, c_val, config.flux_nodes)
    disc = Discretization(mesh, ops, FluxScheme(config.flux,
                                                config.dissipation),
                          gamma=case.gamma)
    u0 = initialize_field(mesh, ops, case)

    limiter = None
    if config.limiter:
        limiter = Limiter(ops, mesh.h,
                          LimiterConfig(enabled=True, eps=config.eps,
                                        include_solution_nodes=not
                                        config.wang_shu),
                          gamma=case.gamma)

    t_end = config.t_end if config.t_end is not None else case.t_end
    if config.cfl is not None:
        control = StepControl("cfl", config.cfl, t_end,
                              max_steps=config.max_steps)
    else:
        control = StepControl("fixed", config.dt, t_end,
                              max_steps=config.max_steps)
    rhs = disc.nsfr_rhs if config.scheme == "nsfr" else disc.strong_dg_rhs
    return Solver(config=config, case=case, mesh=mesh, ops=ops, disc=disc,
                  limiter=limiter, u0=u0, control=control, rhs=rhs)


def _all_cell_centers(mesh):
    grids = np.meshgrid(*[mesh.xmin[a] + (np.arange(mesh.n[a]) + 0.5)
                          * mesh.h[a] for a in range(mesh.dim)],
                        indexing="ij")
    return np.stack(grids, axis=-1)


def _line_name(axis, value):
    return f"line_{'xy'[axis]}{value:g}.csv"


def write_line_csv(out_dir, mesh, ops, u, axis, value, gamma):
    pos, states = extract_line(mesh, ops, u, axis, value)
    rho, uu, vv, p = euler.primitive(states, gamma)
    header = ["position", "rho", "u", "v", "p"]
    rows = zip(pos, rho, uu, vv, p)
    return write_csv(Path(out_dir) / _line_name(axis, value), header, rows)


def write_final_field(out_dir, solver, u):
    mesh, ops = solver.mesh, solver.ops
    if mesh.dim == 1:
        from ..fields import node_coordinates
        x = node_coordinates(mesh, ops)[:, :, 0].ravel()
        rho, uu, vv, p = euler.primitive(u.reshape(-1, 4), solver.case.gamma)
        order = np.argsort(x, kind="stable")
        return write_csv(Path(out_dir) / "final_1d.csv",
                         ["x", "rho", "u", "v", "p"],
                         zip(x[order], rho[order], uu[order], vv[order],
                             p[order]))
    avg = solver.disc.cell_averages(u)
    rho, uu, vv, p = euler.primitive(avg, solver.case.gamma)
    grids = {}
    for name, vals in (("rho", rho), ("u", uu), ("v", vv), ("p", p)):
        grid = np.full(tuple(mesh.n), np.nan)
        grid[tuple(mesh.cells.T)] = vals
        grids[name] = grid
    return write_field(Path(out_dir) / "final_field.txt", mesh, grids)


def cli_run(config: RunConfig, out_dir=None) -> int:
    """Execute one run and write metadata, time series, final field, and
    configured line extractions.  Returns the process exit code."""
    solver = setup_run(config)
    out_dir = Path(out_dir if out_dir is not None
                   else (config.out_dir or f"runs/{config.case}"))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.txt").write_text(config.as_text())

    from ..time_integration import BudgetExceededError
    try:
        result = solver.run()
    except BudgetExceededError as err:
        (out_dir / "budget_exceeded.txt").write_text(str(err) + "\n")
        return EXIT_BUDGET

    write_series_csv(out_dir / "series.csv", result.series)
    write_final_field(out_dir, solver, result.u)
    lines = tuple(config.extract) or tuple(solver.case.extract_lines)
    for axis, value in lines:
        write_line_csv(out_dir, solver.mesh, solver.ops, result.u, axis,
                       value, solver.case.gamma)
    if result.failure is not None:
        write_failure(out_dir / "failure.json", result.failure,
                      config.as_text())
        return EXIT_POSITIVITY
    return EXIT_OK
