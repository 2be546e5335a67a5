"""Constant-time-step positivity sweeps (the CFL-condition studies).

For each polynomial degree, run the case at an ascending grid of fixed time
steps until the end time; record completion or the positivity-failure time.
Two CFL numbers are reported per row, CFL = dt / dx * lambda_bar with either
the minimum GLL node spacing inside a cell or the cell width as dx, where
lambda_bar is the maximum cell-average wavespeed over the entire run.  The
last-pass / first-fail rows bracket the positivity boundary.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .io import write_csv
from .run import setup_run


@dataclass
class SweepRow:
    p: int
    dt: float
    completed: bool
    failure_time: float | None
    lambda_bar: float
    min_dx: float
    cell_width: float
    min_dx_cfl: float
    cell_width_cfl: float


@dataclass
class SweepTable:
    rows: list

    def bracket(self, p):
        """(last-pass, first-fail) rows for degree p (either may be None)."""
        mine = sorted((r for r in self.rows if r.p == p),
                      key=lambda r: r.dt)
        last_pass = None
        for r in mine:
            if r.completed:
                last_pass = r
            else:
                return last_pass, r
        return last_pass, None

    def write(self, path):
        header = ["p", "min_dx", "cell_width", "dt", "completed",
                  "failure_time", "lambda_bar", "min_dx_cfl",
                  "cell_width_cfl"]
        rows = [(r.p, r.min_dx, r.cell_width, r.dt, r.completed,
                 r.failure_time if r.failure_time is not None
                 else float("nan"), r.lambda_bar, r.min_dx_cfl,
                 r.cell_width_cfl) for r in self.rows]
        return write_csv(path, header, rows)


def _run_one(args):
    config, p, dt = args
    solver = setup_run(replace(config, p=p, dt=dt, cfl=None))
    result = solver.run()
    ref_gap = float(np.diff(solver.ops.sol_nodes).min())
    cell = float(solver.mesh.h[0])
    min_dx = ref_gap * cell / 2.0
    lam = result.lambda_bar_max
    return SweepRow(
        p=p, dt=dt, completed=result.failure is None,
        failure_time=None if result.failure is None else result.failure.time,
        lambda_bar=lam, min_dx=min_dx, cell_width=cell,
        min_dx_cfl=dt / min_dx * lam, cell_width_cfl=dt / cell * lam)


def cli_sweep_cfl(config: RunConfig, p_list, dt_values,
                  out_path=None) -> SweepTable:
    """Sweep fixed time steps (ascending) for each degree; `dt_values` may
    be a list or a (start, stop, increment) triple."""
    if isinstance(dt_values, tuple) and len(dt_values) == 3:
        start, stop, inc = dt_values
        count = int(round((stop - start) / inc)) + 1
        dts = [start + i * inc for i in range(count)]
    else:
        dts = sorted(dt_values)

    jobs = [(config, p, dt) for p in p_list for dt in dts]
    workers = int(os.environ.get("NSFR_WORKERS", "1"))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    else:
        rows = [_run_one(j) for j in jobs]
    table = SweepTable(rows=rows)
    if out_path is not None:
        table.write(out_path)
    return table
