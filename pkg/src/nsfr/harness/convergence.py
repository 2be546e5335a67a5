"""Grid-refinement convergence studies against exact solutions."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..fields import density_error_norms
from .config import RunConfig
from .io import write_csv
from .run import setup_run


@dataclass
class ConvergenceRow:
    p: int
    n: tuple
    dx: float
    l1: float
    l1_order: float | None
    l2: float
    l2_order: float | None
    limiter_active: bool


@dataclass
class ConvergenceReport:
    rows: list

    def write(self, path):
        header = ["p", "grid", "dx", "l1_error", "l1_order", "l2_error",
                  "l2_order", "limiter"]
        rows = [(r.p, "x".join(map(str, r.n)), r.dx, r.l1,
                 r.l1_order if r.l1_order is not None else float("nan"),
                 r.l2,
                 r.l2_order if r.l2_order is not None else float("nan"),
                 r.limiter_active) for r in self.rows]
        return write_csv(path, header, rows)

    def orders(self, p):
        return [(r.n, r.l1_order, r.l2_order) for r in self.rows
                if r.p == p]

    def finest_orders(self, p):
        rows = [r for r in self.rows if r.p == p]
        return rows[-1].l1_order, rows[-1].l2_order


def cli_convergence(config: RunConfig, p_list, grid_list,
                    out_path=None) -> ConvergenceReport:
    """Run each (p, grid), measure density errors at the end time with an
    over-integrated quadrature, and report orders log2(e_coarse / e_fine)
    for successive halvings."""
    rows = []
    for p in p_list:
        prev = None
        for n in grid_list:
            n_t = (n,) * _case_dim(config) if np.isscalar(n) else tuple(n)
            solver = setup_run(replace(config, p=p, n=n_t))
            if solver.case.exact is None:
                raise ValueError(f"case {config.case} has no exact solution")
            result = solver.run()
            if result.failure is not None:
                break  # partial report; remaining grids are unreachable
            l1, l2 = density_error_norms(solver.mesh, solver.ops, result.u,
                                         solver.case, result.t)
            dx = float(solver.mesh.h[0])
            l1_order = np.log2(prev[0] / l1) if prev else None
            l2_order = np.log2(prev[1] / l2) if prev else None
            rows.append(ConvergenceRow(p=p, n=n_t, dx=dx, l1=l1,
                                       l1_order=l1_order, l2=l2,
                                       l2_order=l2_order,
                                       limiter_active=result.
                                       limiter_ever_active))
            prev = (l1, l2)
    report = ConvergenceReport(rows=rows)
    if out_path is not None:
        report.write(out_path)
    return report


def _case_dim(config):
    from ..cases import get_case
    return get_case(config.case).dim
