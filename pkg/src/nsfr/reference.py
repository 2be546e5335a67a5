"""Piecewise-constant (one-node, degree-0) reference solver.

The Shu-Osher benchmark has no closed-form solution; its reference profile
is produced by this SSPRK3 / local-Lax-Friedrichs solver on a very fine grid
(N = 32768), i.e. the degree-0 strong form with a one-node rule.  The result
is cached on disk and committed so the test suite does not regenerate it.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numba import njit

from .cases import get_case
from .euler import GAMMA_DEFAULT

DATA_DIR = Path(__file__).parent / "data"


@njit(cache=True)
def _llf_rhs(w, gamma, w_left, inflow_left, out):
    """First-order LLF finite-volume residual; left boundary either a fixed
    inflow state or transmissive, right boundary transmissive."""
    n = w.shape[0]
    for i in range(n + 1):
        if i == 0:
            if inflow_left:
                rl, ml, el = w_left[0], w_left[1], w_left[2]
            else:
                rl, ml, el = w[0, 0], w[0, 1], w[0, 2]
        else:
            rl, ml, el = w[i - 1, 0], w[i - 1, 1], w[i - 1, 2]
        if i == n:
            rr, mr, er = w[n - 1, 0], w[n - 1, 1], w[n - 1, 2]
        else:
            rr, mr, er = w[i, 0], w[i, 1], w[i, 2]

        ul = ml / rl
        pl = (gamma - 1.0) * (el - 0.5 * ml * ul)
        ur = mr / rr
        pr = (gamma - 1.0) * (er - 0.5 * mr * ur)
        lam_l = abs(ul) + np.sqrt(gamma * pl / rl)
        lam_r = abs(ur) + np.sqrt(gamma * pr / rr)
        lam = lam_l if lam_l > lam_r else lam_r

        f0 = 0.5 * (ml + mr) - 0.5 * lam * (rr - rl)
        f1 = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * lam * (mr - ml)
        f2 = 0.5 * ((el + pl) * ul + (er + pr) * ur) - 0.5 * lam * (er - el)
        if i > 0:
            out[i - 1, 0] -= f0
            out[i - 1, 1] -= f1
            out[i - 1, 2] -= f2
        if i < n:
            out[i, 0] += f0
            out[i, 1] += f1
            out[i, 2] += f2
    return out


def run_fv_reference(case_name="shu-osher", n=32768, cfl=0.5, t_end=None,
                     gamma=GAMMA_DEFAULT):
    """Run the degree-0 reference configuration; returns (x_centers, w)."""
    case = get_case(case_name)
    t_end = case.t_end if t_end is None else t_end
    xmin, xmax = case.xmin[0], case.xmax[0]
    dx = (xmax - xmin) / n
    x = xmin + (np.arange(n) + 0.5) * dx

    w4 = case.initial(x[:, None])[:, 0, :]
    w = np.ascontiguousarray(w4[:, [0, 1, 3]])  # drop the transverse momentum

    from .mesh import SupersonicInflow
    bc_left = case.boundary[(0, 0)] if isinstance(case.boundary, dict) else None
    inflow_left = isinstance(bc_left, SupersonicInflow)
    w_left = np.asarray(bc_left.state, dtype=float)[[0, 1, 3]] \
        if inflow_left else np.zeros(3)

    t = 0.0
    out = np.empty_like(w)
    while t < t_end - 1e-14:
        u = w[:, 1] / w[:, 0]
        p = (gamma - 1.0) * (w[:, 2] - 0.5 * w[:, 1] * u)
        lam = np.max(np.abs(u) + np.sqrt(gamma * p / w[:, 0]))
        dt = min(cfl * dx / lam, t_end - t)

        def rhs(q):
            out.fill(0.0)
            return _llf_rhs(q, gamma, w_left, inflow_left, out) / dx

        w1 = w + dt * rhs(w)
        w2 = 0.25 * (3.0 * w + w1 + dt * rhs(w1))
        w = (w + 2.0 * w2 + 2.0 * dt * rhs(w2)) / 3.0
        t += dt
    return x, w


def shu_osher_reference(regenerate=False):
    """Cached (x, rho) reference profile for the Shu-Osher case at t=1.8."""
    path = DATA_DIR / "shu_osher_reference.npz"
    if path.exists() and not regenerate:
        data = np.load(path)
        return data["x"], data["rho"]
    x, w = run_fv_reference("shu-osher")
    DATA_DIR.mkdir(exist_ok=True)
    np.savez_compressed(path, x=x, rho=w[:, 0])
    return x, w[:, 0]
