"""SSPRK3 time advancement with per-stage limiting and failure records.

A positivity failure is data, not an abort: `run_to_time` returns a
:class:`FailureRecord` describing when/where the solve left the admissible
set, which is exactly what the constant-time-step sweep tables consume.
With the limiter on, the unrecoverable event is an inadmissible cell
average; with it off, any stage whose limiter node sets contain
non-positive density or pressure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .limiter import CellAverageError, Limiter, LimiterActivity
from .residual import Discretization, PositivityError


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepControl:
    """CFL-driven or fixed time step up to end_time (final step truncated)."""

    mode: str                 # "cfl" or "fixed"
    value: float
    end_time: float
    max_steps: int = 50_000_000

    def __post_init__(self):
        if self.mode not in ("cfl", "fixed"):
            raise ValueError("mode must be 'cfl' or 'fixed'")
        if self.value <= 0.0 or self.end_time < 0.0 or self.max_steps <= 0:
            raise ValueError("step control values must be positive")


@dataclass
class FailureRecord:
    time: float
    step: int
    stage: int | None
    element: int | None
    where: str
    message: str


@dataclass
class MonitorSeries:
    time: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    momentum_x: list = field(default_factory=list)
    momentum_y: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    lambda_max: list = field(default_factory=list)
    limited_elements: list = field(default_factory=list)
    theta1_min: list = field(default_factory=list)
    theta2_min: list = field(default_factory=list)

    COLUMNS = ("time", "entropy", "mass", "momentum_x", "momentum_y",
               "energy", "lambda_max", "limited_elements", "theta1_min",
               "theta2_min")

    def sample(self, disc, u, t, activity: LimiterActivity):
        self.time.append(t)
        self.entropy.append(disc.entropy_total(u))
        q = disc.conserved_integrals(u)
        self.mass.append(float(q[0]))
        self.momentum_x.append(float(q[1]))
        self.momentum_y.append(float(q[2]))
        self.energy.append(float(q[3]))
        self.lambda_max.append(disc.max_wavespeed(u))
        self.limited_elements.append(activity.limited_elements)
        self.theta1_min.append(activity.theta1_min)
        self.theta2_min.append(activity.theta2_min)

    def rows(self):
        cols = [getattr(self, c) for c in self.COLUMNS]
        return list(zip(*cols))


@dataclass
class RunResult:
    u: np.ndarray
    t: float
    steps: int
    series: MonitorSeries
    failure: FailureRecord | None
    lambda_bar_max: float          # max cell-average wavespeed over all steps
    limiter_ever_active: bool
    activity_total: LimiterActivity


def compute_dt(disc: Discretization, u: np.ndarray, cfl: float) -> float:
    """dt = CFL * dx_tilde / lambda_max with dx_tilde = x-extent / DOF^(1/dim)
    and lambda_max the solution-node max of |velocity| + sound speed."""
    lam = disc.max_wavespeed(u)
    if lam <= 0.0:
        raise ValueError("quiescent field: CFL mode undefined, use fixed dt")
    mesh = disc.mesh
    dof = mesh.n_active * disc.ops.n_sol
    dx_tilde = (mesh.xmax[0] - mesh.xmin[0]) / dof ** (1.0 / mesh.dim)
    return cfl * dx_tilde / lam


def _cell_average_wavespeed(disc, u) -> float:
    from .euler import max_wavespeed
    avg = disc.cell_averages(u)
    return float(np.max(max_wavespeed(avg, disc.gamma)))


def ssprk3_step(u, t, dt, rhs, post_stage=None):
    """One SSP RK3 step; `post_stage(w, stage)` may transform each stage
    output (limiter) and may raise to signal positivity failure.

    The stages are the classical convex combinations
    w1 = u + dt L(u);  w2 = (3u + w1 + dt L(w1))/4;
    u+ = (u + 2 w2 + 2 dt L(w2))/3, evaluated in increment form about u so
    a vanishing right-hand side reproduces u bitwise.
    """
    def stage(w, s):
        return post_stage(w, s) if post_stage is not None else w

    w1 = stage(u + dt * rhs(u, t), 0)
    w2 = stage(u + 0.25 * ((w1 - u) + dt * rhs(w1, t + dt)), 1)
    return stage(u + (2.0 / 3.0) * ((w2 - u) + dt * rhs(w2, t + 0.5 * dt)), 2)


def run_to_time(disc: Discretization, u0: np.ndarray, control: StepControl,
                rhs=None, limiter: Limiter | None = None,
                monitor_every: int = 20) -> RunResult:
    """Advance to end_time; monitors at the configured step cadence.

    Zero-step runs return the initial state with an empty series.  Failures
    inside any stage produce a FailureRecord carrying the stage index.
    """
    rhs = rhs if rhs is not None else disc.nsfr_rhs
    u = u0.copy()
    t = 0.0
    steps = 0
    series = MonitorSeries()
    total = LimiterActivity(0, 1.0, 1.0)
    lam_bar = _cell_average_wavespeed(disc, u)
    failure = None

    limiting = limiter is not None and limiter.config.enabled
    if not limiting:
        checker = Limiter(disc.ops, disc.mesh.h,
                          _detector_config(), disc.gamma)

    if control.end_time > t:
        series.sample(disc, u, t, LimiterActivity(0, 1.0, 1.0))

    while t < control.end_time - 1e-14 * max(1.0, control.end_time):
        if steps >= control.max_steps:
            raise BudgetExceededError(
                f"exceeded max_steps={control.max_steps} at t={t}")
        if control.mode == "cfl":
            dt = compute_dt(disc, u, control.value)
        else:
            dt = control.value
        dt = min(dt, control.end_time - t)

        step_activity = LimiterActivity(0, 1.0, 1.0)

        def post_stage(w, stage_idx):
            if limiting:
                w, act = limiter.apply(w, dt, time=t)
                step_activity.merge(act)
            else:
                ok = checker.node_sets_admissible(w)
                if not np.all(ok):
                    bad = int(np.nonzero(~ok)[0][0])
                    raise PositivityError(
                        f"non-positive density/pressure in element {bad}",
                        time=t, element=bad, where="stage state",
                        stage=stage_idx)
            return w

        try:
            u_new = ssprk3_step(u, t, dt, rhs, post_stage)
        except (PositivityError, CellAverageError) as err:
            stage = getattr(err, "stage", None)
            failure = FailureRecord(
                time=t, step=steps, stage=stage,
                element=getattr(err, "element", None),
                where=getattr(err, "where", "cell average"),
                message=str(err))
            break

        u = u_new
        t += dt
        steps += 1
        total.merge(step_activity)
        lam_bar = max(lam_bar, _cell_average_wavespeed(disc, u))
        if steps % monitor_every == 0 or t >= control.end_time - 1e-14:
            series.sample(disc, u, t, step_activity)

    return RunResult(u=u, t=t, steps=steps, series=series, failure=failure,
                     lambda_bar_max=lam_bar,
                     limiter_ever_active=total.limited_elements > 0,
                     activity_total=total)


def _detector_config():
    from .limiter import LimiterConfig
    return LimiterConfig(enabled=False, eps=1e-13,
                         include_solution_nodes=True)
