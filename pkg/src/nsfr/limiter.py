"""Positivity-preserving limiter (Zhang-Shu type) with solution-node sampling.

Per element, the conserved solution is scaled toward its cell average in two
stages: density first (theta_1), then pressure (theta_2, linear Wang-Shu
formula).  The minima that drive the scaling are taken over three node sets:
the two mixed tensor quadratures, GLL x GL and GL x GLL, and additionally the
GLL x GLL solution nodes themselves.  Sampling the solution nodes is the
robustness modification: the tensored sets alone can leave negative density
or pressure at the nodes the scheme actually evaluates.  In 1D the sets
reduce to the GL points plus the GLL solution points.

Both scalings are affine about the cell average, so they preserve the cell
average exactly (conservation) and act identically on every evaluation of
the polynomial, including the mixed-set values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .euler import GAMMA_DEFAULT, directional_wavespeeds
from .operators import OperatorSet

THETA_DENOM_FLOOR = 1e-300


@dataclass(frozen=True)
class LimiterConfig:
    enabled: bool = True
    eps: float = 1e-13
    # False drops the solution-node set from the minima (the plain
    # Wang-Shu variant), kept for the robustness comparisons.
    include_solution_nodes: bool = True

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("positivity floor must be > 0")


@dataclass
class LimiterActivity:
    limited_elements: int = 0
    theta1_min: float = 1.0
    theta2_min: float = 1.0

    def merge(self, other: "LimiterActivity"):
        self.limited_elements += other.limited_elements
        self.theta1_min = min(self.theta1_min, other.theta1_min)
        self.theta2_min = min(self.theta2_min, other.theta2_min)


class CellAverageError(RuntimeError):
    """Inadmissible cell average: the limiter cannot recover (hard error)."""

    def __init__(self, message, element=None, time=None):
        super().__init__(message)
        self.element = element
        self.time = time


def _pressure_of(w, gamma):
    ke = 0.5 * (w[..., 1] ** 2 + w[..., 2] ** 2) / w[..., 0]
    return (gamma - 1.0) * (w[..., 3] - ke)


class Limiter:
    """Stage limiter bound to an operator set and mesh spacings.

    The 2D cell average is the convex combination of the two mixed-set
    quadrature averages with weights a_i lambda_i / mu, lambda_i = dt/h_i;
    the directional wavespeeds a_i are taken from each element's previous
    cell average (initialized from the plain set average), which keeps the
    combination local and convex.
    """

    def __init__(self, ops: OperatorSet, h, config: LimiterConfig,
                 gamma: float = GAMMA_DEFAULT):
        self.ops = ops
        self.h = np.atleast_1d(np.asarray(h, dtype=float))
        self.config = config
        self.gamma = gamma
        self._wavespeed_cache = None  # (a1, a2) per element

    # -- node-set evaluation -------------------------------------------------

    def node_set_values(self, u: np.ndarray) -> list[np.ndarray]:
        """Solution evaluated on the limiter node sets (sets 1[, 2], 3)."""
        ops = self.ops
        sets = [np.einsum("ks,esc->ekc", li, u) for li in ops.limiter_interp]
        sets.append(u)
        return sets

    def set_averages(self, u: np.ndarray) -> list[np.ndarray]:
        ops = self.ops
        vals = [np.einsum("ks,esc->ekc", li, u) for li in ops.limiter_interp]
        return [np.einsum("k,ekc->ec", w, v)
                for w, v in zip(ops.limiter_avg_weights, vals)], vals

    def cell_average(self, u: np.ndarray, dt: float) -> np.ndarray:
        """Mixed-quadrature cell average (plain GL average in 1D)."""
        avgs, _ = self.set_averages(u)
        return self._combine_averages(avgs, dt)

    def _combine_averages(self, avgs, dt):
        if self.ops.dim == 1:
            return avgs[0]
        a1, a2 = self._wavespeeds(avgs)
        lam1 = dt / self.h[0]
        lam2 = dt / self.h[1]
        mu = a1 * lam1 + a2 * lam2
        w1 = np.where(mu > 0.0, a1 * lam1 / np.where(mu > 0.0, mu, 1.0), 0.5)
        w2 = 1.0 - w1
        return w1[:, None] * avgs[0] + w2[:, None] * avgs[1]

    def _wavespeeds(self, avgs):
        if self._wavespeed_cache is None:
            seed = 0.5 * (avgs[0] + avgs[1])
            self._wavespeed_cache = directional_wavespeeds(seed, self.gamma)
        return self._wavespeed_cache

    # -- limiting ------------------------------------------------------------

    def apply(self, u: np.ndarray, dt: float, time: float = 0.0):
        """Limit every element; returns (limited solution, activity record)."""
        ops, eps, gamma = self.ops, self.config.eps, self.gamma
        avgs, set_vals = self.set_averages(u)
        wbar = self._combine_averages(avgs, dt)

        rho_bar = wbar[:, 0]
        p_bar = _pressure_of(wbar, gamma)
        good = np.isfinite(rho_bar) & np.isfinite(p_bar) \
            & (rho_bar > eps) & (p_bar > eps)
        if not np.all(good):
            bad = int(np.nonzero(~good)[0][0])
            raise CellAverageError(
                f"inadmissible cell average in element {bad} at t={time}",
                element=bad, time=time)

        # refresh the wavespeed cache for the next stage's combination
        if ops.dim == 2:
            self._wavespeed_cache = directional_wavespeeds(wbar, gamma)

        sets = list(set_vals)
        if self.config.include_solution_nodes:
            sets.append(u)

        # density scaling
        rho_min = np.min([s[..., 0].min(axis=1) for s in sets], axis=0)
        denom = np.maximum(rho_bar - rho_min, THETA_DENOM_FLOOR)
        theta1 = np.where(rho_min < eps,
                          np.minimum((rho_bar - eps) / denom, 1.0), 1.0)

        u_hat = u.copy()
        u_hat[..., 0] = theta1[:, None] * (u[..., 0] - rho_bar[:, None]) \
            + rho_bar[:, None]
        # the same affine map applies to any evaluation of the polynomial
        hat_sets = []
        for s in set_vals:
            sh = s.copy()
            sh[..., 0] = theta1[:, None] * (s[..., 0] - rho_bar[:, None]) \
                + rho_bar[:, None]
            hat_sets.append(sh)
        if self.config.include_solution_nodes:
            hat_sets.append(u_hat)

        # pressure scaling: linear Wang-Shu factor at flagged nodes.  The
        # flag threshold is eps (not 0) so no pressure in (0, eps) survives.
        theta2 = np.ones_like(theta1)
        for s in hat_sets:
            p = _pressure_of(s, gamma)
            flagged = p < eps
            if np.any(flagged):
                t = np.where(flagged,
                             p_bar[:, None] / np.maximum(
                                 p_bar[:, None] - p, THETA_DENOM_FLOOR),
                             1.0)
                theta2 = np.minimum(theta2, t.min(axis=1))

        u_new = theta2[:, None, None] * (u_hat - wbar[:, None, :]) \
            + wbar[:, None, :]

        limited = (theta1 < 1.0) | (theta2 < 1.0)
        # untouched elements pass through bitwise (idempotence)
        u_new[~limited] = u[~limited]
        activity = LimiterActivity(
            limited_elements=int(np.count_nonzero(limited)),
            theta1_min=float(theta1.min()) if theta1.size else 1.0,
            theta2_min=float(theta2.min()) if theta2.size else 1.0)
        return u_new, activity

    def node_sets_admissible(self, u: np.ndarray) -> np.ndarray:
        """Per-element: rho > 0 and p > 0 across all three node sets (used
        as the positivity-failure detector when the limiter is off)."""
        ok = np.ones(u.shape[0], dtype=bool)
        for s in self.node_set_values(u):
            rho = s[..., 0]
            with np.errstate(invalid="ignore", divide="ignore"):
                p = _pressure_of(s, self.gamma)
            good = (rho > 0.0) & (p > 0.0) & np.isfinite(rho) & np.isfinite(p)
            ok &= good.all(axis=1)
        return ok


def limit_element(ops: OperatorSet, h, config: LimiterConfig, u_elem,
                  gamma=GAMMA_DEFAULT, dt: float = 1.0):
    """Single-element convenience wrapper around :class:`Limiter`."""
    lim = Limiter(ops, h, config, gamma)
    u_new, activity = lim.apply(u_elem[None, ...], dt)
    return u_new[0], activity
