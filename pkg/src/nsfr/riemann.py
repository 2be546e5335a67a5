"""Exact Riemann solver for the 1D Euler equations and shock relations.

Standard two-wave construction (see Toro, "Riemann Solvers and Numerical
Methods for Fluid Dynamics"): Newton iteration on the pressure function from
a two-rarefaction initial guess, then self-similar sampling in x/t.  Used as
the reference for the shock-tube benchmarks and to synthesize pre/post shock
states (stationary and moving normal shocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PState:
    rho: float
    u: float
    p: float


def _f_side(p, side: PState, gamma):
    """Toro's f_K(p) and its derivative for one side of the star region."""
    a = np.sqrt(gamma * side.p / side.rho)
    if p > side.p:  # shock branch
        ak = 2.0 / ((gamma + 1.0) * side.rho)
        bk = (gamma - 1.0) / (gamma + 1.0) * side.p
        q = np.sqrt(ak / (p + bk))
        f = (p - side.p) * q
        df = q * (1.0 - 0.5 * (p - side.p) / (p + bk))
    else:  # rarefaction branch
        f = 2.0 * a / (gamma - 1.0) * ((p / side.p) ** ((gamma - 1.0)
                                                        / (2.0 * gamma)) - 1.0)
        df = (p / side.p) ** (-(gamma + 1.0) / (2.0 * gamma)) / (side.rho * a)
    return f, df


def star_state(left: PState, right: PState, gamma=1.4, tol=1e-12,
               max_iter=200):
    """Star-region pressure and velocity (p*, u*)."""
    aL = np.sqrt(gamma * left.p / left.rho)
    aR = np.sqrt(gamma * right.p / right.rho)
    if 2.0 * (aL + aR) / (gamma - 1.0) <= right.u - left.u:
        raise ValueError("initial data generate vacuum")

    # two-rarefaction guess is positive and robust across huge ratios
    z = (gamma - 1.0) / (2.0 * gamma)
    p = ((aL + aR - 0.5 * (gamma - 1.0) * (right.u - left.u))
         / (aL / left.p**z + aR / right.p**z)) ** (1.0 / z)
    p = max(p, 1e-14)

    for _ in range(max_iter):
        fL, dL = _f_side(p, left, gamma)
        fR, dR = _f_side(p, right, gamma)
        f = fL + fR + right.u - left.u
        dp = f / (dL + dR)
        p_new = p - dp
        if p_new <= 0.0:
            p_new = 0.5 * p
        if abs(p_new - p) <= tol * max(p_new, 1.0) and abs(f) <= tol * max(
                1.0, abs(left.u) + abs(right.u) + aL + aR):
            p = p_new
            break
        p = p_new
    fL, _ = _f_side(p, left, gamma)
    fR, _ = _f_side(p, right, gamma)
    u = 0.5 * (left.u + right.u) + 0.5 * (fR - fL)
    return p, u


def sample(left: PState, right: PState, xi, gamma=1.4):
    """Exact solution at similarity coordinates xi = x/t; returns
    (rho, u, p) arrays shaped like xi."""
    ps, us = star_state(left, right, gamma)
    xi = np.asarray(xi, dtype=float)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    aL = np.sqrt(gamma * left.p / left.rho)
    aR = np.sqrt(gamma * right.p / right.rho)
    gm, gp = gamma - 1.0, gamma + 1.0

    it = np.nditer(xi, flags=["multi_index"])
    for s in it:
        s = float(s)
        idx = it.multi_index
        if s <= us:  # left of contact
            if ps > left.p:  # left shock
                sl = left.u - aL * np.sqrt(gp / (2 * gamma) * ps / left.p
                                           + gm / (2 * gamma))
                if s < sl:
                    rho[idx], u[idx], p[idx] = left.rho, left.u, left.p
                else:
                    r = left.rho * ((ps / left.p + gm / gp)
                                    / (gm / gp * ps / left.p + 1.0))
                    rho[idx], u[idx], p[idx] = r, us, ps
            else:  # left rarefaction
                head = left.u - aL
                a_star = aL * (ps / left.p) ** (gm / (2 * gamma))
                tail = us - a_star
                if s < head:
                    rho[idx], u[idx], p[idx] = left.rho, left.u, left.p
                elif s > tail:
                    r = left.rho * (ps / left.p) ** (1.0 / gamma)
                    rho[idx], u[idx], p[idx] = r, us, ps
                else:
                    uf = 2.0 / gp * (aL + gm / 2.0 * left.u + s)
                    af = 2.0 / gp * (aL + gm / 2.0 * (left.u - s))
                    rho[idx] = left.rho * (af / aL) ** (2.0 / gm)
                    u[idx] = uf
                    p[idx] = left.p * (af / aL) ** (2.0 * gamma / gm)
        else:  # right of contact
            if ps > right.p:  # right shock
                sr = right.u + aR * np.sqrt(gp / (2 * gamma) * ps / right.p
                                            + gm / (2 * gamma))
                if s > sr:
                    rho[idx], u[idx], p[idx] = right.rho, right.u, right.p
                else:
                    r = right.rho * ((ps / right.p + gm / gp)
                                     / (gm / gp * ps / right.p + 1.0))
                    rho[idx], u[idx], p[idx] = r, us, ps
            else:  # right rarefaction
                head = right.u + aR
                a_star = aR * (ps / right.p) ** (gm / (2 * gamma))
                tail = us + a_star
                if s > head:
                    rho[idx], u[idx], p[idx] = right.rho, right.u, right.p
                elif s < tail:
                    r = right.rho * (ps / right.p) ** (1.0 / gamma)
                    rho[idx], u[idx], p[idx] = r, us, ps
                else:
                    uf = 2.0 / gp * (-aR + gm / 2.0 * right.u + s)
                    af = 2.0 / gp * (aR - gm / 2.0 * (right.u - s))
                    rho[idx] = right.rho * (af / aR) ** (2.0 / gm)
                    u[idx] = uf
                    p[idx] = right.p * (af / aR) ** (2.0 * gamma / gm)
    return rho, u, p


def normal_shock(mach: float, rho1: float, p1: float, gamma=1.4):
    """Stationary normal-shock jump: returns downstream (rho2, u2, p2) for
    upstream (rho1, u1 = M a1, p1)."""
    if mach <= 1.0:
        raise ValueError("normal shock requires M > 1")
    a1 = np.sqrt(gamma * p1 / rho1)
    u1 = mach * a1
    rr = (gamma + 1.0) * mach**2 / ((gamma - 1.0) * mach**2 + 2.0)
    pr = 1.0 + 2.0 * gamma / (gamma + 1.0) * (mach**2 - 1.0)
    return rho1 * rr, u1 / rr, p1 * pr


def moving_shock(mach: float, rho0: float, p0: float, gamma=1.4):
    """Post-shock state behind a shock of Mach `mach` advancing into the
    quiescent state (rho0, 0, p0); returns (rho, u, p, shock_speed)."""
    a0 = np.sqrt(gamma * p0 / rho0)
    s = mach * a0
    rho2, u2_rel, p2 = normal_shock(mach, rho0, p0, gamma)
    # in the lab frame the gas behind the shock moves at s - u2_rel
    return rho2, s - u2_rel, p2, s


def shock_mach_from_state(rho0, p0, rho2, gamma=1.4):
    """Shock Mach number implied by a compression ratio into (rho0, p0)."""
    r = rho2 / rho0
    m2 = 2.0 * r / ((gamma + 1.0) - (gamma - 1.0) * r)
    return float(np.sqrt(m2))
