"""Shared test utilities: random admissible states and independent oracles.

The oracles here deliberately re-derive quantities from first principles
(dense matrix assembly, textbook formulas written out separately) so that
the production flux-differencing / projection code is checked against an
independent route, not against itself.
"""

import numpy as np

from nsfr.euler import conservative
from nsfr.quadrature import differentiation_matrix, lagrange_eval


def random_admissible(rng, n, vel_scale=2.0, rho_range=(0.1, 5.0),
                      p_range=(0.05, 8.0)):
    rho = rng.uniform(*rho_range, n)
    u = rng.uniform(-vel_scale, vel_scale, n)
    v = rng.uniform(-vel_scale, vel_scale, n)
    p = rng.uniform(*p_range, n)
    return conservative(rho, u, v, p)


def entropy_vars_oracle(w, gamma=1.4):
    """Entropy variables for U = -rho s/(gamma-1), written out directly."""
    rho, mx, my, E = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    p = (gamma - 1.0) * (E - 0.5 * (mx**2 + my**2) / rho)
    s = np.log(p * rho**-gamma)
    v = np.empty_like(w)
    v[..., 0] = (gamma - s) / (gamma - 1.0) - 0.5 * (mx**2 + my**2) / (rho * p)
    v[..., 1] = mx / p
    v[..., 2] = my / p
    v[..., 3] = -rho / p
    return v


def shuffle_residual(wL, wR, fs, axis, gamma=1.4):
    """(v_R - v_L) . f_s - (psi_R - psi_L); zero for EC fluxes."""
    vL = entropy_vars_oracle(wL, gamma)
    vR = entropy_vars_oracle(wR, gamma)
    psiL = wL[..., 1 + axis]
    psiR = wR[..., 1 + axis]
    return np.einsum("...c,...c->...", vR - vL, fs) - (psiR - psiL)


def chra_oracle(wL, wR, axis, gamma=1.4):
    """Direct transliteration of the split-form flux definition, written
    against the hat-quantity formulas rather than the production kernel."""
    import mpmath  # extended precision for the logarithmic means

    def logmean(a, b):
        if a == b:
            return mpmath.mpf(a)
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        return (a - b) / (mpmath.log(a) - mpmath.log(b))

    def prim(w):
        rho, mx, my, E = w
        u = mx / rho
        v = my / rho
        p = (gamma - 1.0) * (E - 0.5 * rho * (u * u + v * v))
        return rho, u, v, p

    rL, uL, vL, pL = prim(wL)
    rR, uR, vR, pR = prim(wR)
    avg = lambda a, b: 0.5 * (a + b)  # noqa: E731
    rho_ln = float(logmean(rL, rR))
    u_hat, v_hat = avg(uL, uR), avg(vL, vR)
    p1 = avg(pL, pR)
    p2 = float(logmean(rL / pL, rR / pR))
    h_hat = (1.0 / (p2 * (gamma - 1.0))
             + 0.5 * ((2 * u_hat**2 - avg(uL**2, uR**2))
                      + (2 * v_hat**2 - avg(vL**2, vR**2)))
             + 2.0 * p1 / rho_ln)
    un = u_hat if axis == 0 else v_hat
    f = np.empty(4)
    f[0] = rho_ln * un
    f[1] = f[0] * u_hat + (p1 if axis == 0 else 0.0)
    f[2] = f[0] * v_hat + (p1 if axis == 1 else 0.0)
    f[3] = rho_ln * un * h_hat - avg((uL if axis == 0 else vL) * pL,
                                     (uR if axis == 0 else vR) * pR)
    return f


def dense_hybridized_skew(nodes, weights):
    """Dense [[Q-Q^T, E^T B], [-BE, 0]] built with explicit loops."""
    nq = nodes.size
    d = differentiation_matrix(nodes)
    q = np.zeros((nq, nq))
    for i in range(nq):
        for j in range(nq):
            q[i, j] = weights[i] * d[i, j]
    e = lagrange_eval(nodes, np.array([-1.0, 1.0]))
    full = np.zeros((nq + 2, nq + 2))
    full[:nq, :nq] = q - q.T
    for i in range(nq):
        full[i, nq] = -e[0, i]
        full[i, nq + 1] = e[1, i]
    full[nq:, :nq] = -full[:nq, nq:].T
    return full


def dense_flux_diff_1d(u_vol, u_facet_lo, u_facet_hi, nodes, weights,
                       flux_fn, h):
    """Reference 1D flux-differencing volume+facet rows via the dense
    combined operator and explicit pair loops: rows of
    (Q_skew o F) 1, scaled by 2/h."""
    nq = nodes.size
    qs = dense_hybridized_skew(nodes, weights)
    states = np.vstack([u_vol, u_facet_lo[None, :], u_facet_hi[None, :]])
    rows = np.zeros((nq + 2, 4))
    for i in range(nq + 2):
        for j in range(nq + 2):
            if qs[i, j] != 0.0:
                rows[i] += qs[i, j] * flux_fn(states[i], states[j])
    return rows * (2.0 / h)
