"""Compressible Euler physics: state conversions, fluxes, wavespeeds, entropy.

States are numpy arrays whose last axis holds the conserved variables
(rho, m, n, E) = (density, x-momentum, y-momentum, total energy).  The same
4-component layout is used in 1D, with the y-momentum identically zero, so
every routine works unchanged in both dimensions.
"""

from __future__ import annotations

import numpy as np

GAMMA_DEFAULT = 1.4

RHO, MX, MY, EN = 0, 1, 2, 3


class InadmissibleStateError(ValueError):
    """Raised when a state violates rho > 0, p > 0."""


def conservative(rho, u, v, p, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """Primitive (rho, u, v, p) -> conserved (rho, m, n, E), broadcasting."""
    rho, u, v, p = np.broadcast_arrays(*map(np.asarray, (rho, u, v, p)))
    w = np.empty(rho.shape + (4,))
    w[..., RHO] = rho
    w[..., MX] = rho * u
    w[..., MY] = rho * v
    w[..., EN] = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return w


def primitive(w: np.ndarray, gamma=GAMMA_DEFAULT):
    """Conserved -> (rho, u, v, p)."""
    rho = w[..., RHO]
    u = w[..., MX] / rho
    v = w[..., MY] / rho
    p = pressure(w, gamma)
    return rho, u, v, p


def pressure(w: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """p = (gamma-1)(E - (m^2+n^2)/(2 rho)); may be <= 0, callers decide."""
    rho = w[..., RHO]
    if np.any(rho == 0.0):
        raise InadmissibleStateError("zero density in pressure evaluation")
    ke = 0.5 * (w[..., MX] ** 2 + w[..., MY] ** 2) / rho
    return (gamma - 1.0) * (w[..., EN] - ke)


def is_admissible(w: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """Membership in the admissible set: rho > 0 and p > 0 (NaN fails)."""
    rho = w[..., RHO]
    with np.errstate(invalid="ignore", divide="ignore"):
        ke = 0.5 * (w[..., MX] ** 2 + w[..., MY] ** 2) / rho
        p = (gamma - 1.0) * (w[..., EN] - ke)
    return (rho > 0.0) & (p > 0.0)


def _require_admissible(w, gamma):
    if not np.all(is_admissible(w, gamma)):
        raise InadmissibleStateError("state outside the admissible set")


def sound_speed(w: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """a = sqrt(gamma p / rho)."""
    return np.sqrt(gamma * pressure(w, gamma) / w[..., RHO])


def physical_flux(w: np.ndarray, axis: int, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """Euler flux column f(w) (axis=0) or g(w) (axis=1)."""
    _require_admissible(w, gamma)
    return _physical_flux_unchecked(w, axis, gamma)


def _physical_flux_unchecked(w, axis, gamma):
    rho = w[..., RHO]
    p = pressure(w, gamma)
    un = w[..., MX + axis] / rho
    f = np.empty_like(w)
    f[..., RHO] = w[..., MX + axis]
    f[..., MX] = w[..., MX] * un
    f[..., MY] = w[..., MY] * un
    f[..., MX + axis] += p
    f[..., EN] = (w[..., EN] + p) * un
    return f


def max_wavespeed(w: np.ndarray, gamma=GAMMA_DEFAULT, axis: int | None = None):
    """|velocity| + a; with `axis` given, |u_axis| + a for that direction."""
    _require_admissible(w, gamma)
    a = sound_speed(w, gamma)
    rho = w[..., RHO]
    if axis is None:
        vel = np.sqrt(w[..., MX] ** 2 + w[..., MY] ** 2) / rho
    else:
        vel = np.abs(w[..., MX + axis]) / rho
    return vel + a


def directional_wavespeeds(w: np.ndarray, gamma=GAMMA_DEFAULT):
    """(|u| + a, |v| + a) pair used by the limiter's average weights."""
    a = sound_speed(w, gamma)
    rho = w[..., RHO]
    return np.abs(w[..., MX]) / rho + a, np.abs(w[..., MY]) / rho + a


def entropy_function(w: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """Mathematical entropy U = -rho s / (gamma - 1), s = ln(p rho^-gamma).

    U is convex on the admissible set and non-increasing for entropy-stable
    discretizations, which is the trend the monitors check.
    """
    rho = w[..., RHO]
    p = pressure(w, gamma)
    s = np.log(p) - gamma * np.log(rho)
    return -rho * s / (gamma - 1.0)


def entropy_variables(w: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """v = dU/dw for the entropy pair above."""
    rho = w[..., RHO]
    p = pressure(w, gamma)
    s = np.log(p) - gamma * np.log(rho)
    v = np.empty_like(w)
    v[..., RHO] = (gamma - s) / (gamma - 1.0) \
        - 0.5 * (w[..., MX] ** 2 + w[..., MY] ** 2) / (rho * p)
    v[..., MX] = w[..., MX] / p
    v[..., MY] = w[..., MY] / p
    v[..., EN] = -rho / p
    return v


def conservative_from_entropy(v: np.ndarray, gamma=GAMMA_DEFAULT) -> np.ndarray:
    """Inverse of :func:`entropy_variables` (v4 < 0 required)."""
    v1, v2, v3, v4 = v[..., RHO], v[..., MX], v[..., MY], v[..., EN]
    s = gamma - (gamma - 1.0) * (v1 - 0.5 * (v2 * v2 + v3 * v3) / v4)
    # rho/p = -v4 together with p rho^-gamma = e^s
    rho = (-v4 * np.exp(s)) ** (1.0 / (1.0 - gamma))
    p = rho / (-v4)
    u = -v2 / v4
    vv = -v3 / v4
    return conservative(rho, u, vv, p, gamma)


def entropy_flux_potential(w: np.ndarray, axis: int) -> np.ndarray:
    """psi = rho u_axis, the flux potential in the entropy shuffle identity
    (v_R - v_L) . f_s = psi_R - psi_L satisfied by entropy-conserving fluxes."""
    return w[..., MX + axis]
