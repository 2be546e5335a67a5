"""Two-point volume fluxes, means, and interface (surface) numerical fluxes.

The volume fluxes are the symmetric, consistent split-form fluxes used in the
flux-differencing volume terms:

* ``CH_RA`` -- Chandrashekar flux with Ranocha's pressure fix (entropy
  conserving, kinetic-energy preserving, pressure-equilibrium preserving);
  the default.
* ``CH``    -- Chandrashekar (EC, KEP) [Chandrashekar 2013].
* ``IR``    -- Ismail-Roe (EC) [Ismail & Roe 2009].
* ``KG``    -- Kennedy-Gruber (KEP only) [Kennedy & Gruber 2008].
* ``CENTRAL`` -- arithmetic mean of the physical fluxes; not entropy
  conserving, provided for the strong-DG baseline surface flux.

Interface fluxes combine a volume flux with upwind dissipation:
f* = f_s(UL, UR) - 0.5 D (UR - UL), with D either the Roe-matrix absolute
value about Roe-averaged states (no entropy fix) or a local Lax-Friedrichs
scalar.

The scalar flux formulas are written once as numba kernels; array and
flux-differencing code paths share them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .euler import GAMMA_DEFAULT, InadmissibleStateError, is_admissible

# flux / dissipation selectors (integer codes usable inside numba kernels)
CHRA, CH, IR, KG, CENTRAL, LINEAR = 0, 1, 2, 3, 4, 5
DISS_NONE, DISS_ROE, DISS_LLF = 0, 1, 2

# LINEAR is an advection surrogate (f(u) = u componentwise) used to verify
# the operator algebra against the strong form; not a physical flux.
VOLUME_FLUXES = {"CH_RA": CHRA, "CH": CH, "IR": IR, "KG": KG,
                 "CENTRAL": CENTRAL, "LINEAR": LINEAR}
DISSIPATIONS = {"Roe": DISS_ROE, "LLF": DISS_LLF, "None": DISS_NONE}

# (EC, KEP, PEP) property flags per named flux
FLUX_PROPERTIES = {
    "CH_RA": (True, True, True),
    "CH": (True, True, False),
    "IR": (True, False, False),
    "KG": (False, True, False),
    "CENTRAL": (False, False, False),
}

LOG_MEAN_SERIES_THRESHOLD = 1e-4


@dataclass(frozen=True)
class FluxScheme:
    """Volume two-point flux + surface dissipation selection."""

    volume_flux: str = "CH_RA"
    dissipation: str = "Roe"

    def __post_init__(self):
        if self.volume_flux not in VOLUME_FLUXES:
            raise ValueError(f"unknown volume flux {self.volume_flux!r}")
        if self.dissipation not in DISSIPATIONS:
            raise ValueError(f"unknown dissipation {self.dissipation!r}")

    @property
    def volume_code(self) -> int:
        return VOLUME_FLUXES[self.volume_flux]

    @property
    def dissipation_code(self) -> int:
        return DISSIPATIONS[self.dissipation]


def mean(a, b):
    """Arithmetic mean (a + b) / 2."""
    return 0.5 * (np.asarray(a, dtype=float) + np.asarray(b, dtype=float))


@njit(cache=True, inline="always")
def _log_mean(a, b):
    # (a - b) / (ln a - ln b), continuously extended at a == b.  Near
    # equality the direct formula loses all precision, so below a ratio
    # deviation of 1e-4 a 4-term expansion in u = f^2, f = (r-1)/(r+1),
    # is used instead (relative error there is O(u^4) ~ 1e-35).  Arguments
    # are ordered first so the result is bitwise symmetric in (a, b).
    lo = a if a <= b else b
    hi = b if a <= b else a
    d = (hi - lo) / lo
    if d < LOG_MEAN_SERIES_THRESHOLD:
        f = d / (d + 2.0)
        u = f * f
        return 0.5 * (lo + hi) / (1.0 + u * (1.0 / 3.0 + u * (0.2 + u / 7.0)))
    # log1p keeps full relative precision just above the series threshold,
    # where log(hi/lo) alone would lose ~4 digits to the ratio rounding
    return (hi - lo) / np.log1p(d)


def log_mean(a, b):
    """Logarithmic mean of positive values, elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("log_mean requires positive arguments")
    out = np.empty(np.broadcast(a, b).shape)
    _log_mean_arrays(np.ascontiguousarray(np.broadcast_to(a, out.shape).ravel()),
                     np.ascontiguousarray(np.broadcast_to(b, out.shape).ravel()),
                     out.reshape(-1))
    return out if out.ndim else float(out)


@njit(cache=True)
def _log_mean_arrays(a, b, out):
    for k in range(a.size):
        out[k] = _log_mean(a[k], b[k])


# ---------------------------------------------------------------------------
# scalar two-point fluxes
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _primitive_scalar(r, mx, my, e, gamma):
    u = mx / r
    v = my / r
    p = (gamma - 1.0) * (e - 0.5 * (mx * u + my * v))
    return u, v, p


@njit(cache=True, inline="always")
def _physical_flux_scalar(r, mx, my, e, axis, gamma):
    u, v, p = _primitive_scalar(r, mx, my, e, gamma)
    un = u if axis == 0 else v
    f0 = r * un
    f1 = mx * un
    f2 = my * un
    if axis == 0:
        f1 += p
    else:
        f2 += p
    f3 = (e + p) * un
    return f0, f1, f2, f3


@njit(cache=True, inline="always")
def _chra_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    # Chandrashekar / Ranocha split flux: rho^ln with mean velocities, mean
    # pressure, and the u-p cross term in the energy row that restores
    # pressure equilibrium [Ranocha 2021].
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    rho_ln = _log_mean(rL, rR)
    u_avg = 0.5 * (uL + uR)
    v_avg = 0.5 * (vL + vR)
    p_avg = 0.5 * (pL + pR)
    rho_over_p_ln = _log_mean(rL / pL, rR / pR)
    kinetic = (u_avg * u_avg - 0.25 * (uL * uL + uR * uR)
               + v_avg * v_avg - 0.25 * (vL * vL + vR * vR))
    h_hat = (1.0 / ((gamma - 1.0) * rho_over_p_ln) + kinetic
             + 2.0 * p_avg / rho_ln)
    un = u_avg if axis == 0 else v_avg
    up_avg = 0.5 * ((uL * pL + uR * pR) if axis == 0 else (vL * pL + vR * pR))
    f0 = rho_ln * un
    f1 = f0 * u_avg
    f2 = f0 * v_avg
    if axis == 0:
        f1 += p_avg
    else:
        f2 += p_avg
    f3 = f0 * h_hat - up_avg
    return f0, f1, f2, f3


@njit(cache=True, inline="always")
def _ch_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    # Chandrashekar's EC/KEP flux with beta = rho / (2 p).
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    betaL = 0.5 * rL / pL
    betaR = 0.5 * rR / pR
    rho_ln = _log_mean(rL, rR)
    beta_ln = _log_mean(betaL, betaR)
    u_avg = 0.5 * (uL + uR)
    v_avg = 0.5 * (vL + vR)
    p_tilde = 0.5 * (rL + rR) / (betaL + betaR)
    un = u_avg if axis == 0 else v_avg
    f0 = rho_ln * un
    f1 = f0 * u_avg
    f2 = f0 * v_avg
    if axis == 0:
        f1 += p_tilde
    else:
        f2 += p_tilde
    u_sq = 0.5 * (uL * uL + uR * uR)
    v_sq = 0.5 * (vL * vL + vR * vR)
    f3 = (f0 * (0.5 / ((gamma - 1.0) * beta_ln) - 0.5 * (u_sq + v_sq))
          + u_avg * f1 + v_avg * f2)
    return f0, f1, f2, f3


@njit(cache=True, inline="always")
def _ir_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    # Ismail-Roe parameter-vector flux z = sqrt(rho/p) (1, u, v, p).
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    z1L = np.sqrt(rL / pL)
    z1R = np.sqrt(rR / pR)
    z5L = np.sqrt(rL * pL)
    z5R = np.sqrt(rR * pR)
    z1_avg = 0.5 * (z1L + z1R)
    z5_avg = 0.5 * (z5L + z5R)
    z1_ln = _log_mean(z1L, z1R)
    z5_ln = _log_mean(z5L, z5R)
    rho_hat = z1_avg * z5_ln
    u_hat = 0.5 * (z1L * uL + z1R * uR) / z1_avg
    v_hat = 0.5 * (z1L * vL + z1R * vR) / z1_avg
    p1_hat = z5_avg / z1_avg
    p2_hat = ((gamma + 1.0) / (2.0 * gamma) * z5_ln / z1_ln
              + (gamma - 1.0) / (2.0 * gamma) * z5_avg / z1_avg)
    h_hat = gamma * p2_hat / (rho_hat * (gamma - 1.0)) \
        + 0.5 * (u_hat * u_hat + v_hat * v_hat)
    un = u_hat if axis == 0 else v_hat
    f0 = rho_hat * un
    f1 = f0 * u_hat
    f2 = f0 * v_hat
    if axis == 0:
        f1 += p1_hat
    else:
        f2 += p1_hat
    f3 = f0 * h_hat
    return f0, f1, f2, f3


@njit(cache=True, inline="always")
def _kg_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    # Kennedy-Gruber quadratic/cubic product split; no logarithmic means.
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    rho_avg = 0.5 * (rL + rR)
    u_avg = 0.5 * (uL + uR)
    v_avg = 0.5 * (vL + vR)
    p_avg = 0.5 * (pL + pR)
    e_avg = 0.5 * (eL / rL + eR / rR)  # specific total energy
    un = u_avg if axis == 0 else v_avg
    f0 = rho_avg * un
    f1 = f0 * u_avg
    f2 = f0 * v_avg
    if axis == 0:
        f1 += p_avg
    else:
        f2 += p_avg
    f3 = f0 * e_avg + p_avg * un
    return f0, f1, f2, f3


@njit(cache=True, inline="always")
def two_point_flux_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR,
                          axis, code, gamma):
    if code == 0:  # CH_RA
        return _chra_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
    elif code == 1:  # CH
        return _ch_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
    elif code == 2:  # IR
        return _ir_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
    elif code == 3:  # KG
        return _kg_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
    elif code == 4:  # CENTRAL
        a0, a1, a2, a3 = _physical_flux_scalar(rL, mxL, myL, eL, axis, gamma)
        b0, b1, b2, b3 = _physical_flux_scalar(rR, mxR, myR, eR, axis, gamma)
        return (0.5 * (a0 + b0), 0.5 * (a1 + b1),
                0.5 * (a2 + b2), 0.5 * (a3 + b3))
    else:  # LINEAR: advection surrogate f(u) = u, used by operator tests
        return (0.5 * (rL + rR), 0.5 * (mxL + mxR),
                0.5 * (myL + myR), 0.5 * (eL + eR))


@njit(cache=True)
def _pairwise_flux_kernel(wL, wR, axis, code, gamma, out):
    for k in range(wL.shape[0]):
        f0, f1, f2, f3 = two_point_flux_scalar(
            wL[k, 0], wL[k, 1], wL[k, 2], wL[k, 3],
            wR[k, 0], wR[k, 1], wR[k, 2], wR[k, 3], axis, code, gamma)
        out[k, 0] = f0
        out[k, 1] = f1
        out[k, 2] = f2
        out[k, 3] = f3


def two_point_flux(wL, wR, axis, flux="CH_RA", gamma=GAMMA_DEFAULT):
    """Evaluate the selected two-point volume flux pairwise.

    `wL`, `wR` are (..., 4) conserved states; returns the (..., 4) flux in
    the given axis direction.
    """
    code = VOLUME_FLUXES[flux] if isinstance(flux, str) else int(flux)
    wL = np.asarray(wL, dtype=float)
    wR = np.asarray(wR, dtype=float)
    if code != LINEAR and not (np.all(is_admissible(wL, gamma))
                               and np.all(is_admissible(wR, gamma))):
        raise InadmissibleStateError("two-point flux on inadmissible state")
    shape = np.broadcast_shapes(wL.shape, wR.shape)
    a = np.ascontiguousarray(np.broadcast_to(wL, shape)).reshape(-1, 4)
    b = np.ascontiguousarray(np.broadcast_to(wR, shape)).reshape(-1, 4)
    out = np.empty_like(a)
    _pairwise_flux_kernel(a, b, axis, code, gamma, out)
    return out.reshape(shape)


def chra_flux(wL, wR, axis, gamma=GAMMA_DEFAULT):
    return two_point_flux(wL, wR, axis, "CH_RA", gamma)


def ch_flux(wL, wR, axis, gamma=GAMMA_DEFAULT):
    return two_point_flux(wL, wR, axis, "CH", gamma)


def ir_flux(wL, wR, axis, gamma=GAMMA_DEFAULT):
    return two_point_flux(wL, wR, axis, "IR", gamma)


def kg_flux(wL, wR, axis, gamma=GAMMA_DEFAULT):
    return two_point_flux(wL, wR, axis, "KG", gamma)


# ---------------------------------------------------------------------------
# interface dissipation
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _roe_dissipation_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    """|A|(UR - UL) about the Roe average; last return flags a degenerate
    average (non-positive a^2) where the caller must fall back to LLF."""
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    sL = np.sqrt(rL)
    sR = np.sqrt(rR)
    w = 1.0 / (sL + sR)
    ub = (sL * uL + sR * uR) * w
    vb = (sL * vL + sR * vR) * w
    hL = (eL + pL) / rL
    hR = (eR + pR) / rR
    hb = (sL * hL + sR * hR) * w
    a2 = (gamma - 1.0) * (hb - 0.5 * (ub * ub + vb * vb))
    if a2 <= 0.0 or not np.isfinite(a2):
        return 0.0, 0.0, 0.0, 0.0, True
    ab = np.sqrt(a2)
    rb = sL * sR

    if axis == 0:
        unb, utb = ub, vb
        dun, dut = uR - uL, vR - vL
    else:
        unb, utb = vb, ub
        dun, dut = vR - vL, uR - uL
    dp = pR - pL
    drho = rR - rL

    a1 = (dp - rb * ab * dun) / (2.0 * a2)
    a2c = drho - dp / a2
    a3 = (dp + rb * ab * dun) / (2.0 * a2)
    a4 = rb * dut
    l1 = abs(unb - ab)
    l2 = abs(unb)
    l3 = abs(unb + ab)

    d_rho = l1 * a1 + l2 * a2c + l3 * a3
    d_mn = l1 * a1 * (unb - ab) + l2 * a2c * unb + l3 * a3 * (unb + ab)
    d_mt = (l1 * a1 + l2 * a2c + l3 * a3) * utb + l2 * a4
    d_e = (l1 * a1 * (hb - unb * ab) + l2 * a2c * 0.5 * (unb * unb + utb * utb)
           + l2 * a4 * utb + l3 * a3 * (hb + unb * ab))
    if axis == 0:
        return d_rho, d_mn, d_mt, d_e, False
    return d_rho, d_mt, d_mn, d_e, False


@njit(cache=True, inline="always")
def _llf_dissipation_scalar(rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma):
    uL, vL, pL = _primitive_scalar(rL, mxL, myL, eL, gamma)
    uR, vR, pR = _primitive_scalar(rR, mxR, myR, eR, gamma)
    unL = uL if axis == 0 else vL
    unR = uR if axis == 0 else vR
    lamL = abs(unL) + np.sqrt(gamma * pL / rL)
    lamR = abs(unR) + np.sqrt(gamma * pR / rR)
    lam = lamL if lamL > lamR else lamR
    return (lam * (rR - rL), lam * (mxR - mxL),
            lam * (myR - myL), lam * (eR - eL))


@njit(cache=True)
def interface_flux_kernel(wL, wR, axis, code, diss, gamma, out):
    """f* = f_s(UL, UR) - 0.5 D (UR - UL) for arrays of face states.

    Returns the number of faces where a degenerate Roe average forced the
    local Lax-Friedrichs fallback.
    """
    fallbacks = 0
    for k in range(wL.shape[0]):
        rL, mxL, myL, eL = wL[k, 0], wL[k, 1], wL[k, 2], wL[k, 3]
        rR, mxR, myR, eR = wR[k, 0], wR[k, 1], wR[k, 2], wR[k, 3]
        f0, f1, f2, f3 = two_point_flux_scalar(
            rL, mxL, myL, eL, rR, mxR, myR, eR, axis, code, gamma)
        if diss == 1:  # Roe
            d0, d1, d2, d3, bad = _roe_dissipation_scalar(
                rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
            if bad:
                fallbacks += 1
                d0, d1, d2, d3 = _llf_dissipation_scalar(
                    rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
        elif diss == 2:  # LLF
            d0, d1, d2, d3 = _llf_dissipation_scalar(
                rL, mxL, myL, eL, rR, mxR, myR, eR, axis, gamma)
        else:
            d0 = d1 = d2 = d3 = 0.0
        out[k, 0] = f0 - 0.5 * d0
        out[k, 1] = f1 - 0.5 * d1
        out[k, 2] = f2 - 0.5 * d2
        out[k, 3] = f3 - 0.5 * d3
    return fallbacks


class RoeFallbackCounter:
    """Counts faces where the Roe average degenerated during a run."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


def interface_flux(wL, wR, axis, scheme: FluxScheme, gamma=GAMMA_DEFAULT,
                   counter: RoeFallbackCounter | None = None):
    """Numerical interface flux along +axis between minus-side and plus-side
    states (unit axis-aligned normal)."""
    wL = np.asarray(wL, dtype=float)
    wR = np.asarray(wR, dtype=float)
    if not (np.all(is_admissible(wL, gamma)) and np.all(is_admissible(wR, gamma))):
        raise InadmissibleStateError("interface flux on inadmissible state")
    shape = np.broadcast_shapes(wL.shape, wR.shape)
    a = np.ascontiguousarray(np.broadcast_to(wL, shape)).reshape(-1, 4)
    b = np.ascontiguousarray(np.broadcast_to(wR, shape)).reshape(-1, 4)
    out = np.empty_like(a)
    nfall = interface_flux_kernel(a, b, axis, scheme.volume_code,
                                  scheme.dissipation_code, gamma, out)
    if counter is not None:
        counter.count += nfall
    return out.reshape(shape)
