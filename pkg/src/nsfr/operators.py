"""Reference-element operators for the flux-reconstruction discretization.

Everything here lives on the reference element [-1,1]^d and is built once per
(degree, correction parameter, flux-node family, dimension) combination:

* mass / stiffness matrices and the L2 projection (quadrature at the flux
  nodes, which makes the GLL mass matrix diagonal and the GL one exact);
* the correction matrix K that carries the whole influence of the FR
  correction functions, K = sum_s c_s (D^s)^T M (D^s) over the corner
  multi-indices s of the degree-p broken Sobolev space;
* the hybridized skew-symmetric stiffness operator over the combined
  volume + facet node set,

      Q_skew = [[Q - Q^T, E^T B], [-B E, 0]],

  with Q = W D the volume stiffness, E the volume-to-facet extrapolation and
  B the signed facet weights.  Q + Q^T = E^T B E holds because both node
  families integrate degree 2p-1 exactly, which is what makes the
  flux-differencing form collapse to the strong form for symmetric
  mean-value fluxes;
* facet evaluation operators and the mixed-quadrature interpolations used by
  the positivity limiter.

Physical scaling is deliberately excluded: on the Cartesian meshes used here
the metric is a constant diagonal per element and is applied at use sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .quadrature import (GL, GLL, NodeFamily, differentiation_matrix,
                         gauss_legendre, lagrange_eval, make_nodes)

# Correction-parameter presets.  The degree-3 values are the contract for
# the named schemes (DG / spectral difference / Huynh g2 / stability limit):
_PRESETS_P3 = {
    "c_DG": 0.0,
    "c_SD": 7.44e-6,
    "c_HU": 1.32e-5,
    "c_+": 2.87e-5,
    "c_+x10": 2.87e-4,
}

# Energy-stability limits c_+ tabulated in the ESFR literature (von Neumann
# analysis), in the classical normalization; converted below.
_C_PLUS_CLASSICAL = {2: 0.186, 3: 3.67e-3, 4: 4.79e-5, 5: 4.24e-7}


def _a_p(p: int) -> float:
    return math.factorial(2 * p) / (2**p * math.factorial(p) ** 2)


def correction_parameter(p: int, c) -> float:
    """Resolve a correction parameter: preset name or raw value.

    Named presets follow the classical closed forms for c_SD and c_HU,
    rescaled by 2^-(2p+1) to match this code's normalization of the
    correction matrix (K = c (D^p)^T M D^p on [-1,1]); c_+ comes from the
    tabulated stability limits.  c_DG = 0 recovers plain DG at any degree.
    For p = 3 the named values are pinned to the standard rounded constants.
    """
    if not isinstance(c, str):
        val = float(c)
        if val < 0.0:
            raise ValueError("correction parameter must be >= 0")
        return val
    if c == "c_DG":
        return 0.0
    if p == 3 and c in _PRESETS_P3:
        return _PRESETS_P3[c]
    app2 = (_a_p(p) * math.factorial(p)) ** 2
    scale = 2.0 ** (2 * p + 1)
    if c == "c_SD":
        return 2.0 * p / ((2 * p + 1) * (p + 1) * app2) / scale
    if c == "c_HU":
        return 2.0 * (p + 1) / ((2 * p + 1) * p * app2) / scale
    if c in ("c_+", "c_+x10"):
        if p not in _C_PLUS_CLASSICAL:
            raise ValueError(f"no tabulated c_+ for degree {p}; pass a value")
        base = _C_PLUS_CLASSICAL[p] / scale
        return base * (10.0 if c == "c_+x10" else 1.0)
    raise ValueError(f"unknown correction parameter {c!r}")


def correction_parameter_table(degrees=(2, 3, 4, 5)) -> dict:
    """Preset table per degree (generated; see correction_parameter)."""
    table = {}
    for p in degrees:
        row = {}
        for name in ("c_DG", "c_SD", "c_HU", "c_+", "c_+x10"):
            try:
                row[name] = correction_parameter(p, name)
            except ValueError:
                row[name] = None
        table[p] = row
    return table


def build_correction_matrix(p: int, c: float, m_ref: np.ndarray,
                            d_axes: list[np.ndarray]) -> np.ndarray:
    """K = sum over corner multi-indices s in {0,p}^d with |s| >= p of
    c^(|s|/p) (D^s)^T M (D^s); the 1D case reduces to c (D^p)^T M D^p."""
    if c < 0.0:
        raise ValueError("correction parameter must be >= 0")
    n = m_ref.shape[0]
    k = np.zeros((n, n))
    if c == 0.0:
        return k
    dim = len(d_axes)
    dp = [np.linalg.matrix_power(d, p) for d in d_axes]
    if dim == 1:
        k += c * dp[0].T @ m_ref @ dp[0]
    else:
        for s in (( p, 0), (0, p), (p, p)):
            coef = c ** (sum(s) / p)
            op = np.eye(n)
            for ax, power in enumerate(s):
                if power:
                    op = dp[ax] @ op
            k += coef * op.T @ m_ref @ op
    return k


def build_hybridized_skew(flux_nodes: np.ndarray,
                          flux_weights: np.ndarray) -> np.ndarray:
    """1D combined (volume + 2 facet) skew operator [[Q-Q^T, E^T B], [-BE, 0]]."""
    nq = flux_nodes.size
    d = differentiation_matrix(flux_nodes)
    q = np.diag(flux_weights) @ d
    e = lagrange_eval(flux_nodes, np.array([-1.0, 1.0]))
    b = np.diag([-1.0, 1.0])
    top = np.hstack([q - q.T, e.T @ b])
    bot = np.hstack([-b @ e, np.zeros((2, 2))])
    return np.vstack([top, bot])


def _pairs_from_skew(qskew: np.ndarray, nq: int):
    """Structurally nonzero upper-triangle entries, split into
    volume-volume and volume-facet pairs."""
    tol = 1e-14 * max(1.0, np.abs(qskew).max())
    vv_i, vv_j, vv_c = [], [], []
    for i in range(nq):
        for j in range(i + 1, nq):
            if abs(qskew[i, j]) > tol:
                vv_i.append(i)
                vv_j.append(j)
                vv_c.append(qskew[i, j])
    vf_i, vf_s, vf_c = [], [], []
    for i in range(nq):
        for s in range(2):
            if abs(qskew[i, nq + s]) > tol:
                vf_i.append(i)
                vf_s.append(s)
                vf_c.append(qskew[i, nq + s])
    return (np.array(vv_i, dtype=np.int64), np.array(vv_j, dtype=np.int64),
            np.array(vv_c), np.array(vf_i, dtype=np.int64),
            np.array(vf_s, dtype=np.int64), np.array(vf_c))


def _kron1(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a)


@dataclass(frozen=True)
class OperatorSet:
    """Precomputed reference operators shared read-only by all elements."""

    p: int
    dim: int
    c: float
    flux_family: str

    sol_nodes: np.ndarray
    sol_weights: np.ndarray
    flux_nodes: np.ndarray
    flux_weights: np.ndarray

    n_sol: int
    n_vol: int
    n_face_nodes: int

    vol_weights: np.ndarray        # tensor weights at volume flux nodes
    interp_sol_to_flux: np.ndarray  # (n_vol, n_sol); identity when collocated
    mass: np.ndarray               # reference mass matrix
    mass_plus_k: np.ndarray
    mass_inv: np.ndarray
    mass_plus_k_inv: np.ndarray
    correction: np.ndarray
    projection: np.ndarray         # volume-node values -> nodal coefficients
    stiffness: tuple               # per-axis S matrices (strong form)

    face_axis: np.ndarray          # (nfaces,) owning axis per face
    face_sign: np.ndarray          # (nfaces,) outward normal sign
    face_weights: np.ndarray       # (n_face_nodes,) facet quadrature weights
    eval_sol_at_face: tuple        # per face, (n_fn, n_sol)
    eval_flux_at_face: tuple       # per face, (n_fn, n_vol)

    qskew_1d: np.ndarray
    vv_i: np.ndarray
    vv_j: np.ndarray
    vv_coef: np.ndarray
    vf_i: np.ndarray
    vf_s: np.ndarray
    vf_coef: np.ndarray

    # positivity-limiter node sets (interpolations from solution nodes)
    limiter_interp: tuple          # set 1 (and set 2 in 2D)
    limiter_avg_weights: tuple     # matching tensor weight vectors / 2^d
    sol_avg_weights: np.ndarray    # solution-node average weights / 2^d

    err_interp: np.ndarray         # over-integration interpolation
    err_weights: np.ndarray

    @property
    def n_faces(self) -> int:
        return 2 * self.dim

    def collocated(self) -> bool:
        return self.flux_family == GLL


def project_to_modal(ops: OperatorSet, values: np.ndarray) -> np.ndarray:
    """L2-project values given at the volume flux nodes onto the solution
    space; exact round trip for polynomials of degree <= p."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != ops.n_vol and values.shape[0] == ops.n_vol:
        return ops.projection @ values
    return np.einsum("ij,...j->...i", ops.projection, values)


@lru_cache(maxsize=None)
def build_operator_set(p: int, dim: int, c: float,
                       flux_family: str = GLL) -> OperatorSet:
    if dim not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    if p < 1:
        raise ValueError("operators require p >= 1")
    sol_nodes, sol_w = make_nodes(NodeFamily(GLL, p))
    flux_nodes, flux_w = make_nodes(NodeFamily(flux_family, p))
    n1 = p + 1

    a1 = lagrange_eval(sol_nodes, flux_nodes)      # 1D solution -> flux nodes
    if flux_family == GLL:
        a1 = np.eye(n1)
    d_sol = differentiation_matrix(sol_nodes)
    m1 = a1.T @ np.diag(flux_w) @ a1               # 1D mass
    s1 = a1.T @ np.diag(flux_w) @ (a1 @ d_sol)     # 1D stiffness

    e_lo = lagrange_eval(sol_nodes, np.array([-1.0]))
    e_hi = lagrange_eval(sol_nodes, np.array([1.0]))
    eq_lo = lagrange_eval(flux_nodes, np.array([-1.0]))
    eq_hi = lagrange_eval(flux_nodes, np.array([1.0]))

    if dim == 1:
        interp = a1
        vol_w = flux_w.copy()
        mass = m1
        stiff = (s1,)
        d_axes = [d_sol]
        faces_sol = (e_lo, e_hi)
        faces_flux = (eq_lo, eq_hi)
        face_axis = np.array([0, 0], dtype=np.int64)
        face_sign = np.array([-1.0, 1.0])
        face_w = np.array([1.0])
        n_fn = 1
        sol_avg_w = sol_w / 2.0
    else:
        eye = np.eye(n1)
        interp = np.kron(a1, a1)
        vol_w = np.kron(flux_w, flux_w)
        mass = np.kron(m1, m1)
        stiff = (np.kron(s1, m1), np.kron(m1, s1))
        d_axes = [np.kron(d_sol, eye), np.kron(eye, d_sol)]
        # faces: 0 x-lo, 1 x-hi, 2 y-lo, 3 y-hi; facet nodes follow the
        # tangential flux nodes in ascending order
        faces_sol = (np.kron(e_lo, a1), np.kron(e_hi, a1),
                     np.kron(a1, e_lo), np.kron(a1, e_hi))
        eyeq = np.eye(n1)
        faces_flux = (np.kron(eq_lo, eyeq), np.kron(eq_hi, eyeq),
                      np.kron(eyeq, eq_lo), np.kron(eyeq, eq_hi))
        face_axis = np.array([0, 0, 1, 1], dtype=np.int64)
        face_sign = np.array([-1.0, 1.0, -1.0, 1.0])
        face_w = flux_w.copy()
        n_fn = n1
        sol_avg_w = np.kron(sol_w, sol_w) / 4.0

    k_ref = build_correction_matrix(p, c, mass, d_axes)
    mass_plus_k = mass + k_ref
    proj = np.linalg.solve(mass, interp.T @ np.diag(vol_w))

    qskew = build_hybridized_skew(flux_nodes, flux_w)
    vv_i, vv_j, vv_c, vf_i, vf_s, vf_c = _pairs_from_skew(qskew, n1)

    # limiter node sets: set 1 = GLL (x) x GL (y), set 2 = GL (x) x GLL (y);
    # in 1D a single GL set complements the GLL solution nodes
    gl_nodes, gl_w = gauss_legendre(n1)
    a_gl = lagrange_eval(sol_nodes, gl_nodes)
    if dim == 1:
        lim_interp = (a_gl,)
        lim_avg_w = (gl_w / 2.0,)
    else:
        eye = np.eye(n1)
        lim_interp = (np.kron(eye, a_gl), np.kron(a_gl, eye))
        lim_avg_w = (np.kron(sol_w, gl_w) / 4.0, np.kron(gl_w, sol_w) / 4.0)

    # over-integration rule for error norms (degree >= 2p+2 exactness)
    err_nodes, err_w1 = gauss_legendre(p + 3)
    a_err1 = lagrange_eval(sol_nodes, err_nodes)
    if dim == 1:
        a_err = a_err1
        err_w = err_w1.copy()
    else:
        a_err = np.kron(a_err1, a_err1)
        err_w = np.kron(err_w1, err_w1)

    return OperatorSet(
        p=p, dim=dim, c=c, flux_family=flux_family,
        sol_nodes=sol_nodes, sol_weights=sol_w,
        flux_nodes=flux_nodes, flux_weights=flux_w,
        n_sol=n1**dim, n_vol=n1**dim, n_face_nodes=n_fn,
        vol_weights=vol_w,
        interp_sol_to_flux=_kron1(interp),
        mass=mass, mass_plus_k=mass_plus_k,
        mass_inv=np.linalg.inv(mass),
        mass_plus_k_inv=np.linalg.inv(mass_plus_k),
        correction=k_ref, projection=proj, stiffness=stiff,
        face_axis=face_axis, face_sign=face_sign, face_weights=face_w,
        eval_sol_at_face=tuple(_kron1(x) for x in faces_sol),
        eval_flux_at_face=tuple(_kron1(x) for x in faces_flux),
        qskew_1d=qskew,
        vv_i=vv_i, vv_j=vv_j, vv_coef=vv_c,
        vf_i=vf_i, vf_s=vf_s, vf_coef=vf_c,
        limiter_interp=lim_interp, limiter_avg_weights=lim_avg_w,
        sol_avg_weights=sol_avg_w,
        err_interp=_kron1(a_err), err_weights=err_w,
    )
