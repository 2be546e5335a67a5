"""Semi-discrete right-hand sides: flux-differencing (NSFR) and strong DG.

The NSFR residual per element solves

    (M + K) du/dt = -[volume flux differencing] - [surface numerical flux],

where the volume term is the row-sum of the hybridized skew operator Hadamard
the two-point flux matrix, evaluated sparsity-aware (see kernels), and the
surface term applies the facet quadrature to the interface flux f*.  The
interior-flux half of the surface coupling lives in the facet rows of the
skew operator, so f* enters the explicit sum whole; the linear-flux
equivalence test against the independently assembled strong form pins this
split down.

Boundary conditions enter as ghost states per facet node; interface fluxes
are computed once per mesh face and shared by both sides, which keeps the
scheme exactly conservative.
"""

from __future__ import annotations

import numpy as np

from . import euler, mesh as mesh_mod
from .euler import (GAMMA_DEFAULT, conservative, conservative_from_entropy,
                    entropy_variables, is_admissible, pressure)
from .kernels import flux_differencing
from .mesh import (DirichletFunction, FACE_AXIS, SubsonicOutflow,
                   SupersonicInflow, SupersonicOutflow, Wall, build_face_sets)
from .operators import OperatorSet
from .quadrature import GLL
from .two_point import (LINEAR, FluxScheme, RoeFallbackCounter,
                        interface_flux_kernel)


class PositivityError(RuntimeError):
    """Inadmissible state encountered; carries location and time."""

    def __init__(self, message, time=None, element=None, where=None,
                 stage=None):
        super().__init__(message)
        self.time = time
        self.element = element
        self.where = where
        self.stage = stage


def ghost_state(w_in: np.ndarray, kind, axis: int, sign: float,
                coords: np.ndarray, t: float, gamma=GAMMA_DEFAULT):
    """Exterior state for a boundary face given the interior facet state.

    Walls mirror the normal velocity; supersonic inflow and Dirichlet
    prescribe the state; outflow copies the interior, with the subsonic
    variant pinning the pressure to the configured back pressure.
    """
    if isinstance(kind, Wall):
        g = w_in.copy()
        g[..., 1 + axis] = -g[..., 1 + axis]
        return g
    if isinstance(kind, SupersonicInflow):
        return np.broadcast_to(np.asarray(kind.state, dtype=float),
                               w_in.shape).copy()
    if isinstance(kind, SupersonicOutflow):
        return w_in.copy()
    if isinstance(kind, SubsonicOutflow):
        rho, u, v, p = euler.primitive(w_in, gamma)
        return conservative(rho, u, v, np.full_like(rho, kind.back_pressure),
                            gamma)
    if isinstance(kind, DirichletFunction):
        x = coords[..., 0]
        y = coords[..., 1] if coords.shape[-1] > 1 else np.zeros_like(x)
        return np.asarray(kind.fn(x, y, t), dtype=float)
    raise ValueError(f"no ghost state for boundary kind {kind!r}")


class Discretization:
    """Mesh + operators + flux scheme bound together; immutable after init.

    Solution layout: (n_elements, n_sol, 4) nodal coefficients on the GLL
    solution nodes, elements in active-cell order.
    """

    def __init__(self, mesh, ops: OperatorSet, scheme: FluxScheme,
                 gamma: float = GAMMA_DEFAULT):
        if ops.dim != mesh.dim:
            raise ValueError("operator/mesh dimension mismatch")
        self.mesh = mesh
        self.ops = ops
        self.scheme = scheme
        self.gamma = gamma
        self.roe_fallbacks = RoeFallbackCounter()

        self.scale = np.asarray(2.0 / mesh.h)          # per-axis 2/h
        self.face_scale = self.scale[FACE_AXIS[:2 * mesh.dim]]
        self.face_eval_sol = np.ascontiguousarray(
            np.stack(ops.eval_sol_at_face))            # (nf, n_fn, n_sol)
        self.face_eval_flux = np.ascontiguousarray(
            np.stack(ops.eval_flux_at_face))

        fs = build_face_sets(mesh)
        self.interior = fs.interior
        self.boundary = self._split_boundary(fs)

        self._line_weights = ops.flux_weights
        self._is_collocated = ops.flux_family == GLL

    # -- connectivity -------------------------------------------------------

    def _split_boundary(self, fs):
        """Regroup boundary faces by (kind, face id) with facet-node coords."""
        groups = []
        ops, mesh = self.ops, self.mesh
        for g in fs.boundary_groups:
            for face in np.unique(g.faces):
                sel = g.faces == face
                elems = g.elements[sel]
                ax = int(FACE_AXIS[face])
                side = face & 1
                centers = mesh.xmin + (mesh.cells[elems] + 0.5) * mesh.h
                coords = np.repeat(centers[:, None, :], ops.n_face_nodes,
                                   axis=1)
                coords[:, :, ax] += (0.5 if side else -0.5) * mesh.h[ax]
                if mesh.dim == 2:
                    tax = 1 - ax
                    coords[:, :, tax] += 0.5 * mesh.h[tax] * ops.flux_nodes
                groups.append((g.kind, int(face), elems, coords))
        return groups

    # -- state evaluation ---------------------------------------------------

    def volume_states(self, u: np.ndarray) -> np.ndarray:
        if self._is_collocated:
            return u
        return np.einsum("qs,esc->eqc", self.ops.interp_sol_to_flux, u)

    def facet_states(self, u: np.ndarray, entropy_projected: bool,
                     u_vol: np.ndarray | None = None) -> np.ndarray:
        """States at all facet nodes, (ne, nfaces, n_fn, 4).

        With collocated GLL flux nodes the entropy projection reduces to
        facet interpolation of the conservative variables, so the shortcut is
        exact there; on GL nodes the entropy variables are projected (nodal
        interpolation at full-strength quadrature coincides with the L2
        projection) and mapped back to conservative variables.
        """
        if not entropy_projected or self._is_collocated:
            return np.einsum("fks,esc->efkc", self.face_eval_sol, u)
        if u_vol is None:
            u_vol = self.volume_states(u)
        v = entropy_variables(u_vol, self.gamma)
        vf = np.einsum("fkq,eqc->efkc", self.face_eval_flux, v)
        return conservative_from_entropy(vf, self.gamma)

    def entropy_project_facet(self, u: np.ndarray) -> np.ndarray:
        """Entropy-projected facet states (identity shortcut when collocated)."""
        return self.facet_states(u, entropy_projected=True)

    # -- checks -------------------------------------------------------------

    def _check_states(self, w, t, where):
        adm = is_admissible(w, self.gamma)
        if not np.all(adm):
            per_element = adm.reshape(adm.shape[0], -1).all(axis=1)
            bad = int(np.nonzero(~per_element)[0][0])
            raise PositivityError(
                f"inadmissible state in {where} of element {bad} at t={t}",
                time=t, element=bad, where=where)

    # -- surface fluxes -----------------------------------------------------

    def _surface_fluxes(self, facet: np.ndarray, t: float) -> np.ndarray:
        """Interface flux f* per element-face, oriented along +axis.

        Interior faces evaluate once and share the value; boundary faces use
        ghost states from the tagged condition.
        """
        ops = self.ops
        ne = facet.shape[0]
        fstar = np.zeros_like(facet)
        code = self.scheme.volume_code
        diss = self.scheme.dissipation_code

        def run(wm, wp, axis):
            n = wm.shape[0] * wm.shape[1] if wm.ndim == 3 else wm.shape[0]
            a = np.ascontiguousarray(wm.reshape(-1, 4))
            b = np.ascontiguousarray(wp.reshape(-1, 4))
            out = np.empty_like(a)
            self.roe_fallbacks.count += interface_flux_kernel(
                a, b, axis, code, diss, self.gamma, out)
            return out.reshape(wm.shape)

        for ax in range(self.mesh.dim):
            minus, plus = self.interior[ax]
            if minus.size:
                wm = facet[minus, 2 * ax + 1]
                wp = facet[plus, 2 * ax]
                flux = run(wm, wp, ax)
                fstar[minus, 2 * ax + 1] = flux
                fstar[plus, 2 * ax] = flux

        for kind, face, elems, coords in self.boundary:
            if elems.size == 0:
                continue
            ax = int(FACE_AXIS[face])
            side = face & 1
            w_in = facet[elems, face]
            sign = 1.0 if side else -1.0
            ghost = ghost_state(w_in, kind, ax, sign, coords, t, self.gamma)
            if not np.all(is_admissible(ghost, self.gamma)):
                raise PositivityError("inadmissible ghost state", time=t,
                                      element=int(elems[0]), where="boundary")
            if side:
                fstar[elems, face] = run(w_in, ghost, ax)
            else:
                fstar[elems, face] = run(ghost, w_in, ax)
        return fstar

    # -- residuals ----------------------------------------------------------

    def nsfr_rhs(self, u: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Flux-differencing right-hand side du/dt (filtered mass matrix)."""
        ops = self.ops
        code = self.scheme.volume_code
        check = code != LINEAR

        u_vol = self.volume_states(u)
        if check:
            self._check_states(u_vol, t, "volume nodes")
        # the linear surrogate exercises the operator algebra only; entropy
        # projection needs physically meaningful states
        facet = self.facet_states(u, entropy_projected=check, u_vol=u_vol)
        if check:
            self._check_states(facet, t, "entropy-projected facet states"
                               if not self._is_collocated else "facet states")

        out_vol = np.empty_like(u_vol)
        out_facet = np.empty_like(facet)
        flux_differencing(u_vol, facet, ops.vv_i, ops.vv_j, ops.vv_coef,
                          ops.vf_i, ops.vf_s, ops.vf_coef,
                          self._line_weights, ops.p + 1, ops.dim, code,
                          self.gamma, self.scale, out_vol, out_facet)

        fstar = self._surface_fluxes(facet, t)
        face_term = out_facet
        w = ops.face_weights[None, None, :, None]
        sgn = (ops.face_sign * self.face_scale)[None, :, None, None]
        face_term = face_term + sgn * w * fstar

        res = np.einsum("qs,eqc->esc", ops.interp_sol_to_flux, out_vol)
        res += np.einsum("fks,efkc->esc", self.face_eval_sol, face_term)
        return -np.einsum("st,etc->esc", ops.mass_plus_k_inv, res)

    def strong_dg_rhs(self, u: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Strong-form DG right-hand side (projected nodal flux, numerical
        minus interior flux on the surface); the SSPRK3 baseline."""
        ops = self.ops
        code = self.scheme.volume_code
        check = code != LINEAR

        u_vol = self.volume_states(u)
        if check:
            self._check_states(u_vol, t, "volume nodes")
        facet = self.facet_states(u, entropy_projected=False)
        if check:
            self._check_states(facet, t, "facet states")
        fstar = self._surface_fluxes(facet, t)

        res = np.zeros_like(u)
        for ax in range(self.mesh.dim):
            if code == LINEAR:
                f_vol = u_vol.copy()
            else:
                f_vol = euler._physical_flux_unchecked(u_vol, ax, self.gamma)
            f_hat = np.einsum("sq,eqc->esc", ops.projection, f_vol)
            res += self.scale[ax] * np.einsum("st,etc->esc",
                                              ops.stiffness[ax], f_hat)
            for face in (2 * ax, 2 * ax + 1):
                f_face = np.einsum("ks,esc->ekc", self.face_eval_sol[face],
                                   f_hat)
                corr = fstar[:, face] - f_face
                term = (self.scale[ax] * ops.face_sign[face]
                        * ops.face_weights[None, :, None] * corr)
                res += np.einsum("ks,ekc->esc", self.face_eval_sol[face],
                                 term)
        return -np.einsum("st,etc->esc", ops.mass_inv, res)

    # -- monitors -----------------------------------------------------------

    def cell_volume(self) -> float:
        return float(np.prod(self.mesh.h))

    def conserved_integrals(self, u: np.ndarray) -> np.ndarray:
        u_vol = self.volume_states(u)
        return self.mesh.jacobian * np.einsum(
            "q,eqc->c", self.ops.vol_weights, u_vol)

    def entropy_total(self, u: np.ndarray) -> float:
        """Quadrature approximation of the integral of U = -rho s/(gamma-1)."""
        u_vol = self.volume_states(u)
        if not np.all(is_admissible(u_vol, self.gamma)):
            raise PositivityError("inadmissible state in entropy monitor")
        s = euler.entropy_function(u_vol, self.gamma)
        return float(self.mesh.jacobian * np.einsum(
            "q,eq->", self.ops.vol_weights, s))

    def max_wavespeed(self, u: np.ndarray) -> float:
        return float(np.max(euler.max_wavespeed(u, self.gamma)))

    def cell_averages(self, u: np.ndarray) -> np.ndarray:
        """Plain quadrature cell averages (exact for the degree-p solution)."""
        return np.einsum("s,esc->ec", self.ops.sol_avg_weights, u)
