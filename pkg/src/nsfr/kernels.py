"""Numba kernels for the hot paths of the semi-discrete residual.

The flux-differencing contraction only visits index pairs where the
hybridized skew operator is structurally nonzero: within each coordinate
line, all volume-volume pairs of the 1D operator plus the volume-facet
couplings, each line scaled by its tangential quadrature weight.  This is the
standard sparsity-aware Hadamard evaluation; it is algebraically identical to
the dense contraction (see tests) at O(N_p * (p+1)) flux calls per direction.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .two_point import two_point_flux_scalar


@njit(cache=True, parallel=True)
def flux_differencing(u_vol, u_facet, vv_i, vv_j, vv_coef, vf_i, vf_s,
                      vf_coef, line_weights, n1, dim, code, gamma, scale,
                      out_vol, out_facet):
    """Accumulate the volume flux-differencing residual rows.

    u_vol:   (ne, n_vol, 4) states at volume flux nodes
    u_facet: (ne, nfaces, n_fn, 4) states at facet nodes
    scale:   per-axis physical factor (2 / h_axis)
    out_vol / out_facet are written (not accumulated into).
    """
    ne = u_vol.shape[0]
    n_vv = vv_i.size
    n_vf = vf_i.size
    nlines = n1 if dim == 2 else 1
    for e in prange(ne):
        for i in range(out_vol.shape[1]):
            for c in range(4):
                out_vol[e, i, c] = 0.0
        for f in range(out_facet.shape[1]):
            for k in range(out_facet.shape[2]):
                for c in range(4):
                    out_facet[e, f, k, c] = 0.0
        for ax in range(dim):
            if ax == 0:
                stride_i = n1 if dim == 2 else 1
                stride_line = 1
            else:
                stride_i = 1
                stride_line = n1
            face_lo = 2 * ax
            face_hi = 2 * ax + 1
            for line in range(nlines):
                wl = scale[ax] * (line_weights[line] if dim == 2 else 1.0)
                base = line * stride_line if dim == 2 else 0
                for k in range(n_vv):
                    i = base + vv_i[k] * stride_i
                    j = base + vv_j[k] * stride_i
                    f0, f1, f2, f3 = two_point_flux_scalar(
                        u_vol[e, i, 0], u_vol[e, i, 1],
                        u_vol[e, i, 2], u_vol[e, i, 3],
                        u_vol[e, j, 0], u_vol[e, j, 1],
                        u_vol[e, j, 2], u_vol[e, j, 3], ax, code, gamma)
                    cf = vv_coef[k] * wl
                    out_vol[e, i, 0] += cf * f0
                    out_vol[e, i, 1] += cf * f1
                    out_vol[e, i, 2] += cf * f2
                    out_vol[e, i, 3] += cf * f3
                    out_vol[e, j, 0] -= cf * f0
                    out_vol[e, j, 1] -= cf * f1
                    out_vol[e, j, 2] -= cf * f2
                    out_vol[e, j, 3] -= cf * f3
                for k in range(n_vf):
                    i = base + vf_i[k] * stride_i
                    face = face_lo if vf_s[k] == 0 else face_hi
                    f0, f1, f2, f3 = two_point_flux_scalar(
                        u_vol[e, i, 0], u_vol[e, i, 1],
                        u_vol[e, i, 2], u_vol[e, i, 3],
                        u_facet[e, face, line, 0], u_facet[e, face, line, 1],
                        u_facet[e, face, line, 2], u_facet[e, face, line, 3],
                        ax, code, gamma)
                    cf = vf_coef[k] * wl
                    out_vol[e, i, 0] += cf * f0
                    out_vol[e, i, 1] += cf * f1
                    out_vol[e, i, 2] += cf * f2
                    out_vol[e, i, 3] += cf * f3
                    out_facet[e, face, line, 0] -= cf * f0
                    out_facet[e, face, line, 1] -= cf * f1
                    out_facet[e, face, line, 2] -= cf * f2
                    out_facet[e, face, line, 3] -= cf * f3
