"""Field utilities: node coordinates, initialization, norms, extraction."""

from __future__ import annotations

import numpy as np

from .cases import TestCase
from .mesh import CartesianMesh
from .operators import OperatorSet
from .quadrature import lagrange_eval


def node_coordinates(mesh: CartesianMesh, ops: OperatorSet) -> np.ndarray:
    """Physical coordinates of the solution nodes, (ne, n_sol, dim)."""
    return _coords_at(mesh, ops.sol_nodes, ops.dim)


def _coords_at(mesh, nodes_1d, dim):
    centers = mesh.centers()
    n1 = nodes_1d.size
    if dim == 1:
        x = centers[:, 0:1] + 0.5 * mesh.h[0] * nodes_1d[None, :]
        return x[:, :, None]
    gx = centers[:, 0:1] + 0.5 * mesh.h[0] * nodes_1d[None, :]
    gy = centers[:, 1:2] + 0.5 * mesh.h[1] * nodes_1d[None, :]
    out = np.empty((centers.shape[0], n1 * n1, 2))
    out[:, :, 0] = np.repeat(gx, n1, axis=1)
    out[:, :, 1] = np.tile(gy, (1, n1))
    return out


def initialize_field(mesh: CartesianMesh, ops: OperatorSet,
                     case: TestCase) -> np.ndarray:
    """Nodal interpolation of the case's initial condition."""
    xy = node_coordinates(mesh, ops)
    if mesh.dim == 1:
        return case.initial(xy[:, :, 0])
    return case.initial(xy[:, :, 0], xy[:, :, 1])


def eval_exact(mesh: CartesianMesh, coords: np.ndarray, case: TestCase,
               t: float) -> np.ndarray:
    if case.exact is None:
        raise ValueError(f"case {case.name} has no exact solution")
    if mesh.dim == 1:
        return case.exact(coords[:, :, 0], t)
    return case.exact(coords[:, :, 0], coords[:, :, 1], t)


def density_error_norms(mesh: CartesianMesh, ops: OperatorSet, u: np.ndarray,
                        case: TestCase, t: float):
    """(L1, L2) density error against the exact solution, via a quadrature
    of exactness degree >= 2p+2, normalized by the domain volume."""
    from numpy.polynomial.legendre import leggauss
    err_nodes, _ = leggauss(ops.p + 3)
    coords = _coords_at(mesh, err_nodes, mesh.dim)
    u_fine = np.einsum("qs,esc->eqc", ops.err_interp, u)
    exact = eval_exact(mesh, coords, case, t)
    diff = np.abs(u_fine[..., 0] - exact[..., 0])
    w = ops.err_weights * mesh.jacobian
    vol = mesh.domain_volume()
    l1 = float(np.einsum("q,eq->", w, diff)) / vol
    l2 = float(np.sqrt(np.einsum("q,eq->", w, diff**2) / vol))
    return l1, l2


def extract_line(mesh: CartesianMesh, ops: OperatorSet, u: np.ndarray,
                 axis: int, value: float):
    """Sample the discontinuous solution along an axis-aligned line.

    `axis` is the axis held constant (1 extracts along y = value).  Returns
    (positions, states) with one sample per solution node of every element
    the line crosses; on element boundaries the cell on the high side owns
    the line.  1D extraction returns all nodes.
    """
    if mesh.dim == 1:
        coords = node_coordinates(mesh, ops)[:, :, 0].ravel()
        states = u.reshape(-1, 4)
        order = np.argsort(coords, kind="stable")
        return coords[order], states[order]

    n1 = ops.p + 1
    cell_idx = int(np.clip((value - mesh.xmin[axis]) // mesh.h[axis], 0,
                           mesh.n[axis] - 1))
    local = 2.0 * (value - mesh.xmin[axis]) / mesh.h[axis] \
        - (2 * cell_idx + 1)
    basis = lagrange_eval(ops.sol_nodes, np.array([local]))[0]

    sel = mesh.cells[:, axis] == cell_idx
    elems = np.nonzero(sel)[0]
    ue = u[elems].reshape(elems.size, n1, n1, 4)
    if axis == 1:
        vals = np.einsum("j,eijc->eic", basis, ue)
    else:
        vals = np.einsum("i,eijc->ejc", basis, ue)

    other = 1 - axis
    centers = mesh.centers()[elems, other]
    pos = centers[:, None] + 0.5 * mesh.h[other] * ops.sol_nodes[None, :]
    pos = pos.ravel()
    states = vals.reshape(-1, 4)
    order = np.argsort(pos, kind="stable")
    return pos[order], states[order]
