"""Structured Cartesian meshes (1D/2D) with boundary tagging and cell masking.

Elements are uniform per axis; the reference-to-physical map is affine with a
constant diagonal Jacobian, J = prod(h_axis / 2).  Composite (L-shaped)
domains are realized as a bounding box with a mask of solid cells whose
exposed faces behave as walls, which keeps the tensor-product operators valid
on every active element.

Face numbering per element: 0 = x-low, 1 = x-high, 2 = y-low, 3 = y-high.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# --- boundary kinds --------------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Wall:
    """Reflecting wall: mirror the normal velocity."""


@dataclass(frozen=True)
class SupersonicInflow:
    state: tuple  # conserved (rho, m, n, E)


@dataclass(frozen=True)
class SupersonicOutflow:
    """Zeroth-order extrapolation of the interior state."""


@dataclass(frozen=True)
class SubsonicOutflow:
    back_pressure: float


@dataclass(frozen=True)
class DirichletFunction:
    """State prescribed as a function of position and time.

    `fn(x, y, t)` must accept numpy arrays for x, y and return conserved
    states of shape x.shape + (4,).
    """

    fn: Callable

    def __hash__(self):  # group faces by the function object
        return hash(id(self.fn))


BoundaryKind = object

FACE_AXIS = np.array([0, 0, 1, 1])
FACE_SIDE = np.array([0, 1, 0, 1])  # 0 = low end of the axis, 1 = high end


def opposite_face(face: int) -> int:
    return face ^ 1


@dataclass
class CartesianMesh:
    dim: int
    xmin: np.ndarray
    xmax: np.ndarray
    n: np.ndarray                       # elements per axis
    boundary: Callable                  # (axis, side, center) -> BoundaryKind
    active: np.ndarray = None           # bool grid mask; None = all active

    h: np.ndarray = field(init=False)
    n_active: int = field(init=False)
    cell_ids: np.ndarray = field(init=False)   # grid -> active id (-1 masked)
    cells: np.ndarray = field(init=False)      # active id -> grid multi-index

    def __post_init__(self):
        self.xmin = np.asarray(self.xmin, dtype=float).reshape(self.dim)
        self.xmax = np.asarray(self.xmax, dtype=float).reshape(self.dim)
        self.n = np.asarray(self.n, dtype=np.int64).reshape(self.dim)
        if np.any(self.n <= 0):
            raise ValueError("element counts must be positive")
        if np.any(self.xmax <= self.xmin):
            raise ValueError("degenerate domain extents")
        self.h = (self.xmax - self.xmin) / self.n
        shape = tuple(self.n)
        if self.active is None:
            self.active = np.ones(shape, dtype=bool)
        else:
            self.active = np.asarray(self.active, dtype=bool).reshape(shape)
        self.cell_ids = -np.ones(shape, dtype=np.int64)
        idx = np.argwhere(self.active)
        self.cell_ids[tuple(idx.T)] = np.arange(idx.shape[0])
        self.cells = idx
        self.n_active = idx.shape[0]

    @property
    def jacobian(self) -> float:
        return float(np.prod(self.h / 2.0))

    def centers(self) -> np.ndarray:
        """(n_active, dim) physical element centers."""
        return self.xmin + (self.cells + 0.5) * self.h

    def domain_volume(self) -> float:
        return self.n_active * float(np.prod(self.h))

    def face_center(self, cell: np.ndarray, face: int) -> np.ndarray:
        c = self.xmin + (np.asarray(cell) + 0.5) * self.h
        ax, side = FACE_AXIS[face], FACE_SIDE[face]
        c = c.astype(float).copy()
        c[ax] += (0.5 if side else -0.5) * self.h[ax]
        return c

    def neighbor(self, element, face: int):
        """Adjacent (element, face) across `face`, or the BoundaryKind.

        `element` is a grid multi-index (or int in 1D).  Periodic faces wrap;
        faces against masked cells and domain boundaries return their tag.
        """
        cell = np.atleast_1d(np.asarray(element, dtype=np.int64)).copy()
        ax, side = int(FACE_AXIS[face]), int(FACE_SIDE[face])
        step = 1 if side else -1
        nb = cell.copy()
        nb[ax] += step
        if 0 <= nb[ax] < self.n[ax]:
            if self.active[tuple(nb)]:
                return tuple(nb), opposite_face(face)
            return Wall()  # exposed face of a masked solid block
        kind = self.boundary(ax, side, self.face_center(cell, face))
        if isinstance(kind, Periodic):
            nb[ax] %= self.n[ax]
            if not self.active[tuple(nb)]:
                return Wall()
            return tuple(nb), opposite_face(face)
        return kind


def build_mesh(dim: int, xmin, xmax, n, boundary=None,
               active: Optional[np.ndarray] = None) -> CartesianMesh:
    """Construct a mesh; `boundary` defaults to all-periodic.

    `boundary` may be a callable (axis, side, face_center) -> BoundaryKind,
    or a dict keyed by (axis, side) for segment-free domains.
    """
    if boundary is None:
        boundary = lambda ax, side, c: Periodic()  # noqa: E731
    elif isinstance(boundary, dict):
        table = dict(boundary)
        boundary = lambda ax, side, c: table[(ax, side)]  # noqa: E731
    mesh = CartesianMesh(dim=dim, xmin=np.atleast_1d(xmin),
                         xmax=np.atleast_1d(xmax), n=np.atleast_1d(n),
                         boundary=boundary, active=active)
    _check_periodic_pairing(mesh)
    return mesh


def _check_periodic_pairing(mesh: CartesianMesh):
    for ax in range(mesh.dim):
        lo = mesh.boundary(ax, 0, mesh.xmin.copy())
        hi = mesh.boundary(ax, 1, mesh.xmax.copy())
        if isinstance(lo, Periodic) != isinstance(hi, Periodic):
            raise ValueError(f"periodic tags on axis {ax} must come in pairs")


@dataclass
class BoundaryGroup:
    kind: BoundaryKind
    elements: np.ndarray   # active element ids
    faces: np.ndarray      # face index per entry


@dataclass
class FaceSets:
    """Connectivity in active-element ids, precomputed once per mesh."""

    interior: list          # per axis: (minus_ids, plus_ids) arrays
    boundary_groups: list   # BoundaryGroup list, grouped by kind


def build_face_sets(mesh: CartesianMesh) -> FaceSets:
    interior = []
    bgroups: dict = {}

    def add_boundary(kind, eid, face):
        key = kind
        bgroups.setdefault(key, ([], []))
        bgroups[key][0].append(eid)
        bgroups[key][1].append(face)

    for ax in range(mesh.dim):
        minus, plus = [], []
        for eid in range(mesh.n_active):
            cell = mesh.cells[eid]
            face = 2 * ax + 1  # high face of this axis
            nb = mesh.neighbor(cell, face)
            if isinstance(nb, tuple):
                nb_cell, _ = nb
                # with periodic wrap a pair may be visited from both sides
                nid = int(mesh.cell_ids[tuple(np.atleast_1d(nb_cell))])
                if nb_cell[ax] == cell[ax] + 1:
                    minus.append(eid)
                    plus.append(nid)
                elif nb_cell[ax] <= cell[ax]:  # periodic wrap
                    minus.append(eid)
                    plus.append(nid)
            else:
                add_boundary(nb, eid, face)
            lowface = 2 * ax
            nb = mesh.neighbor(cell, lowface)
            if not isinstance(nb, tuple):
                add_boundary(nb, eid, lowface)
        interior.append((np.array(minus, dtype=np.int64),
                         np.array(plus, dtype=np.int64)))

    groups = [BoundaryGroup(kind=k,
                            elements=np.array(v[0], dtype=np.int64),
                            faces=np.array(v[1], dtype=np.int64))
              for k, v in bgroups.items()]
    return FaceSets(interior=interior, boundary_groups=groups)
