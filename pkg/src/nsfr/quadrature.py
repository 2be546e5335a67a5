"""Quadrature rules and nodal (Lagrange) basis machinery on [-1, 1].

Two node families are supported: Gauss-Legendre-Lobatto (GLL, includes the
interval endpoints, exact for polynomials up to degree 2p-1) and
Gauss-Legendre (GL, interior nodes only, exact up to degree 2p+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg

GLL = "GLL"
GL = "GL"


@dataclass(frozen=True)
class NodeFamily:
    """Quadrature family selector for the flux basis nodes."""

    kind: str  # "GLL" or "GL"
    p: int

    def __post_init__(self):
        if self.kind not in (GLL, GL):
            raise ValueError(f"unknown node family {self.kind!r}")
        if self.p < 1:
            raise ValueError("node family requires polynomial degree p >= 1")


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [-1, 1] (exact to degree 2n-1)."""
    if n < 1:
        raise ValueError("need at least one quadrature point")
    return npleg.leggauss(n)


def gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Lobatto-Legendre rule on [-1, 1] (exact to degree 2n-3).

    Nodes are the roots of (1 - x^2) P'_{n-1}(x); the weights are
    2 / (n (n-1) P_{n-1}(x)^2).
    """
    if n < 2:
        raise ValueError("Lobatto rule requires at least two points")
    # coefficient vector of P_{n-1} in the Legendre basis
    cn = np.zeros(n)
    cn[-1] = 1.0
    interior = npleg.legroots(npleg.legder(cn))
    nodes = np.concatenate([[-1.0], np.sort(interior), [1.0]])
    pn = npleg.legval(nodes, cn)
    weights = 2.0 / (n * (n - 1) * pn**2)
    # symmetrize against rootfinder roundoff
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def make_nodes(family: NodeFamily) -> tuple[np.ndarray, np.ndarray]:
    """p+1 nodes and weights for the requested family.

    Weights are positive and sum to 2; nodes are ascending in [-1, 1] and
    symmetric about 0.  Degree 0 is rejected: the limiter and the FR
    correction assume p >= 1 (the finite-volume reference runs use a
    dedicated one-node path, see :mod:`nsfr.reference`).
    """
    n = family.p + 1
    if family.kind == GLL:
        return gauss_lobatto(n)
    return gauss_legendre(n)


def lagrange_eval(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the Lagrange cardinal basis of `nodes` at points `x`.

    Returns V with V[i, j] = ell_j(x[i]), built via the barycentric form so
    that evaluation exactly at a node reproduces the Kronecker delta.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = nodes.size
    # barycentric weights
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / diff.prod(axis=1)

    v = np.empty((x.size, n))
    for i, xi in enumerate(x):
        d = xi - nodes
        hit = np.nonzero(d == 0.0)[0]
        if hit.size:
            row = np.zeros(n)
            row[hit[0]] = 1.0
        else:
            t = bw / d
            row = t / t.sum()
        v[i] = row
    return v


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """Nodal differentiation matrix D with (D u)_i = p'(x_i) for the
    interpolant p of the nodal values u."""
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / diff.prod(axis=1)

    d = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = (bw[j] / bw[i]) / (nodes[i] - nodes[j])
        d[i, i] = 0.0
        d[i, i] = -d[i].sum()  # rows annihilate constants
    return d
