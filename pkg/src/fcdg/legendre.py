"""Modal Legendre reference basis on Legendre-Gauss-Lobatto nodes.

Used as the comparison discretization: diagonal mass, closed-form stiffness,
and L2 projection of initial data via LGL quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .operators import ElementOperators


@dataclass(frozen=True)
class LegendreBasis:
    degree: int
    lgl_nodes: np.ndarray
    lgl_weights: np.ndarray


def legendre_vandermonde(q: int, points: np.ndarray) -> np.ndarray:
    """P_j(points) for j = 0..q via the three-term recurrence, (npts, q+1)."""
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    v = np.empty((pts.shape[0], q + 1))
    v[:, 0] = 1.0
    if q >= 1:
        v[:, 1] = pts
    for k in range(1, q):
        v[:, k + 1] = ((2 * k + 1) * pts * v[:, k] - k * v[:, k - 1]) / (k + 1)
    return v


def lgl_nodes_weights(q: int):
    """LGL nodes (+-1 and roots of P_q') and quadrature weights, degree 2q-1.

    Newton iteration on x P_q - P_{q-1} (proportional to (1-x^2) P_q') with
    Chebyshev-Gauss-Lobatto starting values.
    """
    if q < 1:
        raise ParameterError(f"polynomial degree must be >= 1, got {q}")
    n = q + 1
    x = np.cos(np.pi * np.arange(n) / q)
    x_prev = 2.0 * np.ones(n)
    v = np.empty((n, n))
    while np.max(np.abs(x - x_prev)) > 1e-15:
        v[:, 0] = 1.0
        v[:, 1] = x
        for k in range(1, q):
            v[:, k + 1] = ((2 * k + 1) * x * v[:, k] - k * v[:, k - 1]) / (k + 1)
        x_prev = x.copy()
        x = x_prev - (x * v[:, q] - v[:, q - 1]) / (n * v[:, q])
    v[:, 0] = 1.0
    if q >= 1:
        v[:, 1] = x
    for k in range(1, q):
        v[:, k + 1] = ((2 * k + 1) * x * v[:, k] - k * v[:, k - 1]) / (k + 1)
    w = 2.0 / (q * n * v[:, q] ** 2)
    order = np.argsort(x)
    return x[order], w[order]


def legendre_basis(q: int) -> LegendreBasis:
    nodes, weights = lgl_nodes_weights(q)
    return LegendreBasis(degree=q, lgl_nodes=nodes, lgl_weights=weights)


def legendre_operators(q: int) -> ElementOperators:
    """Exact modal operators: diagonal mass, closed-form stiffness, unit lifts."""
    if q < 1:
        raise ParameterError(f"polynomial degree must be >= 1, got {q}")
    n = q + 1
    j = np.arange(n)
    mass = np.diag(2.0 / (2 * j + 1))
    stiff = np.zeros((n, n))
    for i in range(n):
        for jj in range(i):
            if (i + jj) % 2 == 1:
                stiff[i, jj] = 2.0
    lift_left = (-1.0) ** j
    lift_right = np.ones(n)
    inv_mass_stiffness = stiff * ((2 * j + 1) / 2.0)[:, None]
    return ElementOperators(
        mass=mass,
        stiffness=stiff,
        lift_left=lift_left,
        lift_right=lift_right,
        inv_mass_stiffness=inv_mass_stiffness,
        basis_id=f"legendre:q{q}",
    )


def l2_project(f, q: int) -> np.ndarray:
    """Modal coefficients of the element-wise L2 projection of f.

    Both the (diagonal) mass and the moment integrals use LGL quadrature, so
    projecting a function already in the space returns its coefficients
    exactly and the operation is idempotent.
    """
    basis = legendre_basis(q)
    fx = f(basis.lgl_nodes) if callable(f) else np.asarray(f, dtype=np.float64)
    if fx.shape != basis.lgl_nodes.shape:
        raise ParameterError("sample vector must match the LGL node count")
    v = legendre_vandermonde(q, basis.lgl_nodes)
    wv = basis.lgl_weights[:, None] * v
    gamma = np.sum(wv * v, axis=0)  # discrete ||P_j||^2
    return (wv.T @ fx) / gamma
