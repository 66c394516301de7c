"""Element decompositions of 1-D intervals and 2-D rectangles (affine maps)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Mesh1D:
    element_bounds: np.ndarray  # (n_el + 1,), strictly increasing

    def __post_init__(self):
        bounds = np.asarray(self.element_bounds, dtype=np.float64)
        if bounds.ndim != 1 or bounds.shape[0] < 2:
            raise ParameterError("mesh needs at least one element")
        if not np.all(np.diff(bounds) > 0):
            raise ParameterError("element bounds must be strictly increasing")
        object.__setattr__(self, "element_bounds", bounds)

    @staticmethod
    def uniform(a: float, b: float, n_el: int) -> "Mesh1D":
        if n_el < 1:
            raise ParameterError("n_el must be >= 1")
        return Mesh1D(np.linspace(a, b, n_el + 1))

    @property
    def n_el(self) -> int:
        return self.element_bounds.shape[0] - 1

    @property
    def domain(self):
        return float(self.element_bounds[0]), float(self.element_bounds[-1])

    @property
    def jacobians(self) -> np.ndarray:
        """J_k = (x_{k+1} - x_k)/2 of the affine map to [-1, 1]."""
        return np.diff(self.element_bounds) / 2.0

    def node_coords(self, ref_nodes: np.ndarray) -> np.ndarray:
        """Physical positions of reference nodes, (n_el, len(ref_nodes))."""
        left = self.element_bounds[:-1][:, None]
        return left + (np.asarray(ref_nodes) + 1.0) * self.jacobians[:, None]


@dataclass(frozen=True)
class Mesh2D:
    """Tensor grid of rectangles: the 1-D meshes along each direction."""

    mesh_x: Mesh1D
    mesh_y: Mesh1D

    @staticmethod
    def uniform(x_range, y_range, n_el_x: int, n_el_y: int) -> "Mesh2D":
        return Mesh2D(
            Mesh1D.uniform(x_range[0], x_range[1], n_el_x),
            Mesh1D.uniform(y_range[0], y_range[1], n_el_y),
        )

    @property
    def n_el(self):
        return self.mesh_x.n_el, self.mesh_y.n_el
