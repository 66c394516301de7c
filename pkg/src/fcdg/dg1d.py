"""1-D DG solver for the scalar transport equation u_t + a u_x = 0 with
periodic boundaries and pluggable basis (FC nodal or Legendre modal).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .fc_basis import FcParams, uniform_grid
from .legendre import l2_project, legendre_basis, legendre_vandermonde, lgl_nodes_weights
from .mesh import Mesh1D
from .operators import ElementOperators, QuadConfig, get_fc_operators
from .legendre import legendre_operators
from .timestepping import TaylorScheme, rk4_step, taylor_step, timestep_from_cfl


class FluxKind(enum.Enum):
    UPWIND = "upwind"
    CENTERED = "centered"
    ALTERNATING = "alternating"

    @staticmethod
    def parse(name) -> "FluxKind":
        if isinstance(name, FluxKind):
            return name
        try:
            return FluxKind(str(name).lower())
        except ValueError:
            raise ConfigError(f"unknown flux kind {name!r}") from None


def numerical_flux(u_left, u_right, kind: FluxKind, speed_sign: float = 1.0):
    """Consistent interface value u*(uL, uR).

    Upwind takes the inflow side; centered averages; for scalar transport the
    alternating flux reduces to the one-sided (upwind) choice.
    """
    if kind == FluxKind.CENTERED:
        return 0.5 * (np.asarray(u_left) + np.asarray(u_right))
    if kind in (FluxKind.UPWIND, FluxKind.ALTERNATING):
        return np.asarray(u_left) if speed_sign >= 0 else np.asarray(u_right)
    raise ConfigError(f"unsupported flux {kind}")


def _inv_mass_lifts(ops: ElementOperators):
    cached = getattr(ops, "_inv_mass_lifts", None)
    if cached is None:
        cached = (
            np.linalg.solve(ops.mass, ops.lift_left),
            np.linalg.solve(ops.mass, ops.lift_right),
        )
        ops._inv_mass_lifts = cached
    return cached


def semidiscrete_rhs(
    u: np.ndarray,
    ops: ElementOperators,
    mesh: Mesh1D,
    flux: FluxKind,
    speed: float = 1.0,
) -> np.ndarray:
    """du/dt = (a/J_k) M^{-1} (S u + L_L u*_L - L_R u*_R), periodic BCs."""
    u = np.asarray(u)
    if u.shape != (mesh.n_el, ops.n):
        raise ShapeError(f"field shape {u.shape} != ({mesh.n_el}, {ops.n})")
    trace_l = u @ ops.lift_left
    trace_r = u @ ops.lift_right
    # interface i sits left of element i; its left state is element i-1's
    # right trace (periodic wrap)
    ustar = numerical_flux(np.roll(trace_r, 1), trace_l, flux, np.sign(speed))
    inv_ll, inv_lr = _inv_mass_lifts(ops)
    core = u @ ops.inv_mass_stiffness.T
    core += np.outer(ustar, inv_ll)
    core -= np.outer(np.roll(ustar, -1), inv_lr)
    return (speed / mesh.jacobians)[:, None] * core


def l2_error(u_num: np.ndarray, u_ref: np.ndarray, node_x: np.ndarray) -> float:
    """Trapezoid-rule L2 norm of (u_num - u_ref) over the element nodes."""
    u_num, u_ref, node_x = map(np.asarray, (u_num, u_ref, node_x))
    if not (u_num.shape == u_ref.shape == node_x.shape):
        raise ShapeError("mismatched field/node shapes")
    diff2 = (u_num - u_ref) ** 2
    acc = 0.0
    for k in range(node_x.shape[0]):
        acc += np.trapezoid(diff2[k], node_x[k])
    return float(np.sqrt(acc))


@dataclass
class Discretization1D:
    """Everything a 1-D run needs: operators, mesh, and nodal machinery."""

    kind: str                      # "fc" or "legendre"
    ops: ElementOperators
    mesh: Mesh1D
    ref_nodes: np.ndarray          # evaluation nodes on [-1, 1]
    to_nodal: np.ndarray | None    # modal->nodal map (None when already nodal)

    @property
    def node_x(self) -> np.ndarray:
        return self.mesh.node_coords(self.ref_nodes)

    @property
    def min_node_spacing(self) -> float:
        gap = float(np.min(np.diff(self.ref_nodes)))
        return float(np.min(self.mesh.jacobians)) * gap

    def nodal_values(self, u: np.ndarray) -> np.ndarray:
        return u if self.to_nodal is None else u @ self.to_nodal.T

    def init_field(self, f) -> np.ndarray:
        x = self.node_x
        if self.kind == "fc":
            return f(x)
        return np.stack([l2_project(f(x[k]), self.ops.n - 1) for k in range(x.shape[0])])


def make_discretization(
    basis: str,
    mesh: Mesh1D,
    fc_params: FcParams | None = None,
    degree: int | None = None,
    quad: QuadConfig = QuadConfig(),
) -> Discretization1D:
    if basis == "fc":
        if fc_params is None:
            raise ConfigError("fc basis requires fc_params")
        ops = get_fc_operators(fc_params, quad)
        return Discretization1D(
            kind="fc",
            ops=ops,
            mesh=mesh,
            ref_nodes=uniform_grid(fc_params.n_points),
            to_nodal=None,
        )
    if basis == "legendre":
        if degree is None:
            raise ConfigError("legendre basis requires degree")
        nodes, _ = lgl_nodes_weights(degree)
        return Discretization1D(
            kind="legendre",
            ops=legendre_operators(degree),
            mesh=mesh,
            ref_nodes=nodes,
            to_nodal=legendre_vandermonde(degree, nodes),
        )
    raise ConfigError(f"unknown basis {basis!r}")


@dataclass
class TransportResult:
    disc: Discretization1D
    u_final: np.ndarray
    dt: float
    steps: int
    times: np.ndarray
    errors: np.ndarray

    @property
    def final_error(self) -> float:
        return float(self.errors[-1]) if self.errors.size else float("nan")


def solve_transport_1d(
    disc: Discretization1D,
    initial,
    t_final: float,
    flux=FluxKind.UPWIND,
    speed: float = 1.0,
    cfl: float = 0.2,
    integrator: str = "taylor",
    taylor_order: int = 8,
    analytic=None,
    n_records: int = 1,
) -> TransportResult:
    """Advance sampled/projected initial data to t_final and report errors.

    analytic, when given, is u(x, t); errors are recorded at n_records evenly
    spaced times (always including t_final).
    """
    flux = FluxKind.parse(flux)
    u = disc.init_field(initial)
    node_x = disc.node_x

    if t_final == 0.0 or speed == 0.0:
        err = (
            np.array([l2_error(disc.nodal_values(u), analytic(node_x, 0.0), node_x)])
            if analytic
            else np.array([])
        )
        return TransportResult(disc, u, 0.0, 0, np.array([0.0]), err)

    dt = timestep_from_cfl(cfl, disc.min_node_spacing, abs(speed))
    steps = max(1, int(np.ceil(t_final / dt - 1e-12)))
    dt = t_final / steps
    record_at = np.unique(
        np.linspace(0, steps, min(n_records, steps) + 1).round().astype(int)[1:]
    )

    rhs = lambda v: semidiscrete_rhs(v, disc.ops, disc.mesh, flux, speed)
    scheme = TaylorScheme(order=taylor_order, dt=dt)

    times, errors = [], []
    rec_idx = 0
    for step in range(1, steps + 1):
        if integrator == "taylor":
            u = taylor_step(u, rhs, scheme)
        elif integrator == "rk4":
            u = rk4_step(u, lambda t, v: rhs(v), (step - 1) * dt, dt)
        else:
            raise ConfigError(f"unknown integrator {integrator!r}")
        if rec_idx < len(record_at) and step == record_at[rec_idx]:
            t = step * dt
            times.append(t)
            if analytic is not None:
                errors.append(
                    l2_error(disc.nodal_values(u), analytic(node_x, t), node_x)
                )
            rec_idx += 1
    return TransportResult(
        disc, u, dt, steps, np.asarray(times), np.asarray(errors)
    )


def discrete_energy(u: np.ndarray, disc: Discretization1D) -> float:
    """sum_k J_k u^T M u, the Galerkin L2 energy of the field."""
    m = disc.ops.mass
    return float(np.sum(disc.mesh.jacobians * np.einsum("ki,ij,kj->k", u, m, u)))
