"""2-D TE-mode Maxwell solver on the line-DG machinery.

Fields Hz, Ex, Ey (plus polarization Px, Py and its rate Jx, Jy when the
nonlinear dispersive material model is active) are stacked along a leading
component axis so the whole state steps through the integrators as one
array.  Boundaries: periodic, or a PEC cavity with mirrored tangential-E
ghosts; interface coupling: centered or alternating fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dg1d import FluxKind, _inv_mass_lifts
from .errors import ConfigError, DivergenceError, ShapeError
from .line_dg2d import (
    Discretization2D,
    l2_error_2d,
    line_derivative_field_x,
    line_derivative_field_y,
    _traces_x,
    _traces_y,
)
from .timestepping import TaylorScheme, rk4_step, taylor_step, timestep_from_cfl

HZ, EX, EY, PX, PY, JX, JY = range(7)


@dataclass(frozen=True)
class MaxwellParams:
    mu0: float = 1.0
    eps0: float = 1.0
    eps_inf: float = 1.0

    def __post_init__(self):
        if min(self.mu0, self.eps0, self.eps_inf) <= 0:
            raise ConfigError("material constants must be positive")

    @property
    def wave_speed(self) -> float:
        return 1.0 / np.sqrt(self.mu0 * self.eps0 * self.eps_inf)


@dataclass(frozen=True)
class DuffingParams:
    """P'' + P'/tau + omega0^2 P F(P) = omega_p^2 E with polynomial F."""

    omega0: float = 1.0
    omega_p: float = 1.0
    tau_inv: float = 1.0
    lambdas: tuple = (1.0, 1.0)  # lambda_{2l}, l = 0..n_pmd

    def __post_init__(self):
        if len(self.lambdas) < 2:
            raise ConfigError("polynomial model needs n_pmd >= 1 (>= 2 lambdas)")

    @property
    def n_pmd(self) -> int:
        return len(self.lambdas) - 1


@dataclass(frozen=True)
class ForcingSpec:
    amplitude: float = 2500.0
    frequency: float = 100.0
    width: float = 36.0
    x0: float = 0.5
    y0: float = 0.5

    def __call__(self, x, y, t):
        r2 = (x - self.x0) ** 2 + (y - self.y0) ** 2
        return self.amplitude * np.sin(self.frequency * t) * np.exp(-self.width * r2)


@dataclass
class MaxwellState:
    """Named views into the stacked component array."""

    fields: np.ndarray  # (3 or 7, n_ex, n_ey, N, N)

    @property
    def Hz(self):
        return self.fields[HZ]

    @property
    def Ex(self):
        return self.fields[EX]

    @property
    def Ey(self):
        return self.fields[EY]

    @property
    def has_polarization(self):
        return self.fields.shape[0] == 7

    @property
    def Px(self):
        return self.fields[PX]

    @property
    def Py(self):
        return self.fields[PY]


def apply_em_boundary(trace: np.ndarray, fieldname: str, side: str, bc: str):
    """Ghost trace outside a wall: PEC mirrors tangential E (E+ = -E-),
    everything else copies (first-order Neumann); Hz copies at PEC walls."""
    if bc == "periodic":
        raise ConfigError("periodic boundaries have no ghost traces")
    if bc != "pec_cavity":
        raise ConfigError(f"unknown boundary condition {bc!r}")
    tangential = {"left": "Ey", "right": "Ey", "bottom": "Ex", "top": "Ex"}
    if fieldname == tangential[side]:
        return -np.asarray(trace)
    return np.asarray(trace)


def duffing_rhs(p_x, p_y, pdot_x, pdot_y, e_x, e_y, dp: DuffingParams, mp: MaxwellParams):
    """(dP/dt, d2P/dt2) of the polynomial dispersive model, pointwise."""
    p_sq = p_x * p_x + p_y * p_y
    f_pmd = np.zeros_like(p_sq)
    for coeff in reversed(dp.lambdas):
        f_pmd = f_pmd * p_sq + coeff
    wp2 = dp.omega_p**2
    w02 = dp.omega0**2
    pddot_x = wp2 * e_x - dp.tau_inv * pdot_x - w02 * p_x * f_pmd
    pddot_y = wp2 * e_y - dp.tau_inv * pdot_y - w02 * p_y * f_pmd
    return pdot_x, pdot_y, pddot_x, pddot_y


def _interface_star(tl, tr, axis, flux: FluxKind, fieldname: str, bc: str):
    """Per-element (left, right) interface values for one field along one axis.

    Interior interfaces follow the flux rule (alternating: E from the
    lower-index side, Hz from the upper-index side).  Cavity walls use the
    mirrored ghost pair, whose centered combination enforces tangential
    E* = 0 and Hz* = interior for every flux kind.
    """
    if bc == "periodic":
        left_state = np.roll(tr, 1, axis=axis)
        right_state = tl
        if flux == FluxKind.CENTERED:
            star = 0.5 * (left_state + right_state)
        else:  # alternating
            star = left_state if fieldname in ("Ex", "Ey") else right_state
        return star, np.roll(star, -1, axis=axis)

    # pec_cavity: n_el+1 interfaces along this axis
    side_lo, side_hi = ("left", "right") if axis == 0 else ("bottom", "top")
    lo_interior = np.take(tl, 0, axis=axis)
    hi_interior = np.take(tr, -1, axis=axis)
    lo_ghost = apply_em_boundary(lo_interior, fieldname, side_lo, bc)
    hi_ghost = apply_em_boundary(hi_interior, fieldname, side_hi, bc)

    inner_left = np.take(tr, range(0, tr.shape[axis] - 1), axis=axis)
    inner_right = np.take(tl, range(1, tl.shape[axis]), axis=axis)
    if flux == FluxKind.CENTERED:
        inner = 0.5 * (inner_left + inner_right)
    else:
        inner = inner_left if fieldname in ("Ex", "Ey") else inner_right
    lo = np.expand_dims(0.5 * (lo_ghost + lo_interior), axis)
    hi = np.expand_dims(0.5 * (hi_ghost + hi_interior), axis)
    star_left = np.concatenate([lo, inner], axis=axis)
    star_right = np.concatenate([inner, hi], axis=axis)
    return star_left, star_right


def _dx(u, fieldname, disc: Discretization2D, flux, bc):
    tl, tr = _traces_x(u, disc.ops)
    star_l, star_r = _interface_star(tl, tr, 0, flux, fieldname, bc)
    jac = disc.mesh.mesh_x.jacobians[:, None, None, None]
    return line_derivative_field_x(u, disc.ops, star_l, star_r) / jac


def _dy(u, fieldname, disc: Discretization2D, flux, bc):
    tl, tr = _traces_y(u, disc.ops)
    star_l, star_r = _interface_star(tl, tr, 1, flux, fieldname, bc)
    jac = disc.mesh.mesh_y.jacobians[None, :, None, None]
    return line_derivative_field_y(u, disc.ops, star_l, star_r) / jac


def maxwell_rhs(
    fields: np.ndarray,
    t: float,
    disc: Discretization2D,
    params: MaxwellParams,
    flux: FluxKind,
    bc: str = "pec_cavity",
    forcing: ForcingSpec | None = None,
    duffing: DuffingParams | None = None,
    node_xy=None,
) -> np.ndarray:
    """Semidiscrete TE system (optionally forced / dispersive)."""
    flux = FluxKind.parse(flux)
    if flux == FluxKind.UPWIND:
        raise ConfigError("the TE solver supports centered or alternating fluxes")
    n_comp = 7 if duffing is not None else 3
    if fields.shape[0] != n_comp:
        raise ShapeError(f"expected {n_comp} components, got {fields.shape[0]}")

    eps = params.eps0 * params.eps_inf
    out = np.empty_like(fields)
    out[HZ] = (
        -_dx(fields[EY], "Ey", disc, flux, bc) + _dy(fields[EX], "Ex", disc, flux, bc)
    ) / params.mu0
    dhz_dy = _dy(fields[HZ], "Hz", disc, flux, bc)
    dhz_dx = _dx(fields[HZ], "Hz", disc, flux, bc)
    out[EX] = dhz_dy / eps
    out[EY] = -dhz_dx / eps

    if forcing is not None:
        x, y = node_xy if node_xy is not None else disc.node_xy
        f = forcing(x, y, t)
        out[EX] += f * (y - forcing.y0) / eps
        out[EY] += f * (x - forcing.x0) / eps

    if duffing is not None:
        dpx, dpy, djx, djy = duffing_rhs(
            fields[PX], fields[PY], fields[JX], fields[JY],
            fields[EX], fields[EY], duffing, params,
        )
        out[PX], out[PY], out[JX], out[JY] = dpx, dpy, djx, djy
        # Ampere: eps0 eps_inf E_t = curl H - eps0 J
        out[EX] -= params.eps0 * fields[JX] / eps
        out[EY] -= params.eps0 * fields[JY] / eps
    return out


def em_energy(fields: np.ndarray, disc: Discretization2D, params: MaxwellParams) -> float:
    """(1/2) int mu0 Hz^2 + eps0 eps_inf (Ex^2 + Ey^2), trapezoid rule."""
    zero = np.zeros_like(fields[HZ])
    acc = params.mu0 * l2_error_2d(fields[HZ], zero, disc) ** 2
    acc += params.eps0 * params.eps_inf * l2_error_2d(fields[EX], zero, disc) ** 2
    acc += params.eps0 * params.eps_inf * l2_error_2d(fields[EY], zero, disc) ** 2
    return 0.5 * acc


@dataclass
class MaxwellResult:
    disc: Discretization2D
    state: MaxwellState
    dt: float
    steps: int
    hz_error: float | None
    energy_trace: np.ndarray
    snapshots: dict = field(default_factory=dict)


def solve_maxwell_2d(
    disc: Discretization2D,
    params: MaxwellParams,
    t_final: float,
    flux=FluxKind.CENTERED,
    bc: str = "pec_cavity",
    initial_hz=None,
    analytic_hz=None,
    forcing: ForcingSpec | None = None,
    duffing: DuffingParams | None = None,
    cfl: float = 0.2,
    integrator: str | None = None,
    taylor_order: int = 8,
    snapshot_times=(),
    energy_every: int = 0,
) -> MaxwellResult:
    """Evolve the TE system; E starts at zero, Hz from initial_hz(x, y).

    Linear unforced runs default to Taylor stepping, forced or dispersive
    runs to RK4; pairing Taylor with forcing is rejected (the recursion
    would need forcing time derivatives).
    """
    flux = FluxKind.parse(flux)
    if integrator is None:
        integrator = "rk4" if (forcing is not None or duffing is not None) else "taylor"
    if integrator == "taylor" and forcing is not None:
        raise ConfigError("Taylor stepping cannot be combined with forcing; use rk4")

    n_ex, n_ey = disc.mesh.n_el
    n = disc.ops.n
    n_comp = 7 if duffing is not None else 3
    fields = np.zeros((n_comp, n_ex, n_ey, n, n))
    x, y = disc.node_xy
    if initial_hz is not None:
        fields[HZ] = initial_hz(x, y)

    dt = timestep_from_cfl(cfl, disc.min_node_spacing, params.wave_speed)
    steps = max(1, int(np.ceil(t_final / dt - 1e-12))) if t_final > 0 else 0
    dt = t_final / steps if steps else 0.0
    scheme = TaylorScheme(order=taylor_order, dt=dt) if steps else None

    rhs_kwargs = dict(
        disc=disc, params=params, flux=flux, bc=bc,
        forcing=forcing, duffing=duffing, node_xy=(x, y),
    )
    snapshot_steps = {
        min(steps, max(1, int(round(ts / dt)))) if dt else 0: ts for ts in snapshot_times
    }
    snapshots = {}
    energies = [em_energy(fields, disc, params)]

    t = 0.0
    for step in range(1, steps + 1):
        if integrator == "taylor":
            fields = taylor_step(fields, lambda v: maxwell_rhs(v, t, **rhs_kwargs), scheme)
        elif integrator == "rk4":
            fields = rk4_step(fields, lambda tt, v: maxwell_rhs(v, tt, **rhs_kwargs), t, dt)
        else:
            raise ConfigError(f"unknown integrator {integrator!r}")
        t = step * dt
        if not np.all(np.isfinite(fields)):
            raise DivergenceError(f"non-finite fields at t = {t:.6g}")
        if energy_every and (step % energy_every == 0 or step == steps):
            energies.append(em_energy(fields, disc, params))
        if step in snapshot_steps:
            snapshots[snapshot_steps[step]] = MaxwellState(fields.copy())
    if not energy_every:
        energies.append(em_energy(fields, disc, params))

    err = None
    if analytic_hz is not None:
        err = l2_error_2d(fields[HZ], analytic_hz(x, y, t_final), disc)
    return MaxwellResult(
        disc=disc,
        state=MaxwellState(fields),
        dt=dt,
        steps=steps,
        hz_error=err,
        energy_trace=np.asarray(energies),
        snapshots=snapshots,
    )
