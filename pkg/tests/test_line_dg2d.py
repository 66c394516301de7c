import numpy as np
import pytest

from fcdg.dg1d import FluxKind, make_discretization, semidiscrete_rhs
from fcdg.errors import ShapeError
from fcdg.fc_basis import FcParams, uniform_grid
from fcdg.line_dg2d import (
    l2_error_2d,
    line_derivative,
    make_discretization_2d,
    semidiscrete_rhs_2d_transport,
    solve_transport_2d,
)
from fcdg.mesh import Mesh1D, Mesh2D
from fcdg.operators import get_fc_operators


@pytest.fixture(scope="module")
def ops40():
    return get_fc_operators(FcParams(40, 10, 25))


@pytest.fixture(scope="module")
def ops20():
    return get_fc_operators(FcParams(20, 10, 25))


def test_line_derivative_constant(ops20):
    r = line_derivative(np.full(20, 4.0), 4.0, 4.0, ops20, FluxKind.UPWIND)
    assert np.max(np.abs(r)) < 1e-10


def test_line_derivative_linear_periodic_copies(ops40):
    # neighbour traces continue the linear profile across the interfaces
    z = uniform_grid(40)
    r = line_derivative(z, -1.0, 1.0, ops40, FluxKind.UPWIND)
    assert np.max(np.abs(r[3:-3] - 1.0)) < 1e-8


def test_line_derivative_fourier_mode_periodic_elements(ops40):
    # 4-element periodic line carrying sin(pi x) on [-1, 1]^periodic
    mesh = Mesh1D.uniform(-1.0, 1.0, 4)
    z = uniform_grid(40)
    x = mesh.node_coords(z)
    u = np.sin(np.pi * x)
    jac = mesh.jacobians
    for k in range(4):
        left_trace = float(u[(k - 1) % 4] @ ops40.lift_right)
        right_trace = float(u[(k + 1) % 4] @ ops40.lift_left)
        r = line_derivative(u[k], left_trace, right_trace, ops40, FluxKind.UPWIND)
        assert np.max(np.abs(r / jac[k] - np.pi * np.cos(np.pi * x[k]))) < 1e-7


def test_rhs2d_constant_field(ops20):
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 3, 3))
    u = np.full((3, 3, 20, 20), 1.75)
    rhs = semidiscrete_rhs_2d_transport(u, 1.0, 1.0, disc.ops, disc.mesh, FluxKind.UPWIND)
    assert np.max(np.abs(rhs)) < 1e-10


def test_rhs2d_analytic_oracle():
    disc = make_discretization_2d(FcParams(40, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 4, 4))
    x, y = disc.node_xy
    u = np.sin(10 * np.pi * x) + np.sin(10 * np.pi * y)
    alpha, beta = 1.0, 0.7
    rhs = semidiscrete_rhs_2d_transport(u, alpha, beta, disc.ops, disc.mesh, FluxKind.UPWIND)
    expect = -alpha * 10 * np.pi * np.cos(10 * np.pi * x) - beta * 10 * np.pi * np.cos(
        10 * np.pi * y
    )
    assert np.max(np.abs(rhs - expect)) < 1e-5


def test_rhs2d_reduces_to_1d(ops20):
    # y-independent data with beta = 0 must match the 1-D operator line-by-line
    mesh2 = Mesh2D.uniform((0, 1), (0, 1), 4, 3)
    disc2 = make_discretization_2d(FcParams(20, 10, 25), mesh2)
    mesh1 = Mesh1D.uniform(0, 1, 4)
    x, _ = disc2.node_xy
    u2 = np.sin(2 * np.pi * x)
    rhs2 = semidiscrete_rhs_2d_transport(u2, 1.0, 0.0, disc2.ops, mesh2, FluxKind.UPWIND)
    u1 = np.sin(2 * np.pi * mesh1.node_coords(uniform_grid(20)))
    rhs1 = semidiscrete_rhs(u1, ops20, mesh1, FluxKind.UPWIND)
    for ey in range(3):
        for j in range(20):
            assert np.max(np.abs(rhs2[:, ey, :, j] - rhs1)) < 1e-12


def test_rhs2d_shape_error(ops20):
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 3, 3))
    with pytest.raises(ShapeError):
        semidiscrete_rhs_2d_transport(
            np.zeros((3, 2, 20, 20)), 1.0, 1.0, disc.ops, disc.mesh, FluxKind.UPWIND
        )


def test_l2_error_2d_constant():
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 2), (0, 3), 2, 2))
    u = np.full((2, 2, 20, 20), 1.5)
    ref = np.zeros_like(u)
    assert abs(l2_error_2d(u, ref, disc) - 1.5 * np.sqrt(6.0)) < 1e-12


def test_transport2d_zero_time():
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 2, 2))
    f = lambda x, y: np.sin(2 * np.pi * x) + np.sin(2 * np.pi * y)
    res = solve_transport_2d(
        disc, f, 0.0, analytic=lambda x, y, t: f(x - t, y - t)
    )
    assert res.error == 0.0


def test_transport2d_direction_symmetry():
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 3, 3))
    f = lambda x, y: np.sin(2 * np.pi * x) + 0.5 * np.sin(4 * np.pi * y)
    fT = lambda x, y: f(y, x)
    a = solve_transport_2d(disc, f, 0.11, alpha=1.0, beta=0.4, flux=FluxKind.UPWIND)
    b = solve_transport_2d(disc, fT, 0.11, alpha=0.4, beta=1.0, flux=FluxKind.UPWIND)
    swapped = np.swapaxes(np.swapaxes(b.u_final, 0, 1), 2, 3)
    assert np.max(np.abs(a.u_final - swapped)) < 1e-12


def test_transport2d_one_cycle_error():
    disc = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 6, 6))
    f = lambda x, y: np.sin(10 * np.pi * x) + np.sin(10 * np.pi * y)
    res = solve_transport_2d(
        disc, f, 1.0, flux=FluxKind.UPWIND,
        analytic=lambda x, y, t: f(x - t, y - t),
    )
    assert res.error < 5e-5


def test_transport2d_y_independent_matches_1d():
    disc2 = make_discretization_2d(FcParams(20, 10, 25), Mesh2D.uniform((0, 1), (0, 1), 4, 2))
    f2 = lambda x, y: np.sin(2 * np.pi * x)
    res2 = solve_transport_2d(disc2, f2, 0.25, alpha=1.0, beta=0.0, flux=FluxKind.UPWIND)
    disc1 = make_discretization("legendre", Mesh1D.uniform(0, 1, 4), degree=9)
    disc1 = make_discretization(
        "fc", Mesh1D.uniform(0, 1, 4), fc_params=FcParams(20, 10, 25)
    )
    from fcdg.dg1d import solve_transport_1d

    res1 = solve_transport_1d(
        disc1, lambda x: np.sin(2 * np.pi * x), 0.25, flux=FluxKind.UPWIND, cfl=0.2
    )
    # same dt mapping on both paths keeps the trajectories identical
    assert res1.dt == res2.dt
    for ey in range(2):
        for j in range(20):
            assert np.max(np.abs(res2.u_final[:, ey, :, j] - res1.u_final)) < 1e-11
