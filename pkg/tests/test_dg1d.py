import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcdg.analysis import global_transport_matrix
from fcdg.dg1d import (
    Discretization1D,
    FluxKind,
    discrete_energy,
    l2_error,
    make_discretization,
    numerical_flux,
    semidiscrete_rhs,
    solve_transport_1d,
)
from fcdg.errors import ShapeError
from fcdg.fc_basis import FcParams
from fcdg.mesh import Mesh1D


def fc_disc(n_el, n=20, p=10, m=25, domain=(-1.0, 1.0)):
    return make_discretization(
        "fc", Mesh1D.uniform(domain[0], domain[1], n_el), fc_params=FcParams(n, p, m)
    )


# ---------------------------------------------------------------------- flux


def test_upwind_flux_takes_inflow_side():
    assert numerical_flux(3.0, 7.0, FluxKind.UPWIND, 1.0) == 3.0
    assert numerical_flux(3.0, 7.0, FluxKind.UPWIND, -1.0) == 7.0


def test_centered_flux_averages():
    assert numerical_flux(3.0, 7.0, FluxKind.CENTERED) == 5.0


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-1e6, 1e6, allow_nan=False),
    st.sampled_from(list(FluxKind)),
    st.sampled_from([1.0, -1.0]),
)
def test_flux_consistency(c, kind, sgn):
    assert numerical_flux(c, c, kind, sgn) == c


def test_alternating_maps_to_upwind_for_scalar():
    assert numerical_flux(3.0, 7.0, FluxKind.ALTERNATING, 1.0) == 3.0


# ----------------------------------------------------------------------- rhs


def test_free_stream_preservation():
    disc = fc_disc(4)
    u = np.full((4, 20), 2.5)
    for flux in FluxKind:
        rhs = semidiscrete_rhs(u, disc.ops, disc.mesh, flux)
        assert np.max(np.abs(rhs)) < 1e-10, flux


def test_rhs_matches_analytic_derivative():
    disc = fc_disc(1, n=40)
    x = disc.node_x
    u = np.sin(np.pi * x)
    rhs = semidiscrete_rhs(u, disc.ops, disc.mesh, FluxKind.UPWIND, speed=1.0)
    assert np.max(np.abs(rhs - (-np.pi * np.cos(np.pi * x)))) < 1e-7


def test_rhs_shape_error():
    disc = fc_disc(2)
    with pytest.raises(ShapeError):
        semidiscrete_rhs(np.zeros((3, 20)), disc.ops, disc.mesh, FluxKind.UPWIND)


def test_upwind_global_operator_damped():
    disc = fc_disc(4)
    a = global_transport_matrix(disc.ops, disc.mesh, FluxKind.UPWIND)
    lam = np.linalg.eigvals(a)
    assert np.max(lam.real) <= 1e-10


def test_centered_global_operator_imaginary():
    disc = fc_disc(4)
    a = global_transport_matrix(disc.ops, disc.mesh, FluxKind.CENTERED)
    lam = np.linalg.eigvals(a)
    assert np.max(np.abs(lam.real)) <= 1e-9 * np.max(np.abs(lam))


def test_spectrum_conjugate_symmetric():
    disc = fc_disc(4)
    lam = np.linalg.eigvals(
        global_transport_matrix(disc.ops, disc.mesh, FluxKind.UPWIND)
    )
    paired = np.sort_complex(np.conj(lam))
    assert np.max(np.abs(np.sort_complex(lam) - paired)) < 1e-10 * np.max(np.abs(lam))


# ------------------------------------------------------------------ l2 error


def test_l2_error_identical_fields():
    x = np.linspace(-1, 1, 100).reshape(1, -1)
    assert l2_error(x, x, x) == 0.0


def test_l2_error_constant_difference():
    x = np.linspace(-1, 1, 400).reshape(1, -1)
    err = l2_error(np.full_like(x, 3.0), np.zeros_like(x), x)
    assert abs(err - 3.0 * np.sqrt(2.0)) < 1e-12


def test_l2_error_sine_difference():
    x = np.linspace(-1, 1, 400).reshape(1, -1)
    err = l2_error(np.sin(np.pi * x), np.zeros_like(x), x)
    assert abs(err - 1.0) < 1e-4


# -------------------------------------------------------------------- solver


def sine10(x):
    return np.sin(10 * np.pi * x)


def sine10_translate(x, t):
    return np.sin(10 * np.pi * (x - t))


def test_transport_zero_time():
    disc = fc_disc(4, n=40)
    res = solve_transport_1d(disc, sine10, 0.0, analytic=sine10_translate)
    assert res.errors[0] == 0.0


def test_transport_one_cycle_accuracy():
    disc = fc_disc(6, n=40)
    res = solve_transport_1d(
        disc, sine10, 2.0, flux=FluxKind.UPWIND, cfl=0.2, analytic=sine10_translate
    )
    assert res.final_error <= 1e-6


def test_transport_energy_decay_upwind():
    disc = fc_disc(4, n=20)
    u = disc.init_field(sine10)
    from fcdg.timestepping import TaylorScheme, taylor_step, timestep_from_cfl

    dt = timestep_from_cfl(0.2, disc.min_node_spacing, 1.0)
    scheme = TaylorScheme(order=8, dt=dt)
    rhs = lambda v: semidiscrete_rhs(v, disc.ops, disc.mesh, FluxKind.UPWIND)
    energy = discrete_energy(u, disc)
    for _ in range(50):
        u = taylor_step(u, rhs, scheme)
        new = discrete_energy(u, disc)
        assert new <= energy * (1.0 + 1e-10)
        energy = new


def test_transport_conservation():
    disc = fc_disc(6, n=40)
    res = solve_transport_1d(disc, sine10, 2.0, flux=FluxKind.UPWIND, cfl=0.2)
    x = disc.node_x
    total0 = sum(np.trapezoid(sine10(x[k]), x[k]) for k in range(6))
    total1 = sum(np.trapezoid(res.u_final[k], x[k]) for k in range(6))
    assert abs(total1 - total0) < 1e-10


def test_transport_legendre_path():
    disc = make_discretization("legendre", Mesh1D.uniform(-1, 1, 12), degree=9)
    res = solve_transport_1d(
        disc, sine10, 0.2, flux=FluxKind.UPWIND, cfl=0.05, analytic=sine10_translate
    )
    assert res.final_error < 3e-5
    assert np.all(np.isfinite(res.u_final))


def test_long_run_error_stays_flat():
    disc = fc_disc(10, n=40)
    res = solve_transport_1d(
        disc,
        sine10,
        20.0,
        flux=FluxKind.UPWIND,
        cfl=0.2,
        analytic=sine10_translate,
        n_records=10,
    )
    assert res.errors[-1] <= 10.0 * res.errors[0] + 1e-12
