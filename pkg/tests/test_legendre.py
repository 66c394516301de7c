import numpy as np
import pytest

from fcdg.errors import ParameterError
from fcdg.legendre import (
    l2_project,
    legendre_basis,
    legendre_operators,
    legendre_vandermonde,
    lgl_nodes_weights,
)
from fcdg.operators import validate_operators


def test_lgl_q1_trapezoid():
    nodes, weights = lgl_nodes_weights(1)
    assert np.allclose(nodes, [-1.0, 1.0], atol=1e-15)
    assert np.allclose(weights, [1.0, 1.0], atol=1e-15)


def test_lgl_q2_simpson():
    nodes, weights = lgl_nodes_weights(2)
    assert np.allclose(nodes, [-1.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(weights, [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0], atol=1e-14)


def test_lgl_symmetry_and_weight_sum():
    nodes, weights = lgl_nodes_weights(10)
    assert np.max(np.abs(nodes + nodes[::-1])) < 1e-13
    assert abs(weights.sum() - 2.0) < 1e-13
    assert nodes[0] == -1.0 and nodes[-1] == 1.0


def test_lgl_quadrature_exactness_degree():
    # degree 2q-1 exactness: q=10 integrates t^18 and t^19
    nodes, weights = lgl_nodes_weights(10)
    assert abs(np.sum(weights * nodes**18) - 2.0 / 19.0) < 1e-12
    assert abs(np.sum(weights * nodes**19)) < 1e-13


def test_lgl_invalid_degree():
    with pytest.raises(ParameterError):
        lgl_nodes_weights(0)


def test_modal_mass_diagonal():
    ops = legendre_operators(2)
    assert np.allclose(np.diag(ops.mass), [2.0, 2.0 / 3.0, 2.0 / 5.0], atol=1e-15)
    assert np.count_nonzero(ops.mass - np.diag(np.diag(ops.mass))) == 0


def test_stiffness_against_symbolic_oracle():
    import sympy as sp

    x = sp.Symbol("x")
    q = 4
    ops = legendre_operators(q)
    for i in range(q + 1):
        for j in range(q + 1):
            exact = sp.integrate(
                sp.diff(sp.legendre(i, x), x) * sp.legendre(j, x), (x, -1, 1)
            )
            assert abs(ops.stiffness[i, j] - float(exact)) < 1e-14, (i, j)


def test_lift_vectors():
    ops = legendre_operators(5)
    assert np.array_equal(ops.lift_right, np.ones(6))
    assert np.array_equal(ops.lift_left, (-1.0) ** np.arange(6))


def test_operators_satisfy_shared_invariants():
    validate_operators(legendre_operators(9))


def test_projection_constant_and_linear():
    u = l2_project(lambda z: np.ones_like(z), 6)
    expect = np.zeros(7)
    expect[0] = 1.0
    assert np.max(np.abs(u - expect)) < 1e-14
    u = l2_project(lambda z: z, 6)
    expect = np.zeros(7)
    expect[1] = 1.0
    assert np.max(np.abs(u - expect)) < 1e-14


def test_projection_residual_sine():
    # dense-evaluation oracle: the true degree-10 L2 residual of sin(pi z)
    # is ~8.7e-6 (Legendre tail coefficient (2*11+1) j_11(pi) ~ 2e-5)
    q = 10
    u = l2_project(lambda z: np.sin(np.pi * z), q)
    zfine = np.linspace(-1, 1, 1501)
    resid = np.max(np.abs(legendre_vandermonde(q, zfine) @ u - np.sin(np.pi * zfine)))
    assert resid < 1e-5
    assert resid > 1e-7  # sanity: genuinely the projection error, not roundoff


def test_projection_idempotent():
    rng = np.random.default_rng(9)
    q = 8
    coeffs = rng.standard_normal(q + 1)
    basis = legendre_basis(q)
    samples = legendre_vandermonde(q, basis.lgl_nodes) @ coeffs
    again = l2_project(samples, q)
    assert np.max(np.abs(again - coeffs)) < 1e-12
