"""Time integration: Taylor-series stepping for linear autonomous systems
and classical RK4 for forced or nonlinear right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import DivergenceError, ParameterError


@dataclass(frozen=True)
class TaylorScheme:
    """Truncated-exponential stepper with N_t terms beyond the state itself."""

    order: int
    dt: float
    cfl: float | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ParameterError("Taylor order must be >= 1")
        if not self.dt > 0:
            raise ParameterError("dt must be positive")


def timestep_from_cfl(cfl: float, dx_node: float, c_max: float) -> float:
    """dt = cfl * (smallest node spacing) / (max wave speed)."""
    if cfl <= 0 or dx_node <= 0 or c_max <= 0:
        raise ParameterError("cfl, dx_node and c_max must be positive")
    return cfl * dx_node / c_max


def taylor_step(state: np.ndarray, apply_rhs, scheme: TaylorScheme) -> np.ndarray:
    """u <- sum_{k=0}^{N_t} (dt^k/k!) A^k u, built by repeated application.

    apply_rhs must be linear and time-independent; each Taylor term is the
    previous one pushed through A and scaled by dt/k.
    """
    term = state
    acc = state.copy()
    for k in range(1, scheme.order + 1):
        term = apply_rhs(term) * (scheme.dt / k)
        acc = acc + term
    if not np.all(np.isfinite(acc)):
        raise DivergenceError("Taylor step produced non-finite values")
    return acc


def rk4_step(state: np.ndarray, rhs, t: float, dt: float) -> np.ndarray:
    """Classical four-stage explicit Runge-Kutta update."""
    k1 = rhs(t, state)
    k2 = rhs(t + dt / 2, state + (dt / 2) * k1)
    k3 = rhs(t + dt / 2, state + (dt / 2) * k2)
    k4 = rhs(t + dt, state + dt * k3)
    out = state + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError("RK4 step produced non-finite values")
    return out


@lru_cache(maxsize=64)
def _amplification_deviation_leading_term(order: int) -> Fraction:
    """Leading coefficient of |R(i theta)|^2 - 1 in exact rationals.

    R is the order-N_t truncated exponential; the sign of the first nonzero
    theta-power coefficient decides whether a neighbourhood of the imaginary
    axis lies inside the stability region.
    """
    # r_k = i^k / k! as (re, im) rational pairs
    re = []
    im = []
    for k in range(order + 1):
        c = Fraction(1, factorial(k))
        rot = k % 4
        re.append(c if rot == 0 else -c if rot == 2 else Fraction(0))
        im.append(c if rot == 1 else -c if rot == 3 else Fraction(0))
    # |R|^2 coefficient of theta^n: sum_{k+j=n} (re_k re_j + im_k im_j)
    for n in range(1, 2 * order + 1):
        acc = Fraction(0)
        for k in range(max(0, n - order), min(n, order) + 1):
            j = n - k
            acc += re[k] * re[j] + im[k] * im[j]
        if acc != 0:
            return acc
    raise AssertionError("truncated exponential has unit modulus to all orders")


def stability_includes_imaginary_axis(order: int) -> bool:
    """True iff |R(i theta)| <= 1 on some nonempty interval (0, theta*]."""
    if not 1 <= order <= 20:
        raise ParameterError("order must be in 1..20")
    return _amplification_deviation_leading_term(order) < 0


def amplification_on_imaginary_axis(order: int, theta) -> np.ndarray:
    """|R(i theta)| for the truncated exponential of the given order."""
    theta = np.asarray(theta, dtype=np.float64)
    z = 1j * theta
    acc = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, order + 1):
        term = term * z / k
        acc = acc + term
    return np.abs(acc)


def imaginary_stability_limit(order: int, tol: float = 1e-12) -> float:
    """Largest theta* with |R(i theta)| <= 1 for all theta in [0, theta*]."""
    if not stability_includes_imaginary_axis(order):
        return 0.0
    step = 0.01
    theta = step
    while amplification_on_imaginary_axis(order, theta) <= 1.0:
        theta += step
    lo, hi = theta - step, theta
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if amplification_on_imaginary_axis(order, mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return lo
