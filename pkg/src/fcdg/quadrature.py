"""Equispaced quadrature on [-1, 1]: Gregory end-corrected trapezoid rules
and spectral refinement of periodic samples by zero-padded FFT.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ParameterError, ShapeError

MAX_ORDER = 16


@dataclass(frozen=True)
class GregoryRule:
    """n equispaced nodes on [-1, 1] with end-corrected trapezoid weights."""

    n: int
    order: int
    weights: np.ndarray


@lru_cache(maxsize=1)
def _gregory_coefficients(count: int = MAX_ORDER + 2):
    """G_k from t/ln(1+t) = sum G_k t^k, as exact Fractions."""
    g = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for j in range(m):
            acc += g[j] * Fraction((-1) ** (m - j), m - j + 1)
        g.append(-acc)
    return g


@lru_cache(maxsize=64)
def _end_corrections(order: int):
    """Weight corrections (units of h) applied at each end, exact rationals.

    Truncating the Gregory difference series after the K-th forward/backward
    difference (K = order-2 for even order, order-1 for odd) yields
    corrections c_r on the K+1 points nearest each boundary.
    """
    from math import comb

    k_diff = order - 2 + (order % 2)
    g = _gregory_coefficients()
    c = [Fraction(0)] * (k_diff + 1)
    for j in range(1, k_diff + 1):
        lj = abs(g[j + 1])
        for r in range(j + 1):
            c[r] -= lj * Fraction((-1) ** r * comb(j, r))
    return c


def gregory_weights(n: int, order: int) -> GregoryRule:
    """Gregory rule of the requested polynomial-exactness order on [-1, 1].

    Interior weights equal the grid spacing h = 2/(n-1); the K+1 points
    nearest each boundary carry corrections derived from the Gregory
    difference series (computed in exact rational arithmetic).
    """
    if not 2 <= order <= MAX_ORDER:
        raise ParameterError(f"order must be in 2..{MAX_ORDER}, got {order}")
    corrections = _end_corrections(order)
    width = len(corrections)
    if n < 2 * width:
        raise ParameterError(
            f"n={n} too small for order {order} (needs at least {2 * width} nodes)"
        )
    h = 2.0 / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    corr = np.array([float(c) for c in corrections])
    w[:width] += h * corr
    w[n - width :] += h * corr[::-1]
    return GregoryRule(n=n, order=order, weights=w)


def fourier_interpolate(samples: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited refinement of one period of equispaced samples.

    Zero-pads the FFT to length len(samples)*factor; for even input length
    the Nyquist bin is split between the +- positions so real data stays real.
    """
    if factor < 1:
        raise ParameterError(f"refinement factor must be >= 1, got {factor}")
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[0]
    if factor == 1:
        return samples.copy()
    spec = np.fft.fft(samples)
    out = np.zeros(n * factor, dtype=np.complex128)
    half = n // 2
    if n % 2:
        out[: half + 1] = spec[: half + 1]
        out[-half:] = spec[-half:]
    else:
        out[:half] = spec[:half]
        out[half] = spec[half] / 2
        out[len(out) - half] = spec[half] / 2
        if half > 1:
            out[-(half - 1) :] = spec[-(half - 1) :]
    return np.real(np.fft.ifft(out)) * factor


def integrate_on_reference(f_samples: np.ndarray, rule: GregoryRule) -> float:
    """Apply the rule: sum w_j f_j over the [-1, 1] sample grid."""
    f_samples = np.asarray(f_samples, dtype=np.float64)
    if f_samples.shape[-1] != rule.n:
        raise ShapeError(
            f"sample count {f_samples.shape[-1]} does not match rule.n={rule.n}"
        )
    return f_samples @ rule.weights
