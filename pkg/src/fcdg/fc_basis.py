"""Discrete periodic extension (DPE) of equispaced samples and the nodal
basis it induces.

Samples f_l on the uniform grid z_l = -1 + 2l/(N-1) are extended by
degree-(p-1) polynomial extrapolation of the p end samples, multiplied by a
smooth window supported on [-b, b] with b = 1 + 2M/(N-1), and folded with
index period N+M into one period of a smooth discrete periodic function.
Applying the (linear) extension to the canonical unit vectors and taking the
DFT yields N basis functions represented by trigonometric coefficients,
nodal on z_l and periodic with continuous period T = 2(N+M)/(N-1).

Construction arithmetic: the extension samples of unit vectors reach ~1e7
while the basis is O(1) on [-1, 1], so the "extended" precision mode runs
the whole pipeline in double-double arithmetic and keeps a correction term
with every coefficient; plain float64 mode is provided for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .ddarith import DD, DDC, dd_from_fraction, roots_of_unity
from .errors import ParameterError, ShapeError

# Shape parameter of the window transition (integrated-Kaiser step).  At
# M = 25 extension points this puts the interpolation floor of the DPE below
# 1e-14 while keeping the transition monotone and symmetric.
WINDOW_SHAPE = 35.0

_TWO_PI = DD.from_mp(2 * mp.pi)


@dataclass(frozen=True)
class FcParams:
    """Extension parameters: N samples, p-point stencils, M extension points."""

    n_points: int
    poly_points: int = 10
    ext_points: int = 25
    precision: str = "extended"

    def __post_init__(self):
        n, p, m = self.n_points, self.poly_points, self.ext_points
        if p < 2:
            raise ParameterError(f"poly_points must be >= 2, got {p}")
        if m < 1:
            raise ParameterError(f"ext_points must be >= 1, got {m}")
        if n < 2 * p:
            raise ParameterError(
                f"n_points={n} < 2*poly_points={2 * p}: end stencils would overlap"
            )
        if self.precision not in ("extended", "double"):
            raise ParameterError(f"unknown precision {self.precision!r}")

    @property
    def spacing(self) -> float:
        return 2.0 / (self.n_points - 1)

    @property
    def ext_bound(self) -> float:
        """b = 1 + 2M/(N-1), right end of the window support."""
        return 1.0 + 2.0 * self.ext_points / (self.n_points - 1)

    @property
    def period_len(self) -> float:
        """Continuous period T = 2(N+M)/(N-1) of the extension."""
        return 2.0 * (self.n_points + self.ext_points) / (self.n_points - 1)

    @property
    def label(self) -> str:
        return f"fc:N{self.n_points}:p{self.poly_points}:M{self.ext_points}"


@dataclass(frozen=True)
class PeriodicExtension:
    """One index-period (length N+M) of the discrete periodic extension."""

    samples: np.ndarray
    period_len: float


@dataclass(frozen=True)
class FcBasis:
    """Trigonometric coefficients of the N nodal basis functions.

    coeffs[k, i] multiplies exp(2*pi*1j*modes[k]*(z+1)/period_len) in basis
    function i; coeffs_lo carries the double-double correction when the
    basis was built in extended precision (None for float64 builds).
    """

    params: FcParams
    modes: np.ndarray
    coeffs: np.ndarray
    period_len: float
    window: np.ndarray
    coeffs_lo: np.ndarray | None = None
    label: str = field(default="")

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def coeffs_dd(self) -> DDC:
        lo = self.coeffs_lo if self.coeffs_lo is not None else np.zeros_like(self.coeffs)
        return DDC(DD(self.coeffs.real, lo.real), DD(self.coeffs.imag, lo.imag))


def uniform_grid(params) -> np.ndarray:
    """Equispaced nodes z_l = -1 + 2l/(N-1) on [-1, 1]."""
    n = params.n_points if isinstance(params, FcParams) else int(params)
    if n < 2:
        raise ParameterError(f"need at least 2 grid points, got {n}")
    return -1.0 + 2.0 * np.arange(n) / (n - 1)


# ---------------------------------------------------------------------------
# window


def _window_series_terms(x, beta, tol, one):
    """sum_m (beta/2)^{2m}/(m!)^2 * J_m(x) with J_m = int_x^1 (1-v^2)^m dv,
    and the same sum with J_m(-1), via the stable positive recurrence."""
    num = x * 0
    den = one * 0
    jm = one - x
    fm = 2 * one
    term = one
    m = 0
    b2 = (beta / 2) ** 2
    while True:
        num = num + term * jm
        den = den + term * fm
        if m > 5 and term * fm < den * tol:
            return num, den
        m += 1
        term = term * b2 / (m * m)
        jm = (2 * m * jm - x * (one - x * x) ** m) / (2 * m + 1)
        fm = fm * (2 * m) / (2 * m + 1)


def window_transition(t):
    """Monotone C-infinity step from 1 (t<=0) to 0 (t>=1).

    Normalized integral of the Kaiser bump I0(beta*sqrt(1-v^2)) over [2t-1, 1];
    symmetric about t = 1/2, exactly 1/0 at the transition ends.
    """
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    out[t <= 0.0] = 1.0
    out[t >= 1.0] = 0.0
    mid = (t > 0.0) & (t < 1.0)
    if np.any(mid):
        x = 2.0 * t[mid] - 1.0
        num, den = _window_series_terms(x, WINDOW_SHAPE, 1e-18, 1.0)
        out[mid] = num / den
    return out


@lru_cache(maxsize=16)
def _window_transition_dd(m_ext: int) -> DD:
    """Window step at t = j/M, j = 0..M, in double-double (mpmath-seeded)."""
    with mp.workdps(50):
        beta = mp.mpf(WINDOW_SHAPE)
        vals = []
        for j in range(m_ext + 1):
            t = mp.mpf(j) / m_ext
            if j == 0:
                vals.append(mp.mpf(1))
            elif j == m_ext:
                vals.append(mp.mpf(0))
            else:
                num, den = _window_series_terms(2 * t - 1, beta, mp.mpf(10) ** -46, mp.mpf(1))
                vals.append(num / den)
        return DD.from_mp(vals)


def window_values(params: FcParams) -> np.ndarray:
    """Window sampled on the N+2M extended grid nodes z_{-M} .. z_{N-1+M}."""
    n, m = params.n_points, params.ext_points
    l = np.arange(n + 2 * m) - m
    # transition argument by index: exact 0/1 at the plateau and support edges
    t = np.maximum.reduce([np.zeros(l.shape), -l / m, (l - (n - 1)) / m])
    return window_transition(t)


# ---------------------------------------------------------------------------
# polynomial end extrapolation


@lru_cache(maxsize=32)
def _extension_stencils(n: int, p: int, m_ext: int):
    """Exact Lagrange extrapolation weights as Fractions.

    Returns (left, right): left[m][j] maps sample f_j (j < p) to the value at
    z_{m-M} (m = 0..M-1); right[m][j] maps f_{N-p+j} to the value at z_{N+m}.
    """
    h = Fraction(2, n - 1)

    def lagrange_row(stencil_nodes, z):
        row = []
        for j, zj in enumerate(stencil_nodes):
            w = Fraction(1)
            for mm, zm in enumerate(stencil_nodes):
                if mm != j:
                    w *= (z - zm) / (zj - zm)
            row.append(w)
        return row

    left_nodes = [-1 + j * h for j in range(p)]
    right_nodes = [-1 + (n - p + j) * h for j in range(p)]
    left = [lagrange_row(left_nodes, -1 + (m - m_ext) * h) for m in range(m_ext)]
    right = [lagrange_row(right_nodes, 1 + (m + 1) * h) for m in range(m_ext)]
    return left, right


def extrapolate_ends(samples: np.ndarray, params: FcParams) -> np.ndarray:
    """Extend N samples to the N+2M grid on [-b, b] by end-stencil extrapolation."""
    samples = np.asarray(samples, dtype=np.float64)
    n, p, m = params.n_points, params.poly_points, params.ext_points
    if samples.shape != (n,):
        raise ShapeError(f"expected {n} samples, got shape {samples.shape}")
    left, right = _extension_stencils(n, p, m)
    lmat = np.array([[float(w) for w in row] for row in left])
    rmat = np.array([[float(w) for w in row] for row in right])
    out = np.empty(n + 2 * m)
    out[:m] = lmat @ samples[:p]
    out[m : m + n] = samples
    out[m + n :] = rmat @ samples[-p:]
    return out


# ---------------------------------------------------------------------------
# periodic extension and Fourier coefficients


def periodic_extension(samples: np.ndarray, params: FcParams) -> PeriodicExtension:
    """Window the extrapolated samples and fold them with index period N+M."""
    n, m = params.n_points, params.ext_points
    ext = extrapolate_ends(samples, params) * window_values(params)
    folded = np.empty(n + m)
    folded[:n] = ext[m : m + n]
    # extension region: right tail at z_{N+mm} plus left tail folded up by T
    folded[n:] = ext[m + n :] + ext[:m]
    return PeriodicExtension(samples=folded, period_len=params.period_len)


def mode_numbers(length: int) -> np.ndarray:
    """Centered DFT mode numbers; even lengths carry both +-Nyquist (split)."""
    if length % 2:
        half = (length - 1) // 2
        return np.arange(-half, half + 1)
    half = length // 2
    return np.arange(-half, half + 1)


@dataclass(frozen=True)
class TrigSeries:
    """A real trigonometric polynomial sum_k coeffs[k] e^{2 pi i k (z+1)/T}."""

    modes: np.ndarray
    coeffs: np.ndarray
    period_len: float


def fc_coefficients(ext: PeriodicExtension) -> TrigSeries:
    """DFT coefficients of one period, normalized so the series interpolates.

    For an even number of samples the Nyquist coefficient is split evenly
    between +-Nyquist so that evaluation and differentiation stay real.
    """
    c = np.asarray(ext.samples, dtype=np.float64)
    length = c.shape[0]
    raw = np.fft.fft(c) / length
    modes = mode_numbers(length)
    coeffs = raw[np.mod(modes, length)].astype(np.complex128)
    if length % 2 == 0:
        coeffs[0] *= 0.5
        coeffs[-1] *= 0.5
    return TrigSeries(modes=modes, coeffs=coeffs, period_len=ext.period_len)


def evaluate_trig(series: TrigSeries, points: np.ndarray) -> np.ndarray:
    """Direct float64 summation of the series at arbitrary points."""
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    phase = np.exp(
        2j * np.pi * np.outer(pts + 1.0, series.modes) / series.period_len
    )
    return np.real(phase @ series.coeffs)


# ---------------------------------------------------------------------------
# basis construction


def _fold_matrix_dd(params: FcParams):
    """Extension block B (M x N dd) with folded+windowed end stencils."""
    n, p, m = params.n_points, params.poly_points, params.ext_points
    left, right = _extension_stencils(n, p, m)
    wstep = _window_transition_dd(m)
    b_hi = np.zeros((m, n))
    b_lo = np.zeros((m, n))
    B = DD(b_hi, b_lo)
    for mm in range(m):
        w_right = wstep[mm + 1]          # t = (mm+1)/M at z_{N+mm}
        w_left = wstep[m - mm]           # t = (M-mm)/M at z_{mm-M}
        for j in range(p):
            B[mm, n - p + j] = B[mm, n - p + j] + w_right * dd_from_fraction(right[mm][j])
            B[mm, j] = B[mm, j] + w_left * dd_from_fraction(left[mm][j])
    return B


@lru_cache(maxsize=8)
def build_basis(params: FcParams) -> FcBasis:
    """Apply the periodic extension to the canonical unit vectors.

    Column i of the coefficient matrix is the DFT of the extension of e_i;
    nodality phi_i(z_l) = delta_il holds because the window is exactly 1 on
    [-1, 1] and the fold only touches the extension region.
    """
    n, m = params.n_points, params.ext_points
    length = n + m
    window = window_values(params)

    if params.precision == "double":
        cols = np.empty((length, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            cols[:, i] = periodic_extension(e, params).samples
        raw = np.fft.fft(cols, axis=0) / length
        modes = mode_numbers(length)
        coeffs = raw[np.mod(modes, length), :].astype(np.complex128)
        if length % 2 == 0:
            coeffs[0] *= 0.5
            coeffs[-1] *= 0.5
        return FcBasis(
            params=params,
            modes=modes,
            coeffs=coeffs,
            period_len=params.period_len,
            window=window,
            coeffs_lo=None,
            label=params.label + ":double",
        )

    B = _fold_matrix_dd(params)
    w = roots_of_unity(length)
    modes = mode_numbers(length)
    n_modes = modes.shape[0]
    inv_len = dd_from_fraction(Fraction(1, length))

    acc = DDC.zeros((n_modes, n))
    # identity block: contribution omega^{-k l} at column l for l < n
    k_col = modes.reshape(-1, 1)
    l_row = np.arange(n).reshape(1, -1)
    idx = np.mod(-k_col * l_row, length)
    acc = acc + DDC(w.re.take(idx), w.im.take(idx))
    # extension block: sum_mm omega^{-k (n+mm)} B[mm, :]
    for mm in range(m):
        idx = np.mod(-modes * (n + mm), length)
        tw = DDC(w.re.take(idx), w.im.take(idx))
        row = B[mm]
        acc = acc + DDC(
            tw.re.reshape(-1, 1) * row.reshape(1, -1),
            tw.im.reshape(-1, 1) * row.reshape(1, -1),
        )
    acc = DDC(acc.re * inv_len, acc.im * inv_len)
    if length % 2 == 0:
        half = dd_from_fraction(Fraction(1, 2))
        acc[0] = acc[0] * half
        acc[n_modes - 1] = acc[n_modes - 1] * half

    coeffs = acc.re.hi + 1j * acc.im.hi
    coeffs_lo = acc.re.lo + 1j * acc.im.lo
    return FcBasis(
        params=params,
        modes=modes,
        coeffs=coeffs,
        period_len=params.period_len,
        window=window,
        coeffs_lo=coeffs_lo,
        label=params.label,
    )


def differentiate_basis(basis: FcBasis) -> FcBasis:
    """Coefficients of d(phi_i)/dz: multiply mode k by 2*pi*i*k/T."""
    n_total = basis.params.n_points + basis.params.ext_points
    if basis.coeffs_lo is None:
        factor = 2j * np.pi * basis.modes / basis.period_len
        return FcBasis(
            params=basis.params,
            modes=basis.modes,
            coeffs=basis.coeffs * factor[:, None],
            period_len=basis.period_len,
            window=basis.window,
            coeffs_lo=None,
            label=basis.label + ":ddz",
        )
    a = basis.coeffs_dd()
    # k/T = k (N-1) / (2 (N+M)), exact as a Fraction per mode
    n = basis.params.n_points
    scale = [
        dd_from_fraction(Fraction(int(k) * (n - 1), 2 * n_total)) for k in basis.modes
    ]
    fac = DD(
        np.array([s.hi for s in scale]).reshape(-1, 1),
        np.array([s.lo for s in scale]).reshape(-1, 1),
    ) * _TWO_PI
    deriv = DDC(-(a.im * fac), a.re * fac)
    return FcBasis(
        params=basis.params,
        modes=basis.modes,
        coeffs=deriv.re.hi + 1j * deriv.im.hi,
        period_len=basis.period_len,
        window=basis.window,
        coeffs_lo=deriv.re.lo + 1j * deriv.im.lo,
        label=basis.label + ":ddz",
    )


# ---------------------------------------------------------------------------
# evaluation


def _point_phases_dd(points: np.ndarray, params: FcParams) -> DDC:
    """e^{2 pi i (z+1)/T} per point, split to dd via mpmath."""
    with mp.workdps(50):
        t_mp = mp.mpf(2) * (params.n_points + params.ext_points) / (params.n_points - 1)
        cos_vals, sin_vals = [], []
        for z in np.atleast_1d(points):
            frac = (mp.mpf(float(z)) + 1) / t_mp
            cos_vals.append(mp.cospi(2 * frac))
            sin_vals.append(mp.sinpi(2 * frac))
        return DDC(DD.from_mp(cos_vals), DD.from_mp(sin_vals))


def evaluate_basis(basis: FcBasis, points) -> np.ndarray:
    """Values of all N basis functions at arbitrary points, (n_pts, N).

    Extended-precision bases are summed in double-double arithmetic (the
    coefficients reach ~1e7 and cancel to O(1) on [-1, 1]); float64 bases use
    a plain complex summation.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    if basis.coeffs_lo is None:
        phase = np.exp(2j * np.pi * np.outer(pts + 1.0, basis.modes) / basis.period_len)
        return np.real(phase @ basis.coeffs)

    a = basis.coeffs_dd()
    base = _point_phases_dd(pts, basis.params)
    n_pts, n = pts.shape[0], basis.n
    acc = DDC.zeros((n_pts, n))

    def add_mode(power: DDC, row: int):
        nonlocal acc
        coeff = a[row]
        acc = acc + DDC(
            power.re.reshape(-1, 1) * coeff.re.reshape(1, -1)
            - power.im.reshape(-1, 1) * coeff.im.reshape(1, -1),
            power.re.reshape(-1, 1) * coeff.im.reshape(1, -1)
            + power.im.reshape(-1, 1) * coeff.re.reshape(1, -1),
        )

    mode_row = {int(k): r for r, k in enumerate(basis.modes)}
    k_max = int(basis.modes.max())
    power = DDC(DD(np.ones(n_pts)), DD(np.zeros(n_pts)))
    for k in range(0, k_max + 1):
        if k in mode_row:
            add_mode(power, mode_row[k])
        power = power * base
    power = base.conj()
    for k in range(-1, int(basis.modes.min()) - 1, -1):
        add_mode(power, mode_row[k])
        power = power * base.conj()
    return acc.re.to_float()


def refined_grid_values_dd(basis: FcBasis, factor: int):
    """Like refined_grid_values but keeps the double-double value matrix."""
    if factor < 1:
        raise ParameterError("refinement factor must be >= 1")
    params = basis.params
    n, m = params.n_points, params.ext_points
    length = n + m
    order = factor * length
    n_q = (n - 1) * factor + 1
    z = -1.0 + (params.period_len / order) * np.arange(n_q)

    if basis.coeffs_lo is None:
        return z, DD(evaluate_basis(basis, z))

    w = roots_of_unity(order)
    a = basis.coeffs_dd()
    acc = DD.zeros((n_q, basis.n))
    pt_idx = np.arange(n_q)
    for row, k in enumerate(basis.modes):
        k = int(k)
        if k < 0:
            continue  # folded into the conjugate pair below
        idx = np.mod(k * pt_idx, order)
        tw = DDC(w.re.take(idx), w.im.take(idx))
        coeff = a[row]
        re_part = tw.re.reshape(-1, 1) * coeff.re.reshape(1, -1) - tw.im.reshape(
            -1, 1
        ) * coeff.im.reshape(1, -1)
        # real basis: mode -k is the conjugate, so the pair sums to 2 Re(...)
        acc = acc + (re_part if k == 0 else 2.0 * re_part)
    return z, acc


def refined_grid_values(basis: FcBasis, factor: int):
    """Basis values on the refined equispaced grid covering [-1, 1].

    The refined grid is the zero-padding refinement of the period grid by
    ``factor``; the (N-1)*factor + 1 points that land in [-1, 1] are
    returned together with the (n_q, N) value matrix.  Uses exact
    root-of-unity phase tables, so extended bases keep full dd accuracy.
    """
    z, vals = refined_grid_values_dd(basis, factor)
    return z, vals.to_float()
