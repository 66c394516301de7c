"""Vectorized double-double (~31 significant digits) arithmetic on numpy arrays.

The basis construction manipulates extension samples with magnitudes up to
~1e7 that cancel down to O(1) on the unit interval, so plain float64 loses
7+ digits there.  All heavy construction/assembly linear algebra therefore
runs on (hi, lo) pairs of float64 arrays; transcendental seed values (roots
of unity, window samples) come from mpmath and are split into pairs once.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    # requires |a| >= |b| (or a == 0)
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    """A double-double value or array: hi + lo with |lo| <= ulp(hi)/2."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=np.float64)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=np.float64)

    # -- constructors ------------------------------------------------------
    @staticmethod
    def from_mp(values) -> "DD":
        """Split mpmath scalars (or an iterable of them) into dd pairs."""
        if isinstance(values, (list, tuple)):
            his, los = [], []
            for v in values:
                hi = float(v)
                his.append(hi)
                los.append(float(v - mp.mpf(hi)))
            return DD(np.array(his), np.array(los))
        hi = float(values)
        return DD(hi, float(values - mp.mpf(hi)))

    @staticmethod
    def zeros(shape) -> "DD":
        return DD(np.zeros(shape), np.zeros(shape))

    # -- shape plumbing ----------------------------------------------------
    @property
    def shape(self):
        return self.hi.shape

    def __getitem__(self, idx):
        return DD(self.hi[idx], self.lo[idx])

    def __setitem__(self, idx, value: "DD"):
        self.hi[idx] = value.hi
        self.lo[idx] = value.lo

    def reshape(self, *shape):
        return DD(self.hi.reshape(*shape), self.lo.reshape(*shape))

    def take(self, indices):
        return DD(np.take(self.hi, indices), np.take(self.lo, indices))

    def copy(self):
        return DD(self.hi.copy(), self.lo.copy())

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __add__(self, other):
        if not isinstance(other, DD):
            s, e = _two_sum(self.hi, other)
            e = e + self.lo
            return DD(*_quick_two_sum(s, e))
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e = e + t
        s, e = _quick_two_sum(s, e)
        e = e + f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, DD) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DD):
            p, e = _two_prod(self.hi, other)
            e = e + self.lo * other
            return DD(*_quick_two_sum(p, e))
        p, e = _two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, DD):
            other = DD(other)
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        s, e = _two_sum(q1, q2)
        e = e + q3
        return DD(*_quick_two_sum(s, e))

    def sum0(self) -> "DD":
        """Pairwise-accurate sum over axis 0."""
        acc = self
        while acc.hi.shape[0] > 1:
            n = acc.hi.shape[0]
            m = n // 2
            s = acc[:m] + acc[m : 2 * m]
            if n % 2:
                s = DD(
                    np.concatenate([s.hi, acc.hi[-1:]]),
                    np.concatenate([s.lo, acc.lo[-1:]]),
                )
            acc = s
        return acc[0]


class DDC:
    """Complex double-double: a pair of DD parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: DD, im: DD):
        self.re = re
        self.im = im

    @staticmethod
    def zeros(shape):
        return DDC(DD.zeros(shape), DD.zeros(shape))

    def __getitem__(self, idx):
        return DDC(self.re[idx], self.im[idx])

    def __setitem__(self, idx, value: "DDC"):
        self.re[idx] = value.re
        self.im[idx] = value.im

    def __add__(self, other):
        return DDC(self.re + other.re, self.im + other.im)

    def __mul__(self, other):
        if isinstance(other, DD):
            return DDC(self.re * other, self.im * other)
        return DDC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self):
        return DDC(self.re, -self.im)

    def to_complex(self) -> np.ndarray:
        return self.re.to_float() + 1j * self.im.to_float()


@lru_cache(maxsize=32)
def roots_of_unity(order: int) -> DDC:
    """e^{2*pi*i*m/order} for m = 0..order-1 as dd pairs (mpmath-seeded)."""
    with mp.workdps(50):
        cos_vals = []
        sin_vals = []
        for m in range(order):
            c, s = mp.cospi(mp.mpf(2 * m) / order), mp.sinpi(mp.mpf(2 * m) / order)
            cos_vals.append(c)
            sin_vals.append(s)
        return DDC(DD.from_mp(cos_vals), DD.from_mp(sin_vals))


def dd_from_fraction(fr) -> DD:
    """Exact dd representation of a fractions.Fraction (or int)."""
    hi = float(fr)
    from fractions import Fraction

    lo = float(fr - Fraction(hi))
    return DD(hi, lo)
