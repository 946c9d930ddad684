"""Truncated complex Fourier series on a single base frequency.

A series is a dense table of complex amplitudes for the modes
-m_max .. +m_max of exp(i*m*omega*t).  All arithmetic here is exact on
the stored modes; whenever a product or an exponential pushes amplitude
beyond the retained window, the absolute value of everything discarded
is accumulated in the ``dropped`` budget of the result, so downstream
code can always tell how much mass it has thrown away.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FourierSeries",
    "add",
    "scale",
    "conjugate_series",
    "convolve",
    "differentiate",
    "exp_neg_series",
    "mean_value",
]

_OMEGA_RTOL = 1e-12


@dataclass(frozen=True)
class FourierSeries:
    """Finite two-sided Fourier table: sum_m coeffs[m] * exp(i m omega t).

    ``coeffs`` has odd length 2*m_max + 1 and is indexed so that
    ``coeffs[k]`` is the amplitude of mode ``k - m_max``.  ``dropped``
    carries the accumulated absolute mass truncated away by earlier
    operations (it is advisory, never used in arithmetic).
    """

    omega: float
    coeffs: np.ndarray
    dropped: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.size % 2 == 0:
            raise ValueError("coefficient table must be 1-d with odd length")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # -- construction -------------------------------------------------

    @classmethod
    def from_dict(cls, omega: float, table: dict[int, complex],
                  m_max: int | None = None, dropped: float = 0.0) -> "FourierSeries":
        """Build a series from a sparse {mode: amplitude} mapping."""
        if m_max is None:
            m_max = max((abs(m) for m in table), default=0)
        coeffs = np.zeros(2 * m_max + 1, dtype=np.complex128)
        lost = 0.0
        for m, c in table.items():
            if abs(m) <= m_max:
                coeffs[m + m_max] += c
            else:
                lost += abs(c)
        return cls(omega, coeffs, dropped + lost)

    @classmethod
    def zero(cls, omega: float) -> "FourierSeries":
        return cls(omega, np.zeros(1, dtype=np.complex128))

    @classmethod
    def one(cls, omega: float) -> "FourierSeries":
        return cls(omega, np.ones(1, dtype=np.complex128))

    # -- basic queries ------------------------------------------------

    @property
    def m_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    def modes(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1)

    def __getitem__(self, m: int) -> complex:
        """Amplitude of mode m; modes outside the window are exactly 0."""
        if abs(m) > self.m_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[m + self.m_max])

    def l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def sup(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def evaluate(self, t):
        """Evaluate the series at scalar or array times (exact summation)."""
        ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
        phases = np.exp(1j * self.omega * np.outer(ts, self.modes()))
        out = phases @ self.coeffs
        if np.isscalar(t) or np.ndim(t) == 0:
            return complex(out[0])
        return out

    def reality_defect(self) -> float:
        """max |c_m - conj(c_-m)|; zero for a real-valued signal."""
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))))

    # -- reshaping ----------------------------------------------------

    def truncated(self, new_m_max: int) -> "FourierSeries":
        """Crop (or zero-pad) the mode window; cropped mass goes to ``dropped``."""
        m = self.m_max
        if new_m_max >= m:
            pad = new_m_max - m
            coeffs = np.pad(self.coeffs, (pad, pad))
            return FourierSeries(self.omega, coeffs, self.dropped)
        lo = m - new_m_max
        hi = m + new_m_max + 1
        lost = float(np.sum(np.abs(self.coeffs[:lo])) + np.sum(np.abs(self.coeffs[hi:])))
        return FourierSeries(self.omega, self.coeffs[lo:hi], self.dropped + lost)


def _check_same_omega(a: FourierSeries, b: FourierSeries) -> None:
    if abs(a.omega - b.omega) > _OMEGA_RTOL * max(a.omega, b.omega):
        raise ValueError("incompatible base frequency")


def add(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    """Coefficientwise sum (windows are united, never cropped)."""
    _check_same_omega(a, b)
    m = max(a.m_max, b.m_max)
    coeffs = np.zeros(2 * m + 1, dtype=np.complex128)
    coeffs[m - a.m_max: m + a.m_max + 1] += a.coeffs
    coeffs[m - b.m_max: m + b.m_max + 1] += b.coeffs
    return FourierSeries(a.omega, coeffs, a.dropped + b.dropped)


def scale(s: FourierSeries, z: complex) -> FourierSeries:
    return FourierSeries(s.omega, s.coeffs * z, s.dropped * abs(z))


def conjugate_series(s: FourierSeries) -> FourierSeries:
    """Series of conj(s(t)) for real t: conjugate amplitudes, negate modes."""
    return FourierSeries(s.omega, np.conj(s.coeffs[::-1]), s.dropped)


def differentiate(s: FourierSeries) -> FourierSeries:
    """Exact termwise derivative: mode m picks up a factor i*m*omega."""
    return FourierSeries(s.omega, s.coeffs * (1j * s.omega * s.modes()),
                         s.dropped * s.omega * (s.m_max + 1))


def mean_value(s: FourierSeries) -> complex:
    """Time average over one period: the mode-0 amplitude."""
    return s[0]


def convolve(a: FourierSeries, b: FourierSeries,
             m_cap: int | None = None) -> FourierSeries:
    """Coefficient table of the pointwise product a(t)*b(t).

    The full result lives on modes up to a.m_max + b.m_max; if ``m_cap``
    is smaller, the excess is cropped and booked as dropped mass.  The
    inherited budgets of the inputs propagate multiplicatively (a lost
    amplitude in ``a`` multiplies anything in ``b``).
    """
    _check_same_omega(a, b)
    full = np.convolve(a.coeffs, b.coeffs)
    dropped = a.dropped * b.l1() + b.dropped * a.l1() + a.dropped * b.dropped
    out = FourierSeries(a.omega, full, dropped)
    if m_cap is not None and m_cap < out.m_max:
        out = out.truncated(m_cap)
    return out


def exp_neg_series(h: FourierSeries, p_max: int = 40,
                   m_cap: int | None = None, tol: float = 1e-16) -> FourierSeries:
    """Coefficient table of exp(-h(t)) for a zero-mean exponent h.

    Sums the factorial series 1 + sum_p (-1)^p h^p / p! with the p-fold
    products formed by repeated convolution.  The sum stops once the sup
    of the current term's amplitudes falls below ``tol`` (factorial
    damping makes that certain) or at ``p_max``.  A nonzero mean mode
    would exponentiate into a non-periodic factor, so it is refused; the
    caller is expected to strip it and apply the scalar prefactor.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if abs(h[0]) > 1e-13 * max(1.0, h.l1()):
        raise ValueError("secular mode in exponent")
    if m_cap is None:
        m_cap = max(4 * h.m_max, 8)
    result = FourierSeries.one(h.omega).truncated(m_cap)
    result = FourierSeries(h.omega, result.coeffs, h.dropped)
    term = FourierSeries.one(h.omega)
    for p in range(1, p_max + 1):
        term = scale(convolve(term, h, m_cap=m_cap), -1.0 / p)
        result = add(result, term)
        if term.sup() < tol:
            break
    return result
