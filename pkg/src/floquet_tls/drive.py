"""Periodic drives and the Fourier data of their phase function.

A drive is a real trigonometric polynomial with zero mean,

    f(t) = sum_a f_a exp(i n_a omega t),   n_a != 0,

and everything downstream is driven by the unimodular phase function
q(t) = exp(i int_0^t f) and its square.  This module computes the
coefficient tables of q and q^2 (by a degree-ordered multinomial
expansion, with single- and two-harmonic Bessel closed forms as an
independent cross-check), the phase constant gamma_f, the mean values
M(q^2) and M(Q_1), and the drive classification those means induce.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fourier import FourierSeries

__all__ = [
    "DriveSpec",
    "QData",
    "CaseLabel",
    "analyze_drive",
    "classify",
    "gamma_f",
    "q_coefficients",
    "q_coefficients_bessel",
    "q_decay_bound",
    "default_m_max",
    "bessel_j",
    "bessel_j0_zero",
]

_PRUNE_TOL = 1e-18


# ----------------------------------------------------------------------
# Bessel functions of the first kind, integer order, by power series.
# Kept self-contained so the closed-form route stays independent of the
# multinomial expansion it is used to cross-check.
# ----------------------------------------------------------------------

def bessel_j(m: int, x: float) -> float:
    """J_m(x) for integer m and real x, summed from the power series.

    J_m(x) = sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!), with
    J_{-m} = (-1)^m J_m.  Accurate for the moderate arguments used here
    (|x| up to ~20); the alternating terms are summed until they fall
    below 1e-18 of the running magnitude scale.
    """
    m = int(m)
    if m < 0:
        return (-1) ** (-m) * bessel_j(-m, x)
    half = 0.5 * x
    term = half**m / math.factorial(m)
    total = term
    scale_ref = max(abs(term), 1.0)
    for k in range(1, 400):
        term *= -(half * half) / (k * (k + m))
        total += term
        scale_ref = max(scale_ref, abs(total))
        if abs(term) < 1e-18 * scale_ref:
            break
    return total


def bessel_j0_zero(a: int = 1) -> float:
    """a-th positive zero of J_0, by bisection on the power series."""
    if a < 1:
        raise ValueError("zero index must be >= 1")
    # zeros of J_0 are separated by roughly pi; scan outward in small
    # steps until the a-th sign change is bracketed, then bisect
    step = 0.1
    x, fx = 0.5, bessel_j(0, 0.5)
    found = 0
    lo = hi = x
    f_lo = fx
    while found < a:
        x_next = x + step
        fx_next = bessel_j(0, x_next)
        if fx * fx_next < 0.0:
            found += 1
            lo, hi, f_lo = x, x_next, fx
        x, fx = x_next, fx_next
        if x > 1000.0:
            raise RuntimeError("failed to bracket requested zero")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = bessel_j(0, mid)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# Drive specification
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DriveSpec:
    """Real zero-mean periodic drive with finitely many harmonics.

    ``harmonics`` lists (n_a, f_a) pairs; reality demands that each
    mode n comes with the partner (-n, conj(f_n)).  The empty list is
    accepted as a degenerate test fixture (f identically zero).
    """

    omega: float
    harmonics: tuple[tuple[int, complex], ...] = ()

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")
        table: dict[int, complex] = {}
        for entry in self.harmonics:
            n, amp = int(entry[0]), complex(entry[1])
            if n == 0:
                raise ValueError("zero-frequency harmonic not allowed (F_0 must vanish)")
            if amp == 0:
                raise ValueError("harmonic amplitudes must be nonzero")
            if n in table:
                raise ValueError(f"duplicate harmonic index {n}")
            table[n] = amp
        for n, amp in table.items():
            partner = table.get(-n)
            if partner is None or abs(partner - amp.conjugate()) > 1e-13 * max(1.0, abs(amp)):
                raise ValueError("drive not real")
        ordered = tuple(sorted(table.items()))
        object.__setattr__(self, "harmonics", ordered)

    @classmethod
    def cos_sin(cls, omega: float, phi1: float, phi2: float = 0.0) -> "DriveSpec":
        """phi1*cos(omega t) + phi2*sin(omega t)."""
        f1 = 0.5 * (phi1 + 1j * phi2)     # amplitude of exp(-i omega t)
        if f1 == 0:
            return cls(omega, ())
        return cls(omega, ((-1, f1), (1, f1.conjugate())))

    @property
    def J(self) -> int:
        return len(self.harmonics) // 2

    @property
    def mode_set(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.harmonics)

    @property
    def calN(self) -> int:
        """Sum of |n_a| over all harmonics."""
        return sum(abs(n) for n, _ in self.harmonics)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def phi(self, scale: int = 1) -> float:
        """max_a |scale * f_a / (n_a omega)|, the expansion parameter."""
        if not self.harmonics:
            return 0.0
        return max(abs(scale * amp / (n * self.omega)) for n, amp in self.harmonics)

    def f_series(self) -> FourierSeries:
        return FourierSeries.from_dict(self.omega, dict(self.harmonics) or {0: 0.0})

    def evaluate_f(self, t):
        return self.f_series().evaluate(t)


def gamma_f(d: DriveSpec) -> float:
    """Phase constant i * sum_a f_a / (n_a omega); real for a real drive."""
    raw = 1j * sum(amp / (n * d.omega) for n, amp in d.harmonics)
    if abs(raw.imag) > 1e-13 * max(1.0, abs(raw)):
        raise ValueError("drive not real")
    return float(raw.real)


# ----------------------------------------------------------------------
# Coefficients of q = exp(i int f) and q^2
# ----------------------------------------------------------------------

def _degree_cutoff(phi_s: float, two_j: int, s_total: float) -> int:
    """First degree whose remaining multinomial mass is below the prune level.

    Two sound tail estimates are combined: the coarse
    phi^p (2J)^p / ceil(p/2J)! rule (guarantees termination on its own)
    and the exact per-degree mass bound e^s s^p / p!, whichever triggers
    first.
    """
    if s_total == 0.0:
        return 1
    for p in range(1, 100000):
        log_coarse = (math.log(phi_s * two_j) * p
                      - math.lgamma(math.ceil(p / two_j) + 1)) if phi_s * two_j > 0 else -math.inf
        log_exact = s_total + p * math.log(s_total) - math.lgamma(p + 1)
        if min(log_coarse, log_exact) < math.log(_PRUNE_TOL):
            return p
    raise RuntimeError("multinomial degree cutoff not reached")


def q_coefficients(d: DriveSpec, m_max: int, scale: int = 1) -> FourierSeries:
    """Fourier table of q (scale=1) or q^2 (scale=2) for |m| <= m_max.

    Implements the multinomial expansion

        Q_m = e^{i scale gamma_f} sum_{p_1..p_{2J}} delta(sum p_b n_b, m)
              prod_a (scale f_a/(n_a omega))^{p_a} / p_a!

    summed by total degree p = sum p_a, outward, until the tail bound
    drops below 1e-18.  Each degree slice is accumulated by convolving
    the single-harmonic exponential columns, which enumerates exactly
    the compositions of p across harmonics.  The degree tail and any
    mass landing beyond the requested window are booked as dropped.
    """
    if scale not in (1, 2):
        raise ValueError("scale must be 1 or 2")
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    gamma = gamma_f(d)
    prefactor = cmath.exp(1j * scale * gamma)
    if not d.harmonics:
        return FourierSeries.from_dict(d.omega, {0: prefactor}, m_max=m_max)

    xs = [(n, scale * amp / (n * d.omega)) for n, amp in d.harmonics]
    s_total = sum(abs(x) for _, x in xs)
    phi_s = d.phi(scale)
    two_j = len(xs)
    p_cut = _degree_cutoff(phi_s, two_j, s_total)

    n_abs_max = max(abs(n) for n, _ in xs)
    window = m_max + p_cut * n_abs_max     # no reachable mode escapes
    width = 2 * window + 1
    table = np.zeros((p_cut + 1, width), dtype=np.complex128)
    table[0, window] = 1.0
    for n, x in xs:
        new = np.zeros_like(table)
        xk = 1.0 + 0.0j
        for k in range(0, p_cut + 1):
            if k > 0:
                xk *= x / k
            shift = k * n
            lo_dst, hi_dst = max(0, shift), width + min(0, shift)
            lo_src, hi_src = max(0, -shift), width - max(0, shift)
            if lo_dst >= hi_dst:
                continue
            new[k:, lo_dst:hi_dst] += xk * table[: p_cut + 1 - k, lo_src:hi_src]
        table = new

    summed = table.sum(axis=0)
    lo = window - m_max
    hi = window + m_max + 1
    outside = float(np.sum(np.abs(summed[:lo])) + np.sum(np.abs(summed[hi:])))
    tail = math.exp(s_total) * s_total ** (p_cut + 1) / math.factorial(p_cut + 1)
    coeffs = prefactor * summed[lo:hi]
    return FourierSeries(d.omega, coeffs, dropped=outside + tail)


def _bessel_k_window(arg: float) -> int:
    """Order beyond which J_k(arg) is below 1e-22 (factorial decay)."""
    k = 4
    while (abs(0.5 * arg) ** k) / math.factorial(k) > 1e-22 and k < 400:
        k += 1
    return k


def q_coefficients_bessel(d: DriveSpec, m_max: int, scale: int = 1) -> FourierSeries:
    """Closed-form Bessel evaluation of the q (or q^2) table.

    Available for the single-harmonic drive on modes {-1, +1} and the
    two-harmonic drive on modes {-2, -1, +1, +2}; anything else has no
    closed form here.  Used as an independent oracle for
    :func:`q_coefficients`.
    """
    if scale not in (1, 2):
        raise ValueError("scale must be 1 or 2")
    prefactor = cmath.exp(1j * scale * gamma_f(d))
    table = dict(d.harmonics)
    if d.mode_set == (-1, 1):
        f1 = table[-1]
        zeta = (f1.conjugate() / abs(f1))
        arg = 2.0 * scale * abs(f1) / d.omega
        coeffs = {m: prefactor * zeta**m * bessel_j(m, arg)
                  for m in range(-m_max, m_max + 1)}
        return FourierSeries.from_dict(d.omega, coeffs, m_max=m_max)
    if d.mode_set == (-2, -1, 1, 2):
        f1, f2 = table[-1], table[-2]
        zeta1 = f1.conjugate() / abs(f1)
        zeta2 = f2.conjugate() / abs(f2)
        arg1 = 2.0 * scale * abs(f1) / d.omega
        arg2 = scale * abs(f2) / d.omega
        k_win = _bessel_k_window(arg2)
        j2 = {k: bessel_j(k, arg2) for k in range(-k_win, k_win + 1)}
        coeffs = {}
        for m in range(-m_max, m_max + 1):
            acc = 0.0 + 0.0j
            for k in range(-k_win, k_win + 1):
                acc += zeta1 ** (m - 2 * k) * zeta2**k * bessel_j(m - 2 * k, arg1) * j2[k]
            coeffs[m] = prefactor * acc
        return FourierSeries.from_dict(d.omega, coeffs, m_max=m_max)
    raise ValueError("no closed form")


def q_decay_bound(d: DriveSpec, m: int, scale: int = 1) -> float:
    """A priori decay bound on |Q_m| (|Q^(2)_m| for scale=2).

    2J e^{(2J-1) phi} phi^L / L! * (1 - phi/(L+1))^{-1} with
    L = ceil(|m| / calN); returns inf where the bound's validity
    condition L + 1 > phi fails.
    """
    if not d.harmonics:
        return math.inf if m != 0 else 1.0
    phi_s = d.phi(scale)
    two_j = 2 * d.J
    ell = math.ceil(abs(m) / d.calN)
    if ell + 1 <= phi_s:
        return math.inf
    return (two_j * math.exp((two_j - 1) * phi_s)
            * phi_s**ell / math.factorial(ell)
            / (1.0 - phi_s / (ell + 1)))


def default_m_max(d: DriveSpec, target: float = 1e-14) -> int:
    """Smallest window for which the decay bound predicts |Q^(2)_m| < target."""
    m = 8
    while m < 1024 and not q_decay_bound(d, m, scale=2) < target:
        m += 1
    return m


# ----------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------

class CaseLabel(str, Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class QData:
    """Phase-function data derived from a drive.

    Q and Q2 are the coefficient tables of q and q^2; M_q2 = Q2[0] and
    M_Q1 is the mean of Q_1(t) = q^2 int_0^t q^{-2} (meaningful when
    M_q2 vanishes; it is purely imaginary).  ``case_label`` follows the
    mean values: CaseI when M(q^2) is away from zero, CaseII when it
    vanishes but M(Q_1) does not, Unsupported otherwise.
    """

    drive: DriveSpec
    Q: FourierSeries
    Q2: FourierSeries
    gamma_f: float
    M_q2: complex
    M_Q1: complex
    case_label: CaseLabel
    phi: float
    calN: int
    tol_case: float

    @property
    def omega(self) -> float:
        return self.drive.omega


def _mean_Q1(Q2: FourierSeries, omega: float) -> complex:
    # (i/omega) * sum_{m != 0} |Q2_m|^2 / m, summed in (m, -m) pairs so
    # the symmetric single-harmonic case cancels exactly
    acc = 0.0
    for m in range(1, Q2.m_max + 1):
        acc += (abs(Q2[m]) ** 2 - abs(Q2[-m]) ** 2) / m
    return 1j * acc / omega


def analyze_drive(d: DriveSpec, m_max: int | None = None,
                  tol_case: float = 1e-9) -> QData:
    """Compute the full phase-function data set and classify the drive."""
    if m_max is None:
        m_max = default_m_max(d)
    gamma = gamma_f(d)
    Q = q_coefficients(d, m_max, scale=1)
    Q2 = q_coefficients(d, m_max, scale=2)
    M_q2 = Q2[0]
    M_Q1 = _mean_Q1(Q2, d.omega)
    threshold = tol_case * max(Q2.l1(), 1e-300)
    if abs(M_q2) > threshold:
        label = CaseLabel.CASE_I
    elif abs(M_Q1) > threshold:
        label = CaseLabel.CASE_II
    else:
        label = CaseLabel.UNSUPPORTED
    return QData(drive=d, Q=Q, Q2=Q2, gamma_f=gamma, M_q2=M_q2, M_Q1=M_Q1,
                 case_label=label, phi=d.phi(), calN=d.calN, tol_case=tol_case)


def classify(qd: QData) -> tuple[CaseLabel, dict]:
    """Case label plus the measured mean values behind the decision."""
    diagnostics = {
        "abs_M_q2": abs(qd.M_q2),
        "abs_M_Q1": abs(qd.M_Q1),
        "threshold": qd.tol_case * max(qd.Q2.l1(), 1e-300),
        "gamma_f": qd.gamma_f,
        "m_max": qd.Q.m_max,
    }
    return qd.case_label, diagnostics
