"""Growth and decay diagnostics: Catalan bounds, the convolution lemma,
and exponential decay fits for coefficient tables.

Every table this artifact produces is supposed to obey

    |c_m|  <=  C * exp(-chi |m|) / <m>^2,         <m> := max(|m|, 1)

with per-order constants K_n that grow at most exponentially in n.  The
functions here compute the combinatorial side exactly (Catalan numbers,
the K_n/L_n recursions), the convolution-lemma constant B_0 by direct
summation, and least constants / fitted decay rates for concrete
tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import FourierSeries

__all__ = [
    "catalan",
    "catalan_recursion",
    "k_sequence",
    "k_sequence_log",
    "l_closed_form",
    "conv_bound",
    "b0_constant",
    "DecayFit",
    "decay_fit",
    "fit_chi",
    "root_test_base",
    "novomod",
]


def novomod(m: int) -> int:
    """The weight <m>: |m| for m != 0 and 1 for m = 0."""
    return abs(m) if m != 0 else 1


# ----------------------------------------------------------------------
# Catalan numbers and the K_n / L_n recursions
# ----------------------------------------------------------------------

def catalan(n: int) -> int:
    """Closed form (2n-4)! / ((n-1)!(n-2)!) for n >= 2 (exact integers)."""
    if n < 2:
        raise ValueError("closed form defined for n >= 2")
    return math.factorial(2 * n - 4) // (math.factorial(n - 1) * math.factorial(n - 2))


def catalan_recursion(n_max: int) -> list[int]:
    """[c_1 .. c_n_max] from c_1 = c_2 = 1, c_n = sum_{p=2}^{n-1} c_p c_{n-p+1}."""
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    c = [0, 1, 1]                      # 1-indexed scratch
    for n in range(3, n_max + 1):
        c.append(sum(c[p] * c[n - p + 1] for p in range(2, n)))
    return c[1:n_max + 1]


def k_sequence(C1, C2, n_max: int):
    """K_1..K_n and the dominating L_1..L_n for given constants.

    K follows K_1 = K_2 = C1,
    K_n = C2 * (sum_{p=1}^{n-1} K_p K_{n-p} + sum_{p=2}^{n-1} K_p K_{n+1-p}),
    and L_n is the Catalan-closed majorant C1^(n-1) (3 C2)^(n-2) c_n.
    Integer inputs are propagated exactly (Python integers never
    overflow); float inputs that would overflow fall back to inf, with
    log-space values always available via ``k_sequence_log``.
    """
    if C1 < 1 or C2 < 1:
        raise ValueError("constants must be >= 1")
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    K = [None, C1, C1]
    for n in range(3, n_max + 1):
        s1 = sum(K[p] * K[n - p] for p in range(1, n))
        s2 = sum(K[p] * K[n + 1 - p] for p in range(2, n))
        K.append(C2 * (s1 + s2))
    L = [None, C1] + [l_closed_form(C1, C2, n) for n in range(2, n_max + 1)]
    return K[1:], L[1:]


def l_closed_form(C1, C2, n: int):
    """L_n = C1^(n-1) (3 C2)^(n-2) (2n-4)!/((n-1)!(n-2)!), n >= 2."""
    return C1 ** (n - 1) * (3 * C2) ** (n - 2) * catalan(n)


def k_sequence_log(C1: float, C2: float, n_max: int) -> list[float]:
    """log K_n, computed stably for ranges where K_n itself overflows."""
    if C1 < 1 or C2 < 1:
        raise ValueError("constants must be >= 1")
    logs = [None, math.log(C1), math.log(C1)]
    lc2 = math.log(C2)
    for n in range(3, n_max + 1):
        terms = [logs[p] + logs[n - p] for p in range(1, n)]
        terms += [logs[p] + logs[n + 1 - p] for p in range(2, n)]
        m = max(terms)
        logs.append(lc2 + m + math.log(sum(math.exp(t - m) for t in terms)))
    return logs[1:]


# ----------------------------------------------------------------------
# Convolution lemma
# ----------------------------------------------------------------------

def conv_bound(m: int, chi: float, cutoff: int = 2000, k: int = 2) -> float:
    """B(m) = sum_n exp(-chi(|m-n| + |n|)) / (<m-n>^k <n>^k), truncated.

    Computed as a function of |m| so the exact symmetry B(m) = B(-m)
    holds bit for bit.  k = 2 is the lemma as used everywhere; k = 3 is
    the generalized variant.
    """
    if chi <= 0:
        raise ValueError("chi must be positive")
    if cutoff < 100:
        raise ValueError("cutoff must be >= 100")
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    mm = abs(int(m))
    ns = np.arange(-cutoff, cutoff + 1)
    wn = np.abs(ns).astype(np.float64)
    wn[cutoff] = 1.0
    wmn = np.abs(mm - ns).astype(np.float64)
    wmn[wmn == 0] = 1.0
    total = np.exp(-chi * (np.abs(mm - ns) + np.abs(ns))) / (wmn**k * wn**k)
    return float(np.sum(total))


def b0_constant(chi: float, cutoff: int = 2000) -> float:
    """The lemma's constant B_0 = 2 B_1 + 8 sum_{n>=0} 1/<n>^2.

    B_1 = sum_{n>=1} exp(-2 chi n)/n^2; both sums truncated at
    ``cutoff`` (the omitted tails only make the reported constant
    smaller, i.e. the check against it stricter).
    """
    ns = np.arange(1, cutoff + 1, dtype=np.float64)
    b1 = float(np.sum(np.exp(-2.0 * chi * ns) / ns**2))
    s = 1.0 + float(np.sum(1.0 / ns**2))
    return 2.0 * b1 + 8.0 * s


# ----------------------------------------------------------------------
# Decay fits
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    constant: float
    worst_m: int
    passed: bool


def decay_fit(table: FourierSeries, chi: float) -> DecayFit:
    """Least constant C with |c_m| <= C exp(-chi|m|)/<m>^2 on the table."""
    mags = np.abs(table.coeffs)
    if mags.size == 0 or not np.any(mags > 0):
        return DecayFit(0.0, 0, True)
    modes = table.modes()
    weights = np.maximum(np.abs(modes), 1).astype(np.float64)
    needed = mags * weights**2 * np.exp(chi * np.abs(modes))
    idx = int(np.argmax(needed))
    c = float(needed[idx])
    return DecayFit(c, int(modes[idx]), bool(np.isfinite(c)))


def fit_chi(table: FourierSeries, c_cap: float = 1e3,
            floor_rel: float = 1e-14, chi_hi: float = 60.0) -> float:
    """Largest chi for which the decay constant stays below ``c_cap``.

    Only modes above ``floor_rel`` times the sup magnitude take part
    (entries at the numerical noise floor would otherwise drag the
    fitted rate to zero information).  The constant is monotone in chi,
    so a bisection suffices.
    """
    mags = np.abs(table.coeffs)
    sup = float(np.max(mags)) if mags.size else 0.0
    if sup == 0.0:
        return chi_hi
    modes = table.modes()
    keep = mags >= floor_rel * sup
    absm = np.abs(modes[keep]).astype(np.float64)
    log_base = np.log(mags[keep]) + 2.0 * np.log(np.maximum(absm, 1.0))
    log_cap = math.log(c_cap)

    def log_constant(chi: float) -> float:
        return float(np.max(log_base + chi * absm))

    if log_constant(chi_hi) <= log_cap:
        return chi_hi
    lo, hi = 0.0, chi_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if log_constant(mid) <= log_cap:
            lo = mid
        else:
            hi = mid
    return lo


def root_test_base(constants: list[float]) -> float:
    """max_n C_n^(1/n) over the given per-order constants (1-indexed)."""
    vals = [c ** (1.0 / n) for n, c in enumerate(constants, start=1) if c > 0.0]
    return max(vals) if vals else 0.0
