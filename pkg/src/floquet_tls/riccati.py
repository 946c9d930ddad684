"""Secular-free perturbative solution of the generalized Riccati equation.

The equation g' - i g^2 - 2 i f g + i eps^2 = 0 is solved as a power
series g = q * sum_n c_n eps^n (Case I) or g = q * sum_n e_n eps^{2n}
(Case II).  The per-order Fourier tables C^(n) / E^(n) follow closed
recursions in which every integration constant has already been fixed
to kill secular growth; all denominators are n*omega with n != 0, so
nothing small is ever divided by.

Conventions used throughout: per-order tables share one mode window
m_max; the quadratic convolution sums take their natural support
2*m_max; Q tables keep their own (usually wider) window.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .drive import CaseLabel, DriveSpec, QData
from .fourier import FourierSeries, add, convolve, scale

__all__ = [
    "PerturbativeSolution",
    "case1_coefficients",
    "case2_coefficients",
    "g_series",
    "riccati_residual",
    "radius_estimate",
    "principal_alpha1",
]


@dataclass(frozen=True)
class PerturbativeSolution:
    """Per-order Fourier data of the Riccati solution, eps-independent.

    ``coeff[k]`` is the table of order k+1 (C^(n) or E^(n)); ``G[k]``
    the corresponding table of q * c_n, i.e. the order-n slice of g
    itself.  ``eps_power_step`` is 1 in Case I and 2 in Case II: order n
    enters g with the power eps**(step * n).
    """

    case_label: CaseLabel
    order: int
    coeff: tuple[FourierSeries, ...]
    G: tuple[FourierSeries, ...]
    eps_power_step: int
    qdata: QData
    alpha1: complex | None = None
    calR: complex | None = None

    def coeff_at(self, n: int) -> FourierSeries:
        return self.coeff[n - 1]

    def g_order(self, n: int) -> FourierSeries:
        return self.G[n - 1]

    def g_series(self, eps: float) -> FourierSeries:
        return g_series(self, eps)


def principal_alpha1(M_q2: complex, sign: int = 1) -> complex:
    """Solution of alpha^2 = conj(M)/M on the unit circle.

    The principal square root (argument halved into (-pi/2, pi/2]) is
    taken; ``sign=-1`` selects the opposite branch, which generates the
    second independent solution.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * cmath.sqrt(M_q2.conjugate() / M_q2)


def _mode_dot(a: FourierSeries, b: FourierSeries) -> complex:
    """Zero mode of a*b: sum_k a_k b_{-k}, without forming the product."""
    ma, mb = a.m_max, b.m_max
    m = min(ma, mb)
    sa = a.coeffs[ma - m: ma + m + 1]
    sb = b.coeffs[mb - m: mb + m + 1]
    return complex(np.dot(sa, sb[::-1]))


def _divide_by_mode(a: FourierSeries) -> FourierSeries:
    """Map A_m -> A_m / (m * omega) for m != 0, zeroing the mean mode."""
    modes = a.modes().astype(np.float64)
    modes[a.m_max] = math.inf
    return FourierSeries(a.omega, a.coeffs / (modes * a.omega), a.dropped / a.omega)


def _reversed_series(a: FourierSeries) -> FourierSeries:
    """Index reversal A_m -> A_{-m} (no conjugation)."""
    return FourierSeries(a.omega, a.coeffs[::-1], a.dropped)


def case1_coefficients(qd: QData, N: int, m_max: int | None = None,
                       alpha_sign: int = 1, tol: float | None = None) -> PerturbativeSolution:
    """Tables C^(1..N) and G^(1..N) for a Case I drive.

    Order 1 is alpha_1 * Q.  Order 2 couples the mismatch between
    alpha_1^2 q^2 and q^{-2} through a single harmonic sum; orders
    n >= 3 convolve all lower-order pairs, divide by the harmonic index,
    and subtract the Q-proportional correction whose scalar weights are
    the zero modes of those convolutions.  The subtraction terms carry
    the 1/Q^(2)_0 factors, which is why the drive must sit safely inside
    Case I.
    """
    if N < 1:
        raise ValueError("order must be >= 1")
    Q, Q2 = qd.Q, qd.Q2
    omega = qd.omega
    if tol is None:
        tol = qd.tol_case * max(Q2.l1(), 1e-300)
    M = Q2[0]
    if abs(M) <= tol:
        raise ValueError("Case I denominator vanishes")
    if m_max is None:
        m_max = Q.m_max
    alpha1 = principal_alpha1(M, alpha_sign)
    Qt = Q.truncated(m_max)

    tables: list[FourierSeries] = [scale(Qt, alpha1)]
    if N >= 2:
        # W_n = (alpha1^2 Q2_n - conj(Q2_{-n})) / (n omega), n != 0
        qm2 = FourierSeries(omega, np.conj(Q2.coeffs[::-1]), Q2.dropped)
        W = _divide_by_mode(add(scale(Q2, alpha1**2), scale(qm2, -1.0)))
        W = W.truncated(min(W.m_max, 2 * m_max))
        sigma = _mode_dot(W, Q2)
        C2 = add(convolve(W, Q, m_cap=m_max), scale(Qt, -sigma / M))
        tables.append(C2)
    for n in range(3, N + 1):
        acc = None
        for p in range(1, n):
            prod = convolve(tables[p - 1], tables[n - p - 1])
            acc = prod if acc is None else add(acc, prod)
        B = _divide_by_mode(acc)
        corr = _mode_dot(B, Q2)
        dd = sum(_mode_dot(tables[p - 1], tables[n - p]) for p in range(2, n))
        Cn = add(convolve(B, Q, m_cap=m_max),
                 scale(Qt, -corr / M - dd / (2.0 * alpha1 * M)))
        tables.append(Cn)

    G = tuple(convolve(Q, c) for c in tables)
    return PerturbativeSolution(case_label=CaseLabel.CASE_I, order=N,
                                coeff=tuple(tables), G=G, eps_power_step=1,
                                qdata=qd, alpha1=alpha1)


def case2_coefficients(qd: QData, N: int, m_max: int | None = None,
                       tol: float | None = None) -> PerturbativeSolution:
    """Tables E^(1..N) and G^(1..N) for a Case II drive.

    The role of Q^(2)_0 is taken over by the mean of
    Q_1(t) = q^2 int_0^t q^{-2}: every order adds the Q-proportional
    constant that kills the mean of the next order's integrand, and
    those constants are normalized by i M(Q_1) or 2i M(Q_1).  Order 1
    carries the recurring constant calR.

    For n >= 2 the constant is computed directly from the secular-kill
    rule, 2 M(e_1 e_n) + sum_{p=2}^{n-1} M(e_p e_{n+1-p}) = 0, using
    M(e_1 q) = -i M(Q_1); the equivalent closed bracket can be written
    in several index arrangements and this form is the one that
    reproduces the eps^(2n+2) residual order at every n.
    """
    if N < 1:
        raise ValueError("order must be >= 1")
    Q, Q2 = qd.Q, qd.Q2
    omega = qd.omega
    if tol is None:
        tol = qd.tol_case * max(Q2.l1(), 1e-300)
    M1 = qd.M_Q1
    if abs(M1) <= tol:
        raise ValueError("Case II denominator vanishes")
    if m_max is None:
        m_max = Q.m_max
    Qt = Q.truncated(m_max)

    # Y_n = conj(Q2_n)/(n omega); its reversal turns the shifted sums
    # over Q_{m+n} into ordinary convolutions
    Y = _divide_by_mode(FourierSeries(omega, np.conj(Q2.coeffs), Q2.dropped))
    Yr = _reversed_series(Y)
    YY = convolve(Y, Y)
    T = _mode_dot(Q2, _reversed_series(YY))
    calR = T / (2j * M1)

    tables: list[FourierSeries] = [add(convolve(Q, Yr, m_cap=m_max), scale(Qt, calR))]
    G1 = convolve(Q, tables[0])
    for n in range(2, N + 1):
        acc = None
        for p in range(1, n):
            prod = convolve(tables[p - 1], tables[n - p - 1])
            acc = prod if acc is None else add(acc, prod)
        B = _divide_by_mode(acc)
        dd = sum(_mode_dot(tables[p - 1], tables[n + 1 - p - 1]) for p in range(2, n))
        b_n = (_mode_dot(G1, B) + 0.5 * dd) / (1j * M1)
        En = add(convolve(B, Q, m_cap=m_max), scale(Qt, b_n))
        tables.append(En)

    G = (G1,) + tuple(convolve(Q, e) for e in tables[1:])
    return PerturbativeSolution(case_label=CaseLabel.CASE_II, order=N,
                                coeff=tuple(tables), G=G, eps_power_step=2,
                                qdata=qd, calR=calR)


def g_series(ps: PerturbativeSolution, eps: float) -> FourierSeries:
    """Assemble g's Fourier table at a concrete eps from the order slices."""
    if ps.order >= 4 and eps != 0.0:
        r = radius_estimate(ps)
        if math.isfinite(r) and abs(eps) > r:
            warnings.warn(f"|eps|={abs(eps):.3g} exceeds the estimated "
                          f"convergence radius {r:.3g}", stacklevel=2)
    out = scale(ps.G[0], eps ** ps.eps_power_step)
    for n in range(2, ps.order + 1):
        out = add(out, scale(ps.G[n - 1], eps ** (ps.eps_power_step * n)))
    return out


def riccati_residual(g: FourierSeries, d: DriveSpec, eps: float,
                     grid: int = 1024) -> float:
    """sup_t |g' - i g^2 - 2 i f g + i eps^2| over one period.

    g' is evaluated by exact termwise differentiation; the quadratic
    terms pointwise, so the only error probed is that of g itself.
    """
    from .fourier import differentiate

    ts = np.linspace(0.0, 2.0 * math.pi / g.omega, grid, endpoint=False)
    gv = g.evaluate(ts)
    gp = differentiate(g).evaluate(ts)
    fv = d.f_series().evaluate(ts)
    res = gp - 1j * gv * gv - 2j * fv * gv + 1j * eps**2
    return float(np.max(np.abs(res)))


def radius_estimate(ps: PerturbativeSolution) -> float:
    """Root-test estimate of the eps convergence radius.

    Uses the geometric-mean growth of ||G^(n)||_1 over the trailing
    max(3, N/2) orders as a limsup proxy; an identically vanishing tail
    (polynomial g) reports +inf.
    """
    if ps.order < 4:
        raise ValueError("insufficient orders")
    norms = [gn.l1() for gn in ps.G]
    k = max(3, ps.order // 2)
    first, last = norms[ps.order - 1 - k], norms[ps.order - 1]
    if last == 0.0:
        return math.inf
    if first == 0.0:
        return 0.0
    ratio = (last / first) ** (1.0 / k)
    if ratio == 0.0:
        return math.inf
    return (1.0 / ratio) ** (1.0 / ps.eps_power_step)
