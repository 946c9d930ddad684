"""Floquet-form propagator assembled from the Riccati solution.

Given g's Fourier table at a concrete eps, the chain is

    Omega  = G_0                       (secular frequency)
    H_n    = (F_n + G_n)/(n omega)     (n != 0; H_0 = 0)
    R(t)   = e^{-i gamma(eps)} e^{-i Omega t} exp(-sum H_n e^{i n omega t})
    R^{-2} = e^{2i gamma(eps)} e^{2i Omega t} * exp(+2 sum H_n ...)
    S_n    = -i R^(-2)_n / (n omega + 2 Omega),  sigma_0 = -sum S_n
    V      = S * R   (coefficient convolution)

and the four periodic envelopes of U's first row follow from R, V,
sigma_0 and g(0).  The second row is fixed by unitarity structure:
U_21 = -conj(U_12), U_22 = conj(U_11).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .drive import DriveSpec
from .fourier import FourierSeries, add, convolve, differentiate, exp_neg_series, scale
from .riccati import PerturbativeSolution

__all__ = [
    "FloquetPropagator",
    "build",
    "evaluate_U",
    "secular_frequency_series",
    "floquet_consistency",
    "schrodinger_residual",
    "unitarity_defect",
]


@dataclass(frozen=True)
class FloquetPropagator:
    """Secular frequency, Fourier tables and envelopes of U(t).

    Omega is kept as the complex number G_0(eps); its imaginary part is
    a convergence diagnostic (physically Omega is real) and is checked
    by callers, never zeroed here.
    """

    drive: DriveSpec
    eps: float
    Omega: complex
    gamma_eps: complex
    R: FourierSeries
    Rm2: FourierSeries
    S: FourierSeries
    sigma0: complex
    V: FourierSeries
    g0: complex
    u11_minus: FourierSeries
    u11_plus: FourierSeries
    u12_minus: FourierSeries
    u12_plus: FourierSeries

    @property
    def omega(self) -> float:
        return self.drive.omega

    def omega_imag_defect(self) -> float:
        return abs(self.Omega.imag) / max(1.0, abs(self.Omega))

    def evaluate_U(self, t):
        return evaluate_U(self, t)


def build(d: DriveSpec, g: FourierSeries, eps: float, p_max: int = 40,
          m_cap: int | None = None, tol_res: float | None = None) -> FloquetPropagator:
    """Assemble the propagator data from a Riccati solution table.

    ``g`` must be the series produced for this drive at this eps.  The
    guard on the S denominators refuses to divide through any mode with
    |n omega + 2 Omega| below ``tol_res`` (default 1e-6 * omega): such a
    near-resonance would smuggle a linear-in-t term into S, which
    unitarity forbids.  At eps = 0 the S/V machinery is bypassed
    entirely (U_12 vanishes identically there and S never enters).
    """
    omega = d.omega
    if tol_res is None:
        tol_res = 1e-6 * omega
    F = d.f_series()
    Omega = g[0]

    m_h = max(g.m_max, F.m_max)
    if m_cap is None:
        m_cap = m_h + 32
    modes = np.arange(-m_h, m_h + 1, dtype=np.float64)
    denom = modes * omega
    denom[m_h] = math.inf
    h_coeffs = np.zeros(2 * m_h + 1, dtype=np.complex128)
    for m in range(-m_h, m_h + 1):
        if m != 0:
            h_coeffs[m + m_h] = (F[m] + g[m]) / (m * omega)
    H = FourierSeries(omega, h_coeffs, g.dropped / omega)
    gamma_eps = 1j * complex(np.sum(H.coeffs))

    R = scale(exp_neg_series(H, p_max=p_max, m_cap=m_cap), cmath.exp(-1j * gamma_eps))
    Rm2 = scale(exp_neg_series(scale(H, -2.0), p_max=p_max, m_cap=m_cap),
                cmath.exp(2j * gamma_eps))

    g0 = complex(np.sum(g.coeffs))
    if eps == 0.0:
        S = FourierSeries.zero(omega)
        sigma0 = 0.0 + 0.0j
        V = FourierSeries.zero(omega)
    else:
        s_modes = Rm2.modes().astype(np.float64)
        s_denom = s_modes * omega + 2.0 * Omega
        live = np.abs(Rm2.coeffs) > 0.0
        if np.any(np.abs(s_denom[live]) < tol_res):
            raise ValueError("secular resonance in S")
        s_denom[~live] = math.inf
        tail_denom = max(omega - 2.0 * abs(Omega), tol_res)
        S = FourierSeries(omega, -1j * Rm2.coeffs / s_denom,
                          Rm2.dropped / tail_denom)
        sigma0 = -complex(np.sum(S.coeffs))
        V = convolve(S, R, m_cap=m_cap)

    u11_minus = scale(R, 1.0 + 1j * g0 * sigma0)
    u11_plus = scale(V, 1j * g0)
    u12_minus = scale(R, -1j * eps * sigma0)
    u12_plus = scale(V, -1j * eps)
    return FloquetPropagator(drive=d, eps=eps, Omega=Omega, gamma_eps=gamma_eps,
                             R=R, Rm2=Rm2, S=S, sigma0=sigma0, V=V, g0=g0,
                             u11_minus=u11_minus, u11_plus=u11_plus,
                             u12_minus=u12_minus, u12_plus=u12_plus)


def evaluate_U(p: FloquetPropagator, t):
    """U(t) as a (..., 2, 2) complex array (scalar t gives (2, 2)).

    U_11 = e^{-i Omega t} u11m(t) + e^{+i Omega t} u11p(t), likewise
    U_12; the second row is -conj(U_12), conj(U_11).
    """
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    e_minus = np.exp(-1j * p.Omega * ts)
    e_plus = np.exp(1j * p.Omega * ts)
    u11 = e_minus * p.u11_minus.evaluate(ts) + e_plus * p.u11_plus.evaluate(ts)
    u12 = e_minus * p.u12_minus.evaluate(ts) + e_plus * p.u12_plus.evaluate(ts)
    out = np.empty(ts.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = u11
    out[..., 0, 1] = u12
    out[..., 1, 0] = -np.conj(u12)
    out[..., 1, 1] = np.conj(u11)
    if np.isscalar(t) or np.ndim(t) == 0:
        return out[0]
    return out


def secular_frequency_series(ps: PerturbativeSolution) -> list[complex]:
    """Coefficients G_0^(n), so Omega(eps) = sum_n eps^(step*n) G_0^(n)."""
    return [gn[0] for gn in ps.G]


def unitarity_defect(p: FloquetPropagator, ts) -> float:
    """sup over the grid of ||U*(t) U(t) - identity||_F."""
    u = evaluate_U(p, np.asarray(ts, dtype=np.float64))
    gram = np.conj(np.swapaxes(u, -1, -2)) @ u
    gram[..., 0, 0] -= 1.0
    gram[..., 1, 1] -= 1.0
    return float(np.max(np.linalg.norm(gram, axis=(-2, -1))))


def floquet_consistency(p: FloquetPropagator, t: float) -> float:
    """||U(t + T) - U(t) U(T)||_F, zero for an exact periodic propagator."""
    T = p.drive.period
    lhs = evaluate_U(p, t + T)
    rhs = evaluate_U(p, t) @ evaluate_U(p, T)
    return float(np.linalg.norm(lhs - rhs))


def schrodinger_residual(p: FloquetPropagator, ts) -> float:
    """sup over the grid of ||i dU/dt - H(t) U(t)||_F.

    The time derivative is exact: each envelope differentiates
    termwise, and the secular phases contribute -/+ i Omega.
    """
    ts = np.asarray(ts, dtype=np.float64)
    e_minus = np.exp(-1j * p.Omega * ts)
    e_plus = np.exp(1j * p.Omega * ts)

    def entry_and_derivative(minus: FourierSeries, plus: FourierSeries):
        val = e_minus * minus.evaluate(ts) + e_plus * plus.evaluate(ts)
        der = (e_minus * (differentiate(minus).evaluate(ts)
                          - 1j * p.Omega * minus.evaluate(ts))
               + e_plus * (differentiate(plus).evaluate(ts)
                           + 1j * p.Omega * plus.evaluate(ts)))
        return val, der

    u11, du11 = entry_and_derivative(p.u11_minus, p.u11_plus)
    u12, du12 = entry_and_derivative(p.u12_minus, p.u12_plus)
    u = np.empty(ts.shape + (2, 2), dtype=np.complex128)
    du = np.empty_like(u)
    u[..., 0, 0], u[..., 0, 1] = u11, u12
    u[..., 1, 0], u[..., 1, 1] = -np.conj(u12), np.conj(u11)
    du[..., 0, 0], du[..., 0, 1] = du11, du12
    du[..., 1, 0], du[..., 1, 1] = -np.conj(du12), np.conj(du11)

    fv = p.drive.f_series().evaluate(ts).real
    h = np.zeros(ts.shape + (2, 2), dtype=np.complex128)
    h[..., 0, 0] = fv
    h[..., 1, 1] = -fv
    h[..., 0, 1] = p.eps
    h[..., 1, 0] = p.eps
    res = 1j * du - h @ u
    return float(np.max(np.linalg.norm(res, axis=(-2, -1))))
