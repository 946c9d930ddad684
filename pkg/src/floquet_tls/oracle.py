"""Independent ground truth for everything the Fourier machinery produces.

Three unrelated routes live here so that no production path is ever
checked against itself:

* adaptive high-order integration of the Schrodinger equation
  i dPhi/dt = (eps sigma_1 + f(t) sigma_3) Phi, state- and
  propagator-valued;
* the propagator of the Riccati map built directly from g by exact
  termwise integration of f+g and Gauss quadrature of R^{-2}, bypassing
  every coefficient recursion;
* a small-order time-domain construction of the perturbative tables
  (termwise primitives with the integration constants chosen to kill
  every mean value), usable up to order 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .drive import CaseLabel, DriveSpec, QData
from .fourier import FourierSeries, add, conjugate_series, convolve, differentiate, scale
from .riccati import principal_alpha1, _mode_dot, _divide_by_mode

__all__ = [
    "Hamiltonian2",
    "WaveTrajectory",
    "integrate_schrodinger",
    "integrate_propagator",
    "hill_residual",
    "symbolic_small_order",
    "direct_map_propagator",
]

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


@dataclass(frozen=True)
class Hamiltonian2:
    """H(t) = eps * sigma_1 + f(t) * sigma_3 (Hermitian for real f, eps)."""

    drive: DriveSpec
    eps: float

    def matrix(self, t: float) -> np.ndarray:
        f = complex(self.drive.evaluate_f(t)).real
        return self.eps * SIGMA1 + f * SIGMA3


@dataclass(frozen=True)
class WaveTrajectory:
    t: np.ndarray
    phi: np.ndarray        # shape (len(t), 2)

    def norm_drift(self) -> float:
        norms = np.sum(np.abs(self.phi) ** 2, axis=1)
        return float(np.max(np.abs(norms - norms[0])))


def _check_tol(tol: float) -> None:
    if not (1e-13 <= tol <= 1e-6):
        raise ValueError("tolerance must lie in [1e-13, 1e-6]")


def integrate_schrodinger(h: Hamiltonian2, phi0, t_end: float,
                          tol: float = 1e-11,
                          n_points: int | None = None) -> WaveTrajectory:
    """Integrate i dPhi/dt = H(t) Phi from the given initial state.

    Backed by an adaptive embedded Runge-Kutta pair (DOP853) with the
    local tolerance split evenly between the absolute and relative
    budgets.  Returns the state on a uniform grid of ``n_points``
    samples (default 256 per drive period).
    """
    _check_tol(tol)
    phi0 = np.asarray(phi0, dtype=np.complex128).reshape(2)
    if n_points is None:
        n_points = max(int(256 * t_end / h.drive.period), 2)
    ts = np.linspace(0.0, t_end, n_points)
    f_series = h.drive.f_series()

    def rhs(t, y):
        f = f_series.evaluate(t).real
        return [-1j * (f * y[0] + h.eps * y[1]),
                -1j * (h.eps * y[0] - f * y[1])]

    sol = solve_ivp(rhs, (0.0, t_end), phi0, method="DOP853",
                    t_eval=ts, rtol=0.5 * tol, atol=0.5 * tol)
    if not sol.success:
        raise RuntimeError("stiff or invalid drive")
    return WaveTrajectory(t=sol.t, phi=sol.y.T.copy())


def integrate_propagator(h: Hamiltonian2, t_end: float, tol: float = 1e-11,
                         t_eval=None) -> tuple[np.ndarray, np.ndarray]:
    """Propagator U(t) with U(0) = identity, integrated column-wise.

    Returns (ts, U) with U of shape (len(ts), 2, 2).  Unitarity is
    inherited from the Hermitian Hamiltonian up to the integration
    tolerance and can be checked by the caller.
    """
    _check_tol(tol)
    if t_eval is None:
        n_points = max(int(256 * t_end / h.drive.period), 2)
        t_eval = np.linspace(0.0, t_end, n_points)
    t_eval = np.asarray(t_eval, dtype=np.float64)
    f_series = h.drive.f_series()

    def rhs(t, y):
        u = y.reshape(2, 2)
        f = f_series.evaluate(t).real
        hmat = h.eps * SIGMA1 + f * SIGMA3
        return (-1j * hmat @ u).reshape(4)

    y0 = np.eye(2, dtype=np.complex128).reshape(4)
    sol = solve_ivp(rhs, (0.0, float(t_eval[-1])), y0, method="DOP853",
                    t_eval=t_eval, rtol=0.5 * tol, atol=0.5 * tol)
    if not sol.success:
        raise RuntimeError("stiff or invalid drive")
    return sol.t, sol.y.T.reshape(-1, 2, 2).copy()


def hill_residual(traj: WaveTrajectory, d: DriveSpec, eps: float) -> float:
    """Defect of the trajectory under the second-order (Hill) form.

    phi_+'' + (+i f' + eps^2 + f^2) phi_+ = 0 and the -i f' twin for
    phi_-, with the second derivative taken by centered 5-point
    differences on the uniform trajectory grid and f, f' exact.
    """
    ts = traj.t
    if len(ts) < 5:
        raise ValueError("trajectory too short for second differences")
    hstep = ts[1] - ts[0]
    if not np.allclose(np.diff(ts), hstep, rtol=1e-9, atol=0.0):
        raise ValueError("hill_residual needs a uniform time grid")
    if hstep > d.period / 64:
        raise ValueError("grid too coarse for second differences")
    f_series = d.f_series()
    fp_series = differentiate(f_series)
    ti = ts[2:-2]
    fv = f_series.evaluate(ti).real
    fpv = fp_series.evaluate(ti).real
    worst = 0.0
    for comp, sign in ((0, 1.0), (1, -1.0)):
        y = traj.phi[:, comp]
        d2 = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * hstep**2)
        res = d2 + (sign * 1j * fpv + eps**2 + fv**2) * y[2:-2]
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


# ----------------------------------------------------------------------
# Theorem-level map from g to U by direct quadrature
# ----------------------------------------------------------------------

def _exact_primitive_on_grid(series: FourierSeries, ts: np.ndarray) -> np.ndarray:
    """int_0^t series, exact for the truncated table (mode 0 gives a ramp)."""
    modes = series.modes()
    out = np.full(ts.shape, 0.0, dtype=np.complex128)
    out += series[0] * ts
    nz = modes[modes != 0]
    if nz.size:
        amps = np.array([series[m] for m in nz])
        phases = np.exp(1j * series.omega * np.outer(ts, nz)) - 1.0
        out += phases @ (amps / (1j * nz * series.omega))
    return out


def direct_map_propagator(d: DriveSpec, g: FourierSeries, eps: float,
                          ts: np.ndarray, gauss_order: int = 6) -> np.ndarray:
    """U(t) on the grid via R = exp(-i int (f+g)), S = int R^{-2}.

    The outer integral of f+g is done termwise (exact for the truncated
    series); S is accumulated per grid interval with Gauss-Legendre
    quadrature of exp(2i int (f+g)).  None of the coefficient-table
    assembly is involved, so this validates the Riccati-to-propagator
    map on its own.
    """
    ts = np.asarray(ts, dtype=np.float64)
    if ts[0] != 0.0:
        raise ValueError("grid must start at t = 0")
    fg = add(d.f_series(), g)
    a_grid = _exact_primitive_on_grid(fg, ts)
    r_grid = np.exp(-1j * a_grid)

    nodes, weights = np.polynomial.legendre.leggauss(gauss_order)
    t0, t1 = ts[:-1], ts[1:]
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t1 + t0)
    tq = mid[:, None] + half[:, None] * nodes[None, :]
    aq = _exact_primitive_on_grid(fg, tq.ravel()).reshape(tq.shape)
    seg = (half * (np.exp(2j * aq) @ weights))
    s_grid = np.concatenate([[0.0 + 0.0j], np.cumsum(seg)])

    g0 = complex(np.sum(g.coeffs))
    u = np.empty((len(ts), 2, 2), dtype=np.complex128)
    u[:, 0, 0] = r_grid * (1.0 + 1j * g0 * s_grid)
    u[:, 0, 1] = -1j * eps * r_grid * s_grid
    u[:, 1, 0] = -1j * eps * np.conj(r_grid * s_grid)
    u[:, 1, 1] = np.conj(r_grid) * (1.0 - 1j * np.conj(g0) * np.conj(s_grid))
    return u


# ----------------------------------------------------------------------
# Small-order construction from the order-by-order ODEs
# ----------------------------------------------------------------------

def symbolic_small_order(qd: QData, N: int, m_max: int,
                         alpha_sign: int = 1) -> list[FourierSeries]:
    """Tables of c_1..c_N by direct termwise integration, N <= 3.

    Works the order equations (q c_n)' - 2 i f q c_n = i * (quadratic
    lower-order terms) in the variable w_n = c_n / q: each w_n is the
    zero-mean primitive of its integrand plus a constant, and the
    constant of order n is pinned by demanding that the order-(n+1)
    integrand have no mean (the secular-kill rule).  Entirely
    independent of the coefficient recursions it is used to check.
    """
    if qd.case_label is not CaseLabel.CASE_I:
        raise ValueError("Case I only")
    if not 1 <= N <= 3:
        raise ValueError("small instance only (N <= 3)")
    Q, Q2 = qd.Q, qd.Q2
    M = Q2[0]
    alpha1 = principal_alpha1(M, alpha_sign)
    qm2 = conjugate_series(Q2)          # q^{-2} = conj(q^2) for real f

    c1 = scale(Q, alpha1)                    # c_1 = alpha_1 q
    out = [c1.truncated(m_max)]
    if N == 1:
        return out

    # order 2: w_2' = i (alpha_1^2 q^2 - q^{-2});  alpha_1 was chosen so
    # the integrand has zero mean (checked, not assumed)
    i2 = scale(add(scale(Q2, alpha1**2), scale(qm2, -1.0)), 1j)
    if abs(i2[0]) > 1e-10 * max(i2.l1(), 1e-300):
        raise RuntimeError("order-2 integrand kept a mean value")
    p2 = _divide_by_mode(scale(i2, -1j))     # primitive: coeff/(i m omega)
    beta2 = -_mode_dot(Q2, p2) / M           # kills M(q^2 w_2)
    w2 = add(p2, FourierSeries.from_dict(Q.omega, {0: beta2}))
    c2 = convolve(Q, w2)
    out.append(c2.truncated(m_max))
    if N == 2:
        return out

    # order 3: w_3' = 2 i c_1 c_2; beta_3 from the order-4 mean
    # condition 2 alpha_1 M(q c_3) + M(c_2 c_2) = 0
    i3 = scale(convolve(c1, c2), 2j)
    if abs(i3[0]) > 1e-10 * max(i3.l1(), 1e-300):
        raise RuntimeError("order-3 integrand kept a mean value")
    p3 = _divide_by_mode(scale(i3, -1j))
    m_c2c2 = _mode_dot(c2, c2)
    beta3 = -(_mode_dot(Q2, p3) + m_c2c2 / (2.0 * alpha1)) / M
    w3 = add(p3, FourierSeries.from_dict(Q.omega, {0: beta3}))
    c3 = convolve(Q, w3)
    out.append(c3.truncated(m_max))
    return out
