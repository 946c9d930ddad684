import numpy as np
import pytest

from floquet_tls.drive import CaseLabel, DriveSpec, analyze_drive
from floquet_tls.fourier import FourierSeries
from floquet_tls.oracle import (
    Hamiltonian2, WaveTrajectory, direct_map_propagator, hill_residual,
    integrate_propagator, integrate_schrodinger, symbolic_small_order,
)
from floquet_tls.riccati import case1_coefficients, g_series


def phase_integral_cos(ts):
    # int_0^t cos = sin t
    return np.sin(ts)


class TestSchrodingerIntegration:
    def test_decoupled_at_zero_eps(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.0)
        traj = integrate_schrodinger(h, (1.0, 0.0), 4 * np.pi, tol=1e-12)
        expected = np.exp(-1j * phase_integral_cos(traj.t))
        assert np.max(np.abs(traj.phi[:, 0] - expected)) < 1e-10
        assert np.max(np.abs(traj.phi[:, 1])) < 1e-12

    def test_rabi_rotation_without_drive(self):
        # f = 0: exact exp(-i t eps sigma_1) rotation
        h = Hamiltonian2(DriveSpec(1.0, ()), 0.3)
        traj = integrate_schrodinger(h, (1.0, 0.0), 10.0, tol=1e-12)
        assert np.max(np.abs(traj.phi[:, 0] - np.cos(0.3 * traj.t))) < 1e-10
        assert np.max(np.abs(traj.phi[:, 1] + 1j * np.sin(0.3 * traj.t))) < 1e-10

    def test_norm_drift_long_run(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.1)
        traj = integrate_schrodinger(h, (0.6, 0.8j), 100 * np.pi, tol=1e-11)
        assert traj.norm_drift() < 1e-8

    def test_tolerance_domain(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.1)
        with pytest.raises(ValueError, match="tolerance"):
            integrate_schrodinger(h, (1, 0), 1.0, tol=1e-3)
        with pytest.raises(ValueError, match="tolerance"):
            integrate_schrodinger(h, (1, 0), 1.0, tol=1e-14)

    def test_hamiltonian_matrix(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.2)
        m = h.matrix(0.0)
        assert m == pytest.approx(np.array([[1.0, 0.2], [0.2, -1.0]]))
        assert np.allclose(m, m.conj().T)


class TestPropagatorIntegration:
    def test_identity_at_zero(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.1)
        _, u = integrate_propagator(h, 2.0, tol=1e-11)
        assert np.linalg.norm(u[0] - np.eye(2)) < 1e-14

    def test_unimodular_determinant(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.1)
        _, u = integrate_propagator(h, 6 * np.pi, tol=1e-11)
        dets = np.abs(np.linalg.det(u))
        assert np.max(np.abs(dets - 1.0)) < 1e-9

    def test_columns_match_state_runs(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.15)
        ts = np.linspace(0.0, 4 * np.pi, 65)
        _, u = integrate_propagator(h, float(ts[-1]), tol=1e-12, t_eval=ts)
        for col, phi0 in ((0, (1.0, 0.0)), (1, (0.0, 1.0))):
            traj = integrate_schrodinger(h, phi0, float(ts[-1]), tol=1e-12,
                                         n_points=len(ts))
            assert np.max(np.abs(u[:, :, col] - traj.phi)) < 1e-10


class TestHillResidual:
    def test_closed_form_at_zero_eps(self, cos_drive):
        ts = np.linspace(0.0, 2 * np.pi, 1024, endpoint=False)
        phi = np.stack([np.exp(-1j * np.sin(ts)), np.exp(1j * np.sin(ts))], axis=1)
        res = hill_residual(WaveTrajectory(ts, phi), cos_drive, 0.0)
        assert res < 1e-6

    def test_oracle_trajectory(self, cos_drive):
        h = Hamiltonian2(cos_drive, 0.1)
        traj = integrate_schrodinger(h, (1.0, 0.0), 2 * np.pi, tol=1e-11,
                                     n_points=2048)
        assert hill_residual(traj, cos_drive, 0.1) < 1e-6

    def test_rejects_coarse_grid(self, cos_drive):
        ts = np.linspace(0.0, 2 * np.pi, 32)
        phi = np.zeros((32, 2), dtype=complex)
        with pytest.raises(ValueError, match="coarse"):
            hill_residual(WaveTrajectory(ts, phi), cos_drive, 0.0)

    def test_rejects_nonuniform_grid(self, cos_drive):
        ts = np.concatenate([np.linspace(0, 1, 100), np.linspace(1.01, 3, 200)])
        phi = np.zeros((300, 2), dtype=complex)
        with pytest.raises(ValueError, match="uniform"):
            hill_residual(WaveTrajectory(ts, phi), cos_drive, 0.0)


class TestDirectMap:
    def test_matches_ode_oracle(self, cos_qdata, cos_drive):
        eps = 0.05
        ps = case1_coefficients(cos_qdata, N=8)
        g = g_series(ps, eps)
        ts = np.linspace(0.0, 10 * 2 * np.pi, 2048)
        u_direct = direct_map_propagator(cos_drive, g, eps, ts)
        h = Hamiltonian2(cos_drive, eps)
        _, u_oracle = integrate_propagator(h, float(ts[-1]), tol=1e-11, t_eval=ts)
        err = np.max(np.linalg.norm(u_direct - u_oracle, axis=(1, 2)))
        assert err < 1e-7

    def test_identity_at_origin(self, cos_drive):
        g = FourierSeries.zero(1.0)
        u = direct_map_propagator(cos_drive, g, 0.0, np.linspace(0, 5, 64))
        assert np.linalg.norm(u[0] - np.eye(2)) < 1e-14

    def test_grid_must_start_at_zero(self, cos_drive):
        with pytest.raises(ValueError, match="t = 0"):
            direct_map_propagator(cos_drive, FourierSeries.zero(1.0), 0.1,
                                  np.linspace(1.0, 2.0, 8))


class TestSymbolicSmallOrder:
    def test_first_order_is_alpha_q(self, cos_qdata):
        cs = symbolic_small_order(cos_qdata, 1, 6)
        a = cs[0][0] / cos_qdata.Q[0]
        assert abs(a * a - 1.0) < 1e-12
        for m in range(-6, 7):
            assert cs[0][m] == pytest.approx(a * cos_qdata.Q[m], abs=1e-14)

    def test_empty_drive_second_order_vanishes(self):
        qd = analyze_drive(DriveSpec(1.0, ()), m_max=4)
        cs = symbolic_small_order(qd, 2, 4)
        assert cs[1].l1() < 1e-15

    def test_refuses_case_two(self, case2_qdata):
        with pytest.raises(ValueError, match="Case I only"):
            symbolic_small_order(case2_qdata, 2, 4)

    def test_refuses_large_order(self, cos_qdata):
        with pytest.raises(ValueError, match="small instance"):
            symbolic_small_order(cos_qdata, 4, 4)
