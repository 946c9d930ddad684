import math

import numpy as np
import pytest
import scipy.special

from floquet_tls.drive import (
    CaseLabel, DriveSpec, analyze_drive, bessel_j, bessel_j0_zero, classify,
    default_m_max, gamma_f, q_coefficients, q_coefficients_bessel, q_decay_bound,
)
from floquet_tls.fourier import conjugate_series, convolve

from conftest import X1_J0

# frozen power-series values (checked against scipy below)
J_VALUES = {
    (0, 1.0): 0.7651976865579666,
    (1, 1.0): 0.44005058574493355,
    (2, 1.0): 0.11490348493190048,
    (3, 1.0): 0.019563353982668407,
    (0, 2.0): 0.22389077914123562,
}


class TestBessel:
    def test_frozen_values(self):
        for (m, x), val in J_VALUES.items():
            assert bessel_j(m, x) == pytest.approx(val, abs=1e-15)

    def test_negative_order(self):
        for m in range(1, 6):
            assert bessel_j(-m, 1.7) == pytest.approx((-1) ** m * bessel_j(m, 1.7),
                                                      abs=1e-16)

    def test_against_scipy(self):
        for m in range(-8, 9):
            for x in (0.3, 1.0, 2.4, 5.0):
                assert bessel_j(m, x) == pytest.approx(
                    float(scipy.special.jv(m, x)), abs=1e-13)

    def test_first_zero(self):
        assert bessel_j0_zero(1) == pytest.approx(X1_J0, abs=1e-12)
        assert abs(bessel_j(0, bessel_j0_zero(1))) < 1e-14

    def test_second_zero(self):
        assert bessel_j0_zero(2) == pytest.approx(5.520078110286311, abs=1e-10)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            bessel_j0_zero(0)


class TestDriveSpec:
    def test_rejects_zero_mode(self):
        with pytest.raises(ValueError, match="F_0"):
            DriveSpec(1.0, ((0, 1.0),))

    def test_rejects_non_real(self):
        with pytest.raises(ValueError, match="drive not real"):
            DriveSpec(1.0, ((-1, 0.5), (1, 0.5j)))

    def test_rejects_missing_partner(self):
        with pytest.raises(ValueError, match="drive not real"):
            DriveSpec(1.0, ((1, 0.5),))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            DriveSpec(1.0, ((1, 0.5), (1, 0.5), (-1, 0.5), (-1, 0.5)))

    def test_rejects_zero_amplitude(self):
        with pytest.raises(ValueError, match="nonzero"):
            DriveSpec(1.0, ((1, 0.0), (-1, 0.0)))

    def test_empty_fixture_allowed(self):
        d = DriveSpec(2.0, ())
        assert d.J == 0 and d.calN == 0 and d.phi() == 0.0

    def test_properties(self, two_harmonic_drive):
        d = two_harmonic_drive
        assert d.J == 2
        assert d.calN == 6
        assert d.phi() == pytest.approx(0.3)
        assert d.mode_set == (-2, -1, 1, 2)

    def test_f_evaluation(self, mixed_drive):
        ts = np.linspace(0, 4, 17)
        expected = 0.7 * np.cos(1.3 * ts) - 0.4 * np.sin(1.3 * ts)
        assert np.allclose(mixed_drive.evaluate_f(ts).real, expected, atol=1e-14)
        assert np.max(np.abs(mixed_drive.evaluate_f(ts).imag)) < 1e-15


class TestGammaF:
    def test_cos_sin_formula(self):
        d = DriveSpec.cos_sin(1.3, 0.7, -0.4)
        assert gamma_f(d) == pytest.approx(-0.4 / 1.3, abs=1e-16)

    def test_pure_cosine_is_zero(self, cos_drive):
        assert gamma_f(cos_drive) == 0.0

    def test_pure_sine(self):
        assert gamma_f(DriveSpec.cos_sin(1.0, 0.0, 1.0)) == pytest.approx(1.0)

    def test_empty(self):
        assert gamma_f(DriveSpec(1.0, ())) == 0.0


class TestQCoefficients:
    def test_empty_drive_identity(self):
        q = q_coefficients(DriveSpec(1.0, ()), 3, scale=1)
        assert q[0] == 1 and q.l1() == 1

    def test_cosine_gives_bessel(self, cos_drive):
        q = q_coefficients(cos_drive, 10, scale=1)
        for m in range(-3, 4):
            assert q[m] == pytest.approx(bessel_j(m, 1.0), abs=1e-14)

    def test_cosine_scale_two(self, cos_drive):
        q2 = q_coefficients(cos_drive, 10, scale=2)
        assert q2[0] == pytest.approx(J_VALUES[(0, 2.0)], abs=1e-13)

    def test_invalid_scale(self, cos_drive):
        with pytest.raises(ValueError):
            q_coefficients(cos_drive, 4, scale=3)

    def test_single_harmonic_closed_form(self, mixed_drive):
        q = q_coefficients(mixed_drive, 20, scale=1)
        qb = q_coefficients_bessel(mixed_drive, 20, scale=1)
        for m in range(-20, 21):
            assert abs(q[m] - qb[m]) < 1e-10

    def test_two_harmonic_closed_form(self, two_harmonic_drive):
        for scl in (1, 2):
            q = q_coefficients(two_harmonic_drive, 12, scale=scl)
            qb = q_coefficients_bessel(two_harmonic_drive, 12, scale=scl)
            for m in range(-12, 13):
                assert abs(q[m] - qb[m]) < 1e-9

    def test_bessel_route_symmetry(self, cos_drive):
        qb = q_coefficients_bessel(cos_drive, 8)
        for m in range(1, 9):
            assert abs(qb[-m]) == pytest.approx(abs(qb[m]), abs=1e-16)

    def test_no_closed_form(self):
        d = DriveSpec(1.0, ((-3, 0.1), (3, 0.1)))
        with pytest.raises(ValueError, match="no closed form"):
            q_coefficients_bessel(d, 4)

    def test_unimodular_on_grid(self, cos_qdata):
        ts = np.linspace(0.0, 2 * np.pi, 1024, endpoint=False)
        qv = cos_qdata.Q.evaluate(ts)
        assert np.max(np.abs(np.abs(qv) - 1.0)) < 1e-10

    def test_q2_equals_q_convolved(self, cos_qdata):
        prod = convolve(cos_qdata.Q, cos_qdata.Q)
        for m in range(-cos_qdata.Q2.m_max, cos_qdata.Q2.m_max + 1):
            assert abs(prod[m] - cos_qdata.Q2[m]) < 1e-10


class TestDecayBounds:
    def test_pointwise_bound_holds(self, cos_drive, two_harmonic_drive):
        for d in (cos_drive, two_harmonic_drive):
            for scl in (1, 2):
                q = q_coefficients(d, 25, scale=scl)
                for m in range(-25, 26):
                    bound = q_decay_bound(d, m, scale=scl)
                    assert abs(q[m]) <= bound * (1 + 1e-9)

    def test_exponential_envelope_chi_one(self, cos_drive):
        # the a-priori bound itself fits under Q * e^{-|m|}/<m>^2 with a
        # finite constant, hence so does the table
        q = q_coefficients(cos_drive, 25)
        big_q = max(q_decay_bound(cos_drive, m) * max(abs(m), 1) ** 2 * math.exp(abs(m))
                    for m in range(0, 26))
        assert math.isfinite(big_q)
        for m in range(-25, 26):
            assert abs(q[m]) <= big_q * math.exp(-abs(m)) / max(abs(m), 1) ** 2 * (1 + 1e-9)

    def test_default_m_max_meets_target(self, cos_drive, two_harmonic_drive):
        for d in (cos_drive, two_harmonic_drive):
            m = default_m_max(d)
            assert q_decay_bound(d, m, scale=2) < 1e-14
            assert q_decay_bound(d, m - 1, scale=2) >= 1e-14


class TestClassification:
    def test_cosine_is_case_one(self, cos_qdata):
        label, diag = classify(cos_qdata)
        assert label is CaseLabel.CASE_I
        assert diag["abs_M_q2"] == pytest.approx(J_VALUES[(0, 2.0)], abs=1e-12)

    def test_j0_zero_circle_unsupported(self, j0_zero_drive):
        qd = analyze_drive(j0_zero_drive)
        assert abs(qd.M_q2) < 1e-10
        assert abs(qd.M_Q1) < 1e-10       # symmetric single harmonic
        assert qd.case_label is CaseLabel.UNSUPPORTED

    def test_tuned_two_harmonic_is_case_two(self, case2_qdata):
        assert case2_qdata.case_label is CaseLabel.CASE_II
        assert abs(case2_qdata.M_q2) < 1e-9
        assert abs(case2_qdata.M_Q1) > 0.1

    def test_single_harmonic_q2_symmetry_kills_MQ1(self, cos_qdata):
        q2 = cos_qdata.Q2
        for m in range(1, q2.m_max + 1):
            assert abs(q2[m]) == pytest.approx(abs(q2[-m]), abs=1e-15)
        assert abs(cos_qdata.M_Q1) < 1e-15

    def test_mean_inverse_square_is_conjugate(self, cos_qdata, case2_qdata):
        # q^{-2} = conj(q^2) for a real drive, coefficientwise
        for qd in (cos_qdata, case2_qdata):
            inv = conjugate_series(qd.Q2)
            assert inv[0] == pytest.approx(np.conj(qd.M_q2), abs=1e-14)
            prod = convolve(qd.Q2, inv)
            assert abs(prod[0] - 1) < 1e-9


def test_dropped_budgets_are_small(cos_qdata):
    assert cos_qdata.Q.dropped < 1e-15
    assert cos_qdata.Q2.dropped < 1e-15
