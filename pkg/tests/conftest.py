import numpy as np
import pytest

from floquet_tls.drive import DriveSpec, analyze_drive, q_coefficients_bessel

# first positive zero of J_0, frozen from bisection on the power series
X1_J0 = 2.404825557695773


@pytest.fixture(scope="session")
def cos_drive():
    return DriveSpec.cos_sin(1.0, 1.0)


@pytest.fixture(scope="session")
def cos_qdata(cos_drive):
    return analyze_drive(cos_drive)


@pytest.fixture(scope="session")
def mixed_drive():
    # phi1*cos + phi2*sin with a non-unit frequency
    return DriveSpec.cos_sin(1.3, 0.7, -0.4)


@pytest.fixture(scope="session")
def two_harmonic_drive():
    # the two-harmonic example drive with a complex second harmonic
    return DriveSpec(1.0, ((-1, 0.3), (1, 0.3), (-2, 0.2j), (2, -0.2j)))


def tune_case2_amplitude(f2: float = 0.2, lo: float = 0.55, hi: float = 0.65) -> float:
    """Amplitude s for which the real two-harmonic drive has M(q^2) = 0."""

    def mean_q2(s):
        d = DriveSpec(1.0, ((-1, s), (1, s), (-2, f2), (2, f2)))
        return q_coefficients_bessel(d, 0, scale=2)[0].real

    f_lo = mean_q2(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = mean_q2(mid)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def case2_drive():
    s = tune_case2_amplitude()
    return DriveSpec(1.0, ((-1, s), (1, s), (-2, 0.2), (2, 0.2)))


@pytest.fixture(scope="session")
def case2_qdata(case2_drive):
    return analyze_drive(case2_drive)


@pytest.fixture(scope="session")
def j0_zero_drive():
    # cosine amplitude sitting exactly on the first J_0-zero circle
    return DriveSpec.cos_sin(1.0, X1_J0 / 2.0)


def frobenius(a: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(a, axis=(-2, -1)))) if a.ndim > 2 \
        else float(np.linalg.norm(a))
