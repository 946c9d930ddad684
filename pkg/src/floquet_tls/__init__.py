"""Convergent perturbative Floquet propagators for driven two-level systems."""

from .fourier import FourierSeries
from .drive import DriveSpec, QData, CaseLabel, analyze_drive
from .riccati import PerturbativeSolution, case1_coefficients, case2_coefficients
from .propagator import FloquetPropagator, build, evaluate_U

__version__ = "0.1.0"

__all__ = [
    "FourierSeries",
    "DriveSpec",
    "QData",
    "CaseLabel",
    "analyze_drive",
    "PerturbativeSolution",
    "case1_coefficients",
    "case2_coefficients",
    "FloquetPropagator",
    "build",
    "evaluate_U",
    "__version__",
]
