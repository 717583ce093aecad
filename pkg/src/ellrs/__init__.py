"""Numerical lab for the elliptic Ruijsenaars-Schneider model.

Submodules
----------
elliptic
    Theta functions with characteristics, ``sigma`` and ``xi``.
phase
    Phase points and the canonical Poisson-bracket engine.
lax
    Lax operators, intertwiners, the gauge transform and the Calogero limit.
rmat
    Classical and quantum R-matrices and the dynamical quadruple.
verify
    Residual checks and the suite driver.
cli
    Command-line front end.
"""
from .elliptic import ModularParam, SeriesControl, ThetaChar, sigma, theta_char, theta_j, xi
from .errors import EllRSError
from .lax import LaxMatrix, ModelParams
from .phase import BracketMethod, Observable, PhasePoint
from .rmat import RTensor, classical_r, quantum_R
from .verify import ResidualReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "BracketMethod",
    "EllRSError",
    "LaxMatrix",
    "ModelParams",
    "ModularParam",
    "Observable",
    "PhasePoint",
    "RTensor",
    "ResidualReport",
    "SeriesControl",
    "ThetaChar",
    "classical_r",
    "quantum_R",
    "run_suite",
    "sigma",
    "theta_char",
    "theta_j",
    "xi",
]
