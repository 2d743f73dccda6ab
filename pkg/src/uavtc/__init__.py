"""Interference-aware throughput analysis and transmission control for
UAV/ground networks sharing unlicensed spectrum.

The package models per-slot channel access gated by a fading threshold,
composes queueing and SINR-outage losses into expected throughput, and
optimizes the thresholds centrally (coordinate descent over grouped
coordinates) or distributedly (consensus rounds of local best responses).
A slot-level Monte Carlo simulator serves as the validation oracle.
"""

from .errors import (
    UavtcError,
    DomainError,
    NumericalError,
    ScenarioError,
    InfeasibleTrafficError,
    DegenerateFitError,
)

__version__ = "0.1.0"

__all__ = [
    "UavtcError",
    "DomainError",
    "NumericalError",
    "ScenarioError",
    "InfeasibleTrafficError",
    "DegenerateFitError",
    "__version__",
]
