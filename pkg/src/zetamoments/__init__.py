"""Discrete moments of zeta'(rho) and the hybrid Euler-Hadamard product."""

from .errors import (AccuracyError, CapacityError, ConvergenceError, DegenerateSampleError, DomainError,
                     MissedZeroError, NonconvergenceError, ParseError, PoleError, ValidationError, WindowError,
                     ZeroNotFoundError, ZetaMomentsError)
from .harness import ExperimentConfig, MomentReport
from .hybrid import HybridContext
from .rmt import CueSample
from .special_fn import SmoothingKernel, default_kernel
from .zeta_engine import ZeroTable, ZetaConfig, find_zeros

__all__ = [
    "AccuracyError", "CapacityError", "ConvergenceError", "CueSample", "DegenerateSampleError", "DomainError",
    "ExperimentConfig", "HybridContext", "MissedZeroError", "MomentReport", "NonconvergenceError", "ParseError",
    "PoleError", "SmoothingKernel", "ValidationError", "WindowError", "ZeroNotFoundError", "ZeroTable",
    "ZetaConfig", "ZetaMomentsError", "default_kernel", "find_zeros",
]
