"""Numerical verification lab for ``u_tt + u_t - u_xx + u^p = 0`` in one space dimension."""

from .core import (
    INF,
    CheckReport,
    Grid,
    GridFunction,
    ModelParams,
    TruncationError,
    gaussian_profile,
    japanese_bracket_profile,
    lq_norm,
)
from .heat import DecayFit, fit_decay
from .analysis import DominationReport, check_domination, main_theorem_bound
from .kernels import apply_dt_s, apply_dtt_s, apply_s, linear_solution
from .solver import SolverConfig, simulate

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CheckReport",
    "Grid",
    "GridFunction",
    "ModelParams",
    "TruncationError",
    "gaussian_profile",
    "japanese_bracket_profile",
    "lq_norm",
    "DecayFit",
    "fit_decay",
    "DominationReport",
    "check_domination",
    "main_theorem_bound",
    "apply_s",
    "apply_dt_s",
    "apply_dtt_s",
    "linear_solution",
    "SolverConfig",
    "simulate",
]
