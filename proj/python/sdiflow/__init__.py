"""Stochastic subgradient flows with Tikhonov regularization.

Thin wrapper over the C++ core: test problems with exact oracles, proximal
and Yosida Euler-Maruyama integrators, Monte Carlo ensembles, and rate
analysis utilities.
"""

from ._core import (
    ContractViolation,
    DivergenceError,
    FitError,
    NoiseSchedule,
    Problem,
    SolverFailure,
    TikhonovSchedule,
    builtin_problems,
    check_admissibility,
    compute_R,
    dawson_bound_check,
    fit_rate,
    make_problem,
    run_ensemble,
    run_simulate_file,
    simulate_path,
    theoretical_rate,
    tikhonov_curve_study,
)

__all__ = [
    "ContractViolation",
    "DivergenceError",
    "FitError",
    "NoiseSchedule",
    "Problem",
    "SolverFailure",
    "TikhonovSchedule",
    "builtin_problems",
    "check_admissibility",
    "compute_R",
    "dawson_bound_check",
    "fit_rate",
    "make_problem",
    "run_ensemble",
    "run_simulate_file",
    "simulate_path",
    "theoretical_rate",
    "tikhonov_curve_study",
]
