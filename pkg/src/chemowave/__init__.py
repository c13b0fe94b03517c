"""1D chemotaxis reaction-diffusion toolkit: fronts, barriers, stability."""

__version__ = "0.1.0"

from .fields import Field, Grid
from .params import (ConstantsReport, Params, RegimeTag, SpeedSpec, SIGMA,
                     c_star, c_star_star, chi_star, classify_regime,
                     constants_report, kappa_of_speed, M_chi, validate_params)
from .cauchy import SimConfig, State, monitor_bounds, run, step
from .barriers import BarrierSpec, certify, eval_sub, eval_super, residual_A
from .elliptic import (Constant, Exponential, TailSpec, Zero, psi_derivative,
                       solve_fd, solve_psi)
from .waves import (WaveProblem, WaveProfile, construct, construct_fixed_point,
                    construct_relax, diagnose, normalize_translation, settle)
from .stability import (PerturbSpec, apriori_checks, predicted_lambda,
                        run_stability, uniqueness_check, weighted_norm,
                        weighted_elliptic_check)
from .speed import FrontTrack, front_position, spreading_speed, sweep_speeds

__all__ = [
    "Field", "Grid", "Params", "RegimeTag", "SpeedSpec", "ConstantsReport",
    "SIGMA", "c_star", "c_star_star", "chi_star", "classify_regime",
    "constants_report", "kappa_of_speed", "M_chi", "validate_params",
    "SimConfig", "State", "monitor_bounds", "run", "step",
    "BarrierSpec", "certify", "eval_sub", "eval_super", "residual_A",
    "Constant", "Exponential", "TailSpec", "Zero", "psi_derivative",
    "solve_fd", "solve_psi",
    "WaveProblem", "WaveProfile", "construct", "construct_fixed_point",
    "construct_relax", "diagnose", "normalize_translation", "settle",
    "PerturbSpec", "apriori_checks", "predicted_lambda", "run_stability",
    "uniqueness_check", "weighted_norm", "weighted_elliptic_check",
    "FrontTrack", "front_position", "spreading_speed", "sweep_speeds",
    "__version__",
]
