"""ℓ^p Hardy inequalities on graphs and Landau's inequality on ℕ"""
from .checks import LpForm, LpReport, lp_hardy_check, lp_trials, power_reference
from .landau import LandauReport, landau_check
from .operators import (
    LpParams,
    lp_grad_norm,
    lp_gradient_power,
    lp_hardy_weight,
    picone_residual,
    signed_power,
)

__all__ = [
    'LpForm',
    'LpReport',
    'lp_hardy_check',
    'lp_trials',
    'power_reference',
    'LandauReport',
    'landau_check',
    'LpParams',
    'lp_grad_norm',
    'lp_gradient_power',
    'lp_hardy_weight',
    'picone_residual',
    'signed_power',
]
