"""ℤ^d calculus on box truncations, weighted Hardy weights and the ℤ² Leray weight"""
from .box import (
    BoxDomain,
    LatticeForm,
    LatticeFunction,
    OutOfBoxError,
    field_to_vertex_function,
    ground_state_weight_field,
    lattice_form,
    zd_laplacian,
)
from .checks import ZdReport, zd_form_margin, zd_inequality_check
from .leray import (
    LerayZ2Report,
    leray_domain,
    leray_fields,
    leray_z2_asymptotic,
    leray_z2_check,
    leray_z2_weight,
)
from .weights import (
    SubleadingFit,
    ZdCoefficients,
    ground_state_exponent,
    leading_ratio_table,
    zd_coefficients,
    zd_fit_subleading,
    zd_subleading_bound,
    zd_weight_asymptotic,
    zd_weight_exact,
    zd_weight_field,
)

__all__ = [
    'BoxDomain',
    'LatticeForm',
    'LatticeFunction',
    'OutOfBoxError',
    'field_to_vertex_function',
    'ground_state_weight_field',
    'lattice_form',
    'zd_laplacian',
    'ZdReport',
    'zd_form_margin',
    'zd_inequality_check',
    'LerayZ2Report',
    'leray_domain',
    'leray_fields',
    'leray_z2_asymptotic',
    'leray_z2_check',
    'leray_z2_weight',
    'SubleadingFit',
    'ZdCoefficients',
    'ground_state_exponent',
    'leading_ratio_table',
    'zd_coefficients',
    'zd_fit_subleading',
    'zd_subleading_bound',
    'zd_weight_asymptotic',
    'zd_weight_exact',
    'zd_weight_field',
]
