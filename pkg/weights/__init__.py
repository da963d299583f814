"""Weight families, scalar functions and scans"""
from .margins import (
    FormMargin,
    RellichMargin,
    hardy_form_margin,
    improved_rellich2_margin,
    second_order_margin,
)
from .models import (
    LerayCheck,
    N5Report,
    WeightModel,
    direct_hardy_weight,
    dual_evaluation_gap,
    gks_coefficients,
    gks_reference_weight,
    improved_a_coefficient,
    improved_rellich2_coefficients,
    improved_rellich2_weight,
    kpp_coefficients,
    kpp_weight,
    landau_weight,
    leray_check,
    leray_exact_weight,
    leray_weight,
    n5_coefficient_report,
    shifted_hardy_weight,
)
from .scalar import SCALAR_FUNCTIONS, ScalarDomainError, ScalarFunctionId, scalar_eval
from .scans import MonotoneReport, ScanReport, lower_bound_scan, monotone_scan

__all__ = [
    'FormMargin',
    'RellichMargin',
    'hardy_form_margin',
    'improved_rellich2_margin',
    'second_order_margin',
    'LerayCheck',
    'N5Report',
    'WeightModel',
    'direct_hardy_weight',
    'dual_evaluation_gap',
    'gks_coefficients',
    'gks_reference_weight',
    'improved_a_coefficient',
    'improved_rellich2_coefficients',
    'improved_rellich2_weight',
    'kpp_coefficients',
    'kpp_weight',
    'landau_weight',
    'leray_check',
    'leray_exact_weight',
    'leray_weight',
    'n5_coefficient_report',
    'shifted_hardy_weight',
    'SCALAR_FUNCTIONS',
    'ScalarDomainError',
    'ScalarFunctionId',
    'scalar_eval',
    'MonotoneReport',
    'ScanReport',
    'lower_bound_scan',
    'monotone_scan',
]
