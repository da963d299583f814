"""Sequence calculus package"""
from .sequence import (
    BoundaryOrder,
    FiniteSequence,
    WeightDomainError,
    canonical,
    divergence,
    grad,
    half_laplace_power,
    laplace,
    shift,
    weighted_sum,
)
from .summation import (
    CompensatedVector,
    compensated_dot,
    compensated_sum,
    two_prod,
    two_prod_arrays,
    two_sum_arrays,
)

__all__ = [
    'BoundaryOrder',
    'FiniteSequence',
    'WeightDomainError',
    'canonical',
    'divergence',
    'grad',
    'half_laplace_power',
    'laplace',
    'shift',
    'weighted_sum',
    'compensated_dot',
    'compensated_sum',
    'two_prod',
    'CompensatedVector',
    'two_prod_arrays',
    'two_sum_arrays',
]
