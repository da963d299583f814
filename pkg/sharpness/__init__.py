"""Sharp constants, eigenvalue samples, continuum limit and the iteration chain"""
from .chain import (
    ChainReport,
    ChainStep,
    CounterexampleResult,
    counterexample_build,
    counterexample_gradient,
    counterexample_sweep,
    fit_lhs_constant,
    iteration_chain_check,
)
from .continuum import (
    PROFILES,
    ContinuumConvergence,
    ContinuumSample,
    PolynomialBump,
    SmoothBump,
    continuum_convergence,
    continuum_probe,
    sample_profile,
)
from .eigen import (
    ConvergenceFailure,
    FactorizationBreakdown,
    RayleighResult,
    eig_sweep,
    min_generalized_eig,
    sweep_violations,
)
from .forms import (
    BandedForm,
    BoundaryConditionError,
    assemble_form,
    form_vector,
    half_power_stencil,
    rellich_form_margin,
    rellich_lhs,
    rellich_mass,
    sharp_constant,
    sharp_constant_exact,
)

__all__ = [
    'ChainReport',
    'ChainStep',
    'CounterexampleResult',
    'counterexample_build',
    'counterexample_gradient',
    'counterexample_sweep',
    'fit_lhs_constant',
    'iteration_chain_check',
    'PROFILES',
    'ContinuumConvergence',
    'ContinuumSample',
    'PolynomialBump',
    'SmoothBump',
    'continuum_convergence',
    'continuum_probe',
    'sample_profile',
    'ConvergenceFailure',
    'FactorizationBreakdown',
    'RayleighResult',
    'eig_sweep',
    'min_generalized_eig',
    'sweep_violations',
    'BandedForm',
    'BoundaryConditionError',
    'assemble_form',
    'form_vector',
    'half_power_stencil',
    'rellich_form_margin',
    'rellich_lhs',
    'rellich_mass',
    'sharp_constant',
    'sharp_constant_exact',
]
