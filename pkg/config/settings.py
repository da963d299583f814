"""
Configuration and Settings for the discrete Hardy-Rellich laboratory
"""
import os

VERSION = "1.0.0"

# ============================================================================
# TOLERANCES
# ============================================================================
TOLERANCES = {
    "identity": 1e-10,         # |LHS - RHS| <= tol * (|LHS| + |RHS| + 1)
    "green_leibniz": 1e-12,
    "hypothesis_strict": 1e-13,  # Δ^k f must exceed this * scale
    "nonnegativity": 1e-12,
    "dual_evaluation": 1e-12,
    "canonical_zero": 0.0,     # trimming uses exact zero only
}

# ============================================================================
# WEIGHT FAMILIES
# ============================================================================
WEIGHT_CONFIG = {
    "crossover_n": 64,
    "series_max_terms": 64,
    "series_stop_ratio": 1e-18,
    "shifted_hardy_order": 12,
    "direct_hardy_order": 16,
    "leray_series_order": 16,
    "leray_epsilon": 1e-6,
    "improved_rellich2_terms": 24,
    "gks_terms": 24,
    "extended_precision_dps": 40,
}

# Families accepted by WeightModel and the `weights` subcommand
WEIGHT_FAMILIES = [
    "kpp",
    "gks_reference",
    "shifted_hardy",
    "direct_hardy",
    "leray",
    "improved_rellich2",
    "landau_constant",
]

# ============================================================================
# SCALAR SCANS
# ============================================================================
SCAN_CONFIG = {
    "grid_points": 4000,
    "alpha_step": 1e-3,
    "strictness": 1e-9,
}

# ============================================================================
# EIGENSOLVER
# ============================================================================
EIGEN_CONFIG = {
    "tol": 1e-12,
    "residual_target": 1e-10,
    "warmup_steps": 3,
    "shift_factor": 0.9,
    "max_retries": 5,
    "max_iter": 500,
    "stall_tol": 1e-6,      # relative change below which a non-decreasing Rayleigh quotient counts as converged
    "inner_tol": 1e-10,     # conjugate gradient tolerance of the shifted solves
    "inner_max_iter": 400,
    "floor_factor": 64.0,   # attainable residual floor in units of eps * |A||v|
    "max_ell_exact": 12,
}

# ============================================================================
# CONTINUUM LIMIT / COUNTEREXAMPLE
# ============================================================================
CONTINUUM_CONFIG = {
    "min_M": 32,
    "endpoint_tolerance": 1e-12,
    "quad_dps": 30,
}

COUNTEREXAMPLE_CONFIG = {
    "M_list": [100, 1000, 10000],
}

# ============================================================================
# GRAPHS
# ============================================================================
GRAPH_CONFIG = {
    "conductance_low": 0.5,
    "conductance_high": 2.0,
    "edge_probability": 0.05,
    "max_vertices": 200,
}

# ============================================================================
# LATTICE Z^d
# ============================================================================
LATTICE_CONFIG = {
    "min_radius": 2,
    "min_check_radius": 5,
    "asymptotic_min_norm": 5.0,
    "ratio_norms": [10, 20, 50],
    "fit_t_values": [20, 30, 40, 60, 80, 100, 140, 200],
}

# ============================================================================
# L^p HARDY
# ============================================================================
LP_CONFIG = {
    "landau_tail_terms": 10_000,
    "default_p": 2.0,
    "default_trials": 20,
    "path_length": 60,
    "graph_size": 30,
    "landau_length": 50,
}

# ============================================================================
# OUTPUT
# ============================================================================
OUTPUT_CONFIG = {
    "csv_float_format": "%.17g",
    "json_indent": 2,
}

# ============================================================================
# COMMAND LINE
# ============================================================================
CLI_CONFIG = {
    "default_format": {
        "weights": "csv",
        "identity": "csv",
        "sharpness": "csv",
        "counterexample": "csv",
        "continuum": "csv",
        "zd": "json",
        "lp": "json",
    },
    "weights_range": "1..20",
    "sharpness_n_list": [100, 1000],
    "continuum_m_list": [256, 512, 1024],
    "identity_tree_size": 120,
    "identity_tree_window": 3,
    "identity_graph_size": 80,
    "identity_support_radius": 2,
    "identity_trials": 10,
    "zd_defaults": {"d": 2, "alpha": 1.0, "radius": 20, "trials": 20},
    "max_seed": 2 ** 64 - 1,
}

# ============================================================================
# RUNTIME ENVIRONMENT
# ============================================================================
THREADS_ENV = "HARDY_LAB_THREADS"
LOG_LEVEL_ENV = "HARDY_LAB_LOG_LEVEL"


def max_threads() -> int:
    """Worker thread cap from HARDY_LAB_THREADS (default: cpu count, at least 1)"""
    raw = os.getenv(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVEL = os.getenv(LOG_LEVEL_ENV, 'INFO')
