"""Graph calculus package - weighted graphs and Hardy-Rellich identities"""
from .graph import (
    EdgeFunction,
    Graph,
    HypothesisViolation,
    MissingEdgeValueError,
    NonPositiveReferenceError,
    UnknownVertexError,
    VertexFunction,
    format_edge_list,
    parse_edge_list,
    path_graph,
    random_sparse_graph,
    random_tree,
    read_edge_list,
    write_edge_list,
)
from .operators import (
    apply_laplacian,
    dirichlet_ground_state,
    edge_divergence,
    edge_pairing,
    f_functional,
    grad_norm_sq,
    grad_pairing,
    graph_laplacian,
    hardy_weight,
    laplacian_powers,
    t_functional,
    weighted_energy,
)
from .identities import (
    IDENTITY_KINDS,
    IdentityReport,
    RellichWeight,
    identity_report,
    identity_residual,
    iterated_weight,
    leibniz_green_residual,
    parse_identity,
    rellich_weight_from_f,
)

__all__ = [
    'EdgeFunction',
    'Graph',
    'HypothesisViolation',
    'MissingEdgeValueError',
    'NonPositiveReferenceError',
    'UnknownVertexError',
    'VertexFunction',
    'format_edge_list',
    'parse_edge_list',
    'path_graph',
    'random_sparse_graph',
    'random_tree',
    'read_edge_list',
    'write_edge_list',
    'apply_laplacian',
    'dirichlet_ground_state',
    'edge_divergence',
    'edge_pairing',
    'f_functional',
    'grad_norm_sq',
    'grad_pairing',
    'graph_laplacian',
    'hardy_weight',
    'laplacian_powers',
    't_functional',
    'weighted_energy',
    'IDENTITY_KINDS',
    'IdentityReport',
    'RellichWeight',
    'identity_report',
    'identity_residual',
    'iterated_weight',
    'leibniz_green_residual',
    'parse_identity',
    'rellich_weight_from_f',
]
