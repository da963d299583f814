"""
Tests for graph calculus, the T / F functionals and the Hardy-Rellich identities
"""
import math
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_core import (
    EdgeFunction,
    Graph,
    HypothesisViolation,
    MissingEdgeValueError,
    NonPositiveReferenceError,
    UnknownVertexError,
    VertexFunction,
    apply_laplacian,
    dirichlet_ground_state,
    edge_divergence,
    edge_pairing,
    f_functional,
    format_edge_list,
    grad_norm_sq,
    grad_pairing,
    graph_laplacian,
    hardy_weight,
    identity_report,
    identity_residual,
    iterated_weight,
    laplacian_powers,
    leibniz_green_residual,
    parse_edge_list,
    parse_identity,
    path_graph,
    random_sparse_graph,
    random_tree,
    rellich_weight_from_f,
    t_functional,
    weighted_energy,
)
from seq_core import FiniteSequence, laplace
from weights import direct_hardy_weight, kpp_weight, shifted_hardy_weight

seeds = st.integers(min_value=0, max_value=10 ** 6)


def random_function(G, rng, low=-1.0, high=1.0, vertices=None):
    verts = G.vertices if vertices is None else vertices
    return VertexFunction({x: rng.uniform(low, high) for x in verts})


def delta(x, value=1.0):
    return VertexFunction({x: value})


# ============================================================================
# GRAPH STRUCTURE
# ============================================================================

def test_graph_rejects_self_loops_and_bad_weights():
    g = nx.Graph()
    g.add_edge(0, 0, weight=1.0)
    with pytest.raises(ValueError):
        Graph(g)
    with pytest.raises(ValueError):
        Graph.from_edges([(0, 1, 0.0)])
    with pytest.raises(ValueError):
        Graph.from_edges([(0, 1, -2.0)])
    with pytest.raises(ValueError):
        Graph(nx.DiGraph([(0, 1)]))


def test_graph_is_symmetric():
    G = Graph.from_edges([(0, 1, 2.5), (1, 2, 0.5)])
    assert G.weight(0, 1) == G.weight(1, 0) == 2.5
    assert G.weight(0, 2) == 0.0
    assert G.is_connected()


def test_conflicting_edge_weights():
    with pytest.raises(ValueError):
        Graph.from_edges([(0, 1, 1.0), (1, 0, 2.0)])


def test_unknown_vertex():
    G = path_graph(3)
    with pytest.raises(UnknownVertexError):
        G.neighbors(17)
    with pytest.raises(UnknownVertexError):
        graph_laplacian(G, VertexFunction(), 17)


def test_missing_edge_value():
    G = path_graph(2)
    F = EdgeFunction({(0, 1): 1.0, (1, 0): -1.0})
    with pytest.raises(MissingEdgeValueError):
        edge_divergence(G, F, 1)


def test_ball_and_distances():
    G = path_graph(10)
    assert G.ball([5], 2) == {3, 4, 5, 6, 7}
    assert G.distances_from(0)[10] == 10


def test_path_graph_conductance_and_zero_edges():
    G = path_graph(5, conductance=lambda n: 0.0 if n == 3 else float(n))
    assert G.weight(3, 4) == 4.0
    assert G.weight(2, 3) == 0.0
    assert not G.is_connected()


def test_random_tree_structure():
    G = random_tree(50, seed=3, window=4)
    assert len(G) == 50
    assert G.number_of_edges() == 49
    assert G.is_connected()
    assert all(0.5 <= b <= 2.0 for _x, _y, b in G.edges())


def test_random_sparse_graph_is_reproducible():
    a = random_sparse_graph(40, 0.1, seed=9)
    b = random_sparse_graph(40, 0.1, seed=9)
    assert format_edge_list(a) == format_edge_list(b)


def test_edge_list_parse_and_format():
    text = "# comment\n0 1 2.0\n1 2 0.5  # trailing\n\n"
    G = parse_edge_list(text)
    assert len(G) == 3
    assert G.weight(2, 1) == 0.5
    again = parse_edge_list(format_edge_list(G))
    assert sorted(again.edges()) == sorted(G.edges())


@pytest.mark.parametrize("text", ["0 1\n", "a b 1.0\n", "-1 2 1.0\n", "0 1 0\n"])
def test_edge_list_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_edge_list(text)


def test_laplacian_matrix_matches_operator():
    G = random_sparse_graph(30, 0.2, seed=1)
    rng = random.Random(1)
    f = random_function(G, rng)
    L = G.laplacian_matrix(nodelist=list(G.vertices))
    vec = L @ np.array([f(x) for x in G.vertices])
    for i, x in enumerate(G.vertices):
        assert vec[i] == pytest.approx(graph_laplacian(G, f, x), abs=1e-12)


# ============================================================================
# OPERATORS
# ============================================================================

def test_laplacian_of_delta_on_short_path():
    G = path_graph(2)
    f = delta(1)
    assert graph_laplacian(G, f, 1) == 2
    assert graph_laplacian(G, f, 0) == -1
    assert graph_laplacian(G, f, 2) == -1


def test_laplacian_of_constant_vanishes():
    G = random_sparse_graph(25, 0.2, seed=4)
    f = VertexFunction.constant(G, 3.7)
    assert all(graph_laplacian(G, f, x) == 0 for x in G.vertices)


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_path_laplacian_reproduces_sequence_laplacian(seed):
    rng = random.Random(seed)
    values = [rng.randint(-20, 20) for _ in range(20)]
    u = FiniteSequence.from_values(values, 3)
    G = path_graph(30)
    f = VertexFunction({n: float(u(n)) for n in G.vertices})
    lap = laplace(u)
    for n in range(1, 30):
        assert graph_laplacian(G, f, n) == lap(n)


def test_grad_pairing_of_delta():
    G = path_graph(2)
    f = delta(1)
    assert grad_pairing(G, f, f, 1) == 1
    assert grad_pairing(G, f, f, 0) == 0.5
    assert grad_pairing(G, f, f, 2) == 0.5
    assert grad_pairing(G, f, VertexFunction.constant(G, 2.0), 1) == 0


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_grad_pairing_symmetric_and_nonnegative(seed):
    rng = random.Random(seed)
    G = random_sparse_graph(30, 0.15, seed=seed)
    f, g = random_function(G, rng), random_function(G, rng)
    for x in G.vertices:
        assert grad_pairing(G, f, g, x) == pytest.approx(grad_pairing(G, g, f, x), abs=1e-14)
        assert grad_norm_sq(G, f, x) >= 0


def test_divergence_of_symmetric_kernel_vanishes():
    G = random_sparse_graph(20, 0.2, seed=2)
    F = EdgeFunction.from_callable(G, lambda x, y: float(x + y))
    assert all(edge_divergence(G, F, x) == 0 for x in G.vertices)


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_divergence_duality(seed):
    rng = random.Random(seed)
    G = random_tree(40, seed=seed)
    F = EdgeFunction.from_callable(G, lambda x, y: rng.uniform(-1, 1))
    h = random_function(G, rng)
    left = -sum(edge_divergence(G, F, x) * h(x) for x in G.vertices)
    right = edge_pairing(G, F, EdgeFunction.gradient(G, h))
    assert left == pytest.approx(right, abs=1e-12 * (1 + abs(right)))


def test_gradient_is_antisymmetric():
    G = random_tree(20, seed=5)
    rng = random.Random(5)
    assert EdgeFunction.gradient(G, random_function(G, rng)).is_antisymmetric(tol=0.0)


def test_path_divergence_matches_link_sequence():
    # F = ∇f on the ℕ-path: div F(n) = -Δf(n)
    G = path_graph(20)
    rng = random.Random(11)
    f = random_function(G, rng)
    F = EdgeFunction.gradient(G, f)
    for n in range(1, 20):
        assert edge_divergence(G, F, n) == pytest.approx(-graph_laplacian(G, f, n), abs=1e-14)


def test_t_functional_simple_cases():
    G = random_sparse_graph(25, 0.2, seed=6)
    rng = random.Random(6)
    f = random_function(G, rng, 0.5, 2.0)
    one = VertexFunction.constant(G, 1.0)
    for x in G.vertices:
        assert t_functional(G, one, f, x) == pytest.approx(graph_laplacian(G, f, x), abs=1e-14)
        assert t_functional(G, random_function(G, rng), VertexFunction.constant(G, 2.0), x) == 0


@given(seed=seeds)
@settings(max_examples=25, deadline=None)
def test_t_functional_is_minus_divergence(seed):
    rng = random.Random(seed)
    G = random_sparse_graph(60, 0.08, seed=seed)
    V = random_function(G, rng, 0.0, 2.0)
    f = random_function(G, rng, 0.5, 2.0)
    E = EdgeFunction.from_callable(G, lambda x, y: V(x) * (f(x) - f(y)))
    for x in G.vertices:
        t = t_functional(G, V, f, x)
        assert t == pytest.approx(-edge_divergence(G, E, x), abs=1e-12 * (1 + abs(t)))


# ============================================================================
# CROSS-CHECKS WITH THE 1-D WEIGHTS
# ============================================================================

@pytest.mark.parametrize("n", [3, 10, 25])
def test_shifted_hardy_weight_from_path_graph(n):
    alpha = -2.0
    G = path_graph(40, conductance=lambda k: float(k - 1) ** alpha, start=1)
    one = VertexFunction.constant(G, 1.0)
    f = VertexFunction.from_callable(G, lambda k: float(k) ** ((1 - alpha) / 2))
    assert hardy_weight(G, one, f, n) == pytest.approx(shifted_hardy_weight(alpha, n), rel=1e-12)


@pytest.mark.parametrize("alpha,n", [(0.0, 5), (0.5, 1), (0.5, 7), (3.0, 1), (3.0, 4), (2.0, 9)])
def test_direct_hardy_weight_from_path_graph(alpha, n):
    shift = 0 if alpha <= 1 else 1
    G = path_graph(30, conductance=lambda k: float(k) ** alpha)
    one = VertexFunction.constant(G, 1.0)
    f = VertexFunction.from_callable(G, lambda k: float(k + shift) ** ((1 - alpha) / 2) if k > 0 else 0.0)
    value, _bound = direct_hardy_weight(alpha, n)
    assert hardy_weight(G, one, f, n) == pytest.approx(value, rel=1e-12)


def test_kpp_from_rellich_weight():
    G = path_graph(60)
    f = VertexFunction.from_callable(G, lambda n: math.sqrt(n))
    result = rellich_weight_from_f(G, f, 1, region=range(1, 60))
    assert result.hypotheses_hold
    for n in range(1, 60):
        assert result.weight(n) == pytest.approx(kpp_weight(n), rel=1e-12)


def test_rellich_weight_matches_stencil_composition():
    G = path_graph(40)
    f = VertexFunction.from_callable(G, lambda n: math.exp(-1.0 / (n + 1)))
    seq = FiniteSequence.from_values([f(n) for n in range(41)], 0)
    result = rellich_weight_from_f(G, f, 2, region=range(2, 39))
    quotient = laplace(laplace(seq))
    for n in range(2, 39):
        assert result.weight(n) == pytest.approx(quotient(n) / f(n), rel=1e-9, abs=1e-13)


def test_rellich_weight_of_constant():
    G = path_graph(10)
    result = rellich_weight_from_f(G, VertexFunction.constant(G, 1.0), 2, region=range(1, 10))
    assert all(result.weight(n) == 0 for n in range(1, 10))
    assert not result.hypotheses_hold
    assert all(k >= 1 for _x, k, _v in result.failures)


def test_rellich_weight_rejects_nonpositive_reference():
    G = path_graph(10)
    with pytest.raises(NonPositiveReferenceError):
        rellich_weight_from_f(G, VertexFunction.from_callable(G, float), 1)


# ============================================================================
# F FUNCTIONAL AND FIRST ORDER EQUALITY
# ============================================================================

def test_f_functional_vanishes_for_multiples_of_f():
    G = path_graph(5)
    rng = random.Random(3)
    f = random_function(G, rng, 0.5, 2.0)
    u = f.map(lambda v: 2.0 * v)
    assert f_functional(G, VertexFunction.constant(G, 1.0), f, u) == pytest.approx(0.0, abs=1e-12)
    assert f_functional(G, VertexFunction.constant(G, 1.0), f, VertexFunction()) == 0.0


def test_f_functional_of_delta_two():
    G = path_graph(10)
    one = VertexFunction.constant(G, 1.0)
    f = VertexFunction.from_callable(G, lambda n: math.sqrt(n))
    u = delta(2)
    F = f_functional(G, one, f, u)
    assert F > 0
    assert F == pytest.approx(weighted_energy(G, one, u) - kpp_weight(2), rel=1e-13)


def test_f_functional_needs_positive_reference():
    G = path_graph(5)
    one = VertexFunction.constant(G, 1.0)
    f = VertexFunction({x: 1.0 for x in G.vertices if x != 3})
    with pytest.raises(NonPositiveReferenceError):
        f_functional(G, one, f, delta(3))


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_first_order_on_natural_numbers(seed):
    rng = random.Random(seed)
    G = path_graph(60)
    one = VertexFunction.constant(G, 1.0)
    f = VertexFunction.from_callable(G, lambda n: math.sqrt(n))
    u = random_function(G, rng, vertices=range(1, 50))
    report = identity_report(G, one, f, u, 'first_order')
    assert report.holds
    assert report.terms['F'] >= 0


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_first_order_on_random_graphs(seed):
    rng = random.Random(seed)
    G = random_sparse_graph(80, 0.06, seed=seed)
    V = random_function(G, rng, 0.0, 2.0)
    f = random_function(G, rng, 0.2, 3.0)
    u = random_function(G, rng, vertices=G.vertices[:30])
    assert identity_residual(G, V, f, u, 'first_order') <= 1e-10 * (1 + weighted_energy(G, V, u))
    # the weighted Hardy inequality is the nonnegativity of F
    assert f_functional(G, V, f, u) >= -1e-14


def test_zero_test_function():
    G = path_graph(10)
    one = VertexFunction.constant(G, 1.0)
    assert identity_residual(G, one, one, VertexFunction(), 'iterated(2)') == 0.0


# ============================================================================
# SECOND ORDER AND ITERATED EQUALITIES
# ============================================================================

@given(seed=seeds)
@settings(max_examples=25, deadline=None)
def test_second_order_on_random_graphs(seed):
    rng = random.Random(seed)
    G = random_sparse_graph(60, 0.08, seed=seed)
    V = random_function(G, rng, 0.0, 2.0)
    f = random_function(G, rng, 0.2, 3.0)
    u = random_function(G, rng, vertices=G.vertices[:20])
    report = identity_report(G, V, f, u, 'second_order')
    assert report.m == 1
    assert report.holds


def _deep_instance(seed, m, r0=2):
    """Path-like tree, ground state on a ball and u supported deep inside"""
    G = random_tree(120, seed=seed, window=3)
    center = 60
    interior = G.ball([center], r0 + 2 * m + 1)
    f, _lam = dirichlet_ground_state(G, interior)
    rng = random.Random(seed)
    u = random_function(G, rng, vertices=sorted(G.ball([center], r0)))
    return G, f, u


@pytest.mark.parametrize("m", [1, 2, 3])
@given(seed=seeds)
@settings(max_examples=8, deadline=None)
def test_iterated_equality(m, seed):
    G, f, u = _deep_instance(seed, m)
    one = VertexFunction.constant(G, 1.0)
    report = identity_report(G, one, f, u, f'iterated({m})')
    assert report.which == 'iterated' and report.m == m
    assert report.holds


@pytest.mark.parametrize("m", [1, 2])
@given(seed=seeds)
@settings(max_examples=8, deadline=None)
def test_odd_order_equality(m, seed):
    G, f, u = _deep_instance(seed, m + 1)
    one = VertexFunction.constant(G, 1.0)
    report = identity_report(G, one, f, u, 'odd_order', m)
    assert report.holds


def test_hypothesis_violation_reports_vertex_and_order():
    G = path_graph(30)
    one = VertexFunction.constant(G, 1.0)
    u = delta(15)
    with pytest.raises(HypothesisViolation) as info:
        identity_report(G, one, one, u, 'iterated(2)')
    assert info.value.k == 1
    assert info.value.to_dict()['k'] == 1


def test_parse_identity():
    assert parse_identity('iterated(2)') == ('iterated', 2)
    assert parse_identity('odd_order', 3) == ('odd_order', 3)
    assert parse_identity('second_order') == ('second_order', 1)
    with pytest.raises(ValueError):
        parse_identity('third_order')
    with pytest.raises(ValueError):
        parse_identity('iterated')


def test_unknown_identity_rejected_by_report():
    G = path_graph(5)
    one = VertexFunction.constant(G, 1.0)
    with pytest.raises(ValueError):
        identity_report(G, one, one, delta(2), 'zeroth_order')


# ============================================================================
# GROUND STATES AND ITERATED WEIGHTS
# ============================================================================

def test_dirichlet_ground_state_eigen_equation():
    G = random_tree(80, seed=7, window=3)
    interior = G.ball([40], 6)
    f, lam = dirichlet_ground_state(G, interior)
    assert lam > 0
    assert all(f(x) > 0 for x in interior)
    assert all(f(x) == 0 for x in G.vertices if x not in interior)
    for x in interior:
        assert graph_laplacian(G, f, x) == pytest.approx(lam * f(x), abs=1e-12)


def test_iterated_weight_deep_inside():
    G = random_tree(100, seed=8, window=3)
    interior = G.ball([50], 8)
    f, lam = dirichlet_ground_state(G, interior)
    deep = G.ball([50], 6)
    W = iterated_weight(G, VertexFunction.constant(G, 1.0), f, 1, region=deep)
    for x in deep:
        assert W(x) == pytest.approx(lam ** 2, rel=1e-8)


def test_laplacian_powers_shape():
    G = path_graph(10)
    powers = laplacian_powers(G, VertexFunction.constant(G, 1.0), 3)
    assert len(powers) == 4
    assert all(p(5) == 0 for p in powers[1:])
    assert apply_laplacian(G, delta(5))(5) == 2


# ============================================================================
# GREEN / LEIBNIZ
# ============================================================================

def test_leibniz_with_constant():
    G = random_tree(30, seed=1)
    rng = random.Random(1)
    assert leibniz_green_residual(G, VertexFunction.constant(G, 2.0), random_function(G, rng)) <= 1e-15


def test_leibniz_on_star_graph():
    G = Graph(nx.star_graph(5))
    assert leibniz_green_residual(G, delta(0), delta(0)) <= 1e-15
    assert leibniz_green_residual(G, delta(0), delta(3)) <= 1e-15


@given(seed=seeds)
@settings(max_examples=100, deadline=None)
def test_green_leibniz_on_random_trees(seed):
    rng = random.Random(seed)
    G = random_tree(40, seed=seed)
    f, g = random_function(G, rng), random_function(G, rng, vertices=G.vertices[:15])
    assert leibniz_green_residual(G, f, g) <= 1e-12
