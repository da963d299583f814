"""
Tests for the ℓ^p graph calculus, the ℓ^p Hardy weight and Landau's inequality
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_core import (
    NonPositiveReferenceError,
    VertexFunction,
    grad_pairing,
    hardy_weight,
    path_graph,
    random_sparse_graph,
    t_functional,
    weighted_energy,
)
from lp_hardy import (
    LpParams,
    landau_check,
    lp_grad_norm,
    lp_hardy_check,
    lp_hardy_weight,
    lp_trials,
    picone_residual,
    power_reference,
    signed_power,
)
from seq_core import FiniteSequence
from weights import kpp_weight

seeds = st.integers(min_value=0, max_value=10 ** 6)


def random_positive(G, rng, low=0.1, high=1.0):
    return VertexFunction({x: float(rng.uniform(low, high)) for x in G.vertices})


# ============================================================================
# SIGNED POWER AND PARAMETERS
# ============================================================================

def test_signed_power_examples():
    assert signed_power(-2.0, 2) == -4.0
    assert signed_power(0.0, 0.5) == 0.0
    assert signed_power(3.0, 1.5) == pytest.approx(3.0 ** 1.5, rel=1e-15)
    assert signed_power(-3.0, 1.5) == pytest.approx(-(3.0 ** 1.5), rel=1e-15)


def test_signed_power_on_arrays():
    t = np.array([-2.0, 0.0, 0.5])
    np.testing.assert_allclose(signed_power(t, 3), [-8.0, 0.0, 0.125])


def test_signed_power_rejects_nonpositive_exponent():
    with pytest.raises(ValueError):
        signed_power(1.0, 0)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, float('nan')])
def test_lp_params_rejects_small_p(p):
    with pytest.raises(ValueError):
        LpParams(p)


def test_lp_params_constant():
    assert LpParams(2).conjugate_constant == 0.25
    assert LpParams(3).conjugate_constant == pytest.approx(8 / 27)


# ============================================================================
# p-GRADIENT AND PICONE
# ============================================================================

def test_lp_grad_norm_reduces_to_gradient_at_p2():
    G = random_sparse_graph(25, p=0.2, seed=3)
    rng = np.random.default_rng(3)
    u = VertexFunction({x: float(rng.uniform(-1, 1)) for x in G.vertices})
    for x in G.vertices:
        assert lp_grad_norm(G, u, 2.0, x) == pytest.approx(grad_pairing(G, u, u, x), rel=1e-13, abs=1e-15)


def test_lp_grad_norm_of_constant_is_zero():
    G = random_sparse_graph(15, p=0.3, seed=1)
    u = VertexFunction.constant(G, 2.5)
    assert all(lp_grad_norm(G, u, 3.0, x) == 0.0 for x in G.vertices)


def test_lp_grad_norm_delta_on_path():
    G = path_graph(5)
    assert lp_grad_norm(G, VertexFunction({1: 1.0}), 3.0, 1) == 1.0


def test_lp_grad_norm_uses_conductance_power():
    G = path_graph(3, conductance=lambda n: float(n))
    u = VertexFunction({1: 1.0})
    # edges (0,1) with b = 1 and (1,2) with b = 2
    assert lp_grad_norm(G, u, 3.0, 1) == pytest.approx(0.5 * (1.0 + 4.0))


def test_picone_equality_cases():
    G = random_sparse_graph(20, p=0.3, seed=5)
    f = random_positive(G, np.random.default_rng(5))
    zero = VertexFunction()
    u = VertexFunction({x: 3.0 * f(x) for x in G.vertices})
    for x, y, _b in G.edges():
        assert picone_residual(G, u, f, 2.5, x, y) == pytest.approx(0.0, abs=1e-12)
        assert picone_residual(G, zero, f, 2.5, x, y) == 0.0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_picone_residual_nonnegative(p):
    rng = np.random.default_rng(int(p * 10))
    count = 0
    while count < 1000:
        G = random_sparse_graph(30, p=0.2, seed=count)
        f = random_positive(G, rng)
        u = VertexFunction({x: float(rng.uniform(0, 1)) for x in G.vertices})
        for x, y, _b in G.edges():
            assert picone_residual(G, u, f, p, x, y) >= -1e-12
            count += 1


def test_picone_rejects_bad_input():
    G = path_graph(4)
    u = VertexFunction({1: 1.0})
    with pytest.raises(NonPositiveReferenceError):
        picone_residual(G, u, VertexFunction({1: 1.0}), 2.0, 1, 2)
    with pytest.raises(ValueError):
        picone_residual(G, u, VertexFunction.constant(G, 1.0), 2.0, 1, 3)


# ============================================================================
# ℓ^p HARDY WEIGHT
# ============================================================================

@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_lp_weight_reduces_to_ground_state_weight(seed):
    G = random_sparse_graph(15, p=0.3, seed=seed)
    rng = np.random.default_rng(seed)
    V = random_positive(G, rng, 0.5, 2.0)
    f = random_positive(G, rng)
    for x in G.vertices:
        expected = t_functional(G, V, f, x) / f(x)
        assert lp_hardy_weight(G, V, f, 2.0, x) == pytest.approx(expected, rel=1e-12, abs=1e-12)
        assert lp_hardy_weight(G, V, f, 2.0, x) == pytest.approx(hardy_weight(G, V, f, x), rel=1e-12, abs=1e-12)


def test_lp_weight_on_path_is_kpp():
    G = path_graph(30)
    V = VertexFunction.constant(G, 1.0)
    f = power_reference(G, 2.0)
    for n in range(1, 21):
        assert lp_hardy_weight(G, V, f, 2.0, n) == pytest.approx(kpp_weight(n), rel=1e-12)


def test_lp_weight_p3_by_hand():
    G = path_graph(20)
    V = VertexFunction.constant(G, 1.0)
    f = VertexFunction({n: float(n) ** (1 / 3) for n in G.vertices})
    f9, f10, f11 = f(9), f(10), f(11)
    expected = ((f10 - f9) ** 2 - (f11 - f10) ** 2) / f10 ** 2
    assert lp_hardy_weight(G, V, f, 3.0, 10) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.5, 4.0])
def test_lp_weight_matches_double_sum(p):
    G = path_graph(12, conductance=lambda n: 1.0 + 0.1 * n)
    rng = np.random.default_rng(7)
    V = random_positive(G, rng, 0.5, 2.0)
    f = random_positive(G, rng)
    for x in range(1, 12):
        total = sum(
            0.5 * b ** (p - 1) * (V(x) + V(y)) * signed_power(f(x) - f(y), p - 1)
            for y, b in G.neighbors(x)
        )
        assert lp_hardy_weight(G, V, f, p, x) == pytest.approx(total / f(x) ** (p - 1), rel=1e-12, abs=1e-14)


def test_lp_weight_needs_positive_reference():
    G = path_graph(5)
    with pytest.raises(NonPositiveReferenceError):
        lp_hardy_weight(G, VertexFunction.constant(G, 1.0), VertexFunction({1: 1.0}), 3.0, 0)


# ============================================================================
# ℓ^p HARDY INEQUALITY
# ============================================================================

def test_lp_check_reduces_at_p2():
    G = random_sparse_graph(25, p=0.2, seed=11)
    rng = np.random.default_rng(11)
    V = random_positive(G, rng, 0.5, 2.0)
    f = random_positive(G, rng)
    u = VertexFunction({x: float(rng.uniform(0, 1)) for x in G.vertices[:12]})
    form = lp_hardy_check(G, V, f, u, 2.0)
    assert form.energy == pytest.approx(weighted_energy(G, V, u), rel=1e-13)
    mass = math.fsum(hardy_weight(G, V, f, x) * u(x) ** 2 for x in u.support())
    assert form.weighted_mass == pytest.approx(mass, rel=1e-13, abs=1e-13)


@given(seed=seeds, p=st.sampled_from([1.2, 1.5, 2.0, 3.0, 5.0]))
@settings(max_examples=50, deadline=None)
def test_lp_check_nonnegative_with_identity(seed, p):
    G = random_sparse_graph(20, p=0.25, seed=seed)
    rng = np.random.default_rng(seed)
    V = random_positive(G, rng, 0.5, 2.0)
    f = random_positive(G, rng)
    u = VertexFunction({x: float(rng.uniform(0, 1)) for x in G.vertices if rng.random() < 0.6})
    form = lp_hardy_check(G, V, f, u, p)
    assert form.margin >= -1e-12 * form.scale
    assert form.residual <= 1e-10 * form.scale


def test_lp_check_on_path_with_vanishing_reference():
    G = path_graph(40)
    V = VertexFunction.constant(G, 1.0)
    f = power_reference(G, 3.0)
    u = VertexFunction({n: 1.0 / n for n in range(1, 30)})
    form = lp_hardy_check(G, V, f, u, 3.0)
    assert form.margin >= 0
    assert form.residual <= 1e-10 * form.scale


def test_lp_check_equality_for_multiple_of_reference():
    G = random_sparse_graph(20, p=0.3, seed=2)
    rng = np.random.default_rng(2)
    V = random_positive(G, rng, 0.5, 2.0)
    f = random_positive(G, rng)
    u = VertexFunction({x: 2.0 * f(x) for x in G.vertices})
    form = lp_hardy_check(G, V, f, u, 2.5)
    assert form.margin == pytest.approx(0.0, abs=1e-10 * form.scale)


def test_lp_check_zero_and_errors():
    G = path_graph(6)
    V = VertexFunction.constant(G, 1.0)
    f = power_reference(G, 2.0)
    assert lp_hardy_check(G, V, f, VertexFunction(), 2.0).margin == 0.0
    with pytest.raises(ValueError):
        lp_hardy_check(G, V, f, VertexFunction({2: -1.0}), 2.0)
    with pytest.raises(NonPositiveReferenceError):
        lp_hardy_check(G, V, VertexFunction({n: -1.0 for n in G.vertices}), VertexFunction({2: 1.0}), 2.0)


# ============================================================================
# LANDAU
# ============================================================================

def test_landau_delta_p2():
    report = landau_check(FiniteSequence.delta(1, 1.0), 2.0)
    assert report.rhs == 1.0
    assert report.last_index == 1 + 10_000
    # ¼ Σ_{n ≤ K} 1/n² lies within ¼/K of ¼ ζ(2)
    assert 0.25 * math.pi ** 2 / 6 - 0.25 / 10_000 < report.lhs < 0.25 * math.pi ** 2 / 6
    assert report.tail_bound == pytest.approx(1.0 / 10_001)
    assert report.certified_margin < report.margin
    assert report.certified_margin > 0.5


def test_landau_zero_sequence():
    report = landau_check(FiniteSequence.zero(), 3.0)
    assert (report.lhs, report.rhs, report.margin) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("N", [10, 100])
def test_landau_constant_sequence(N):
    report = landau_check(FiniteSequence.from_values([1.0] * N, offset=1), 3.0)
    assert report.rhs == pytest.approx(float(N))
    assert report.margin > 0


def test_landau_rejects_bad_sequences():
    with pytest.raises(ValueError):
        landau_check(FiniteSequence.from_values([1.0, -0.5], offset=1), 2.0)
    with pytest.raises(ValueError):
        landau_check(FiniteSequence.delta(0, 1.0), 2.0)
    with pytest.raises(ValueError):
        landau_check(FiniteSequence.delta(1, 1.0), 1.0)


@given(seed=seeds, p=st.sampled_from([1.1, 1.5, 2.0, 3.0, 10.0]))
@settings(max_examples=200, deadline=None)
def test_landau_random_sequences(seed, p):
    rng = np.random.default_rng(seed)
    values = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 40)))
    report = landau_check(FiniteSequence.from_values(values.tolist(), offset=1), p, tail_terms=2000)
    assert report.margin >= -1e-12 * report.scale


# ============================================================================
# RANDOMIZED RUN
# ============================================================================

@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_lp_trials_hold(p):
    report = lp_trials(p, trials=4, seed=0)
    assert report.holds
    assert len(report.path_forms) == len(report.graph_forms) == len(report.landau) == 4
    assert report.max_identity_residual <= 1e-10
    assert report.notes


def test_lp_trials_reproducible():
    a = lp_trials(2.5, trials=3, seed=9).to_dict()
    b = lp_trials(2.5, trials=3, seed=9).to_dict()
    assert a == b
    assert a['params'] == {'p': 2.5, 'trials': 3, 'seed': 9}


def test_lp_trials_rejects_negative_trials():
    with pytest.raises(ValueError):
        lp_trials(2.0, trials=-1)
