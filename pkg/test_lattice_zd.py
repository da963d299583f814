"""
Tests for the ℤ^d box calculus, the weighted Hardy weights and the ℤ² Leray weight
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_core import graph_laplacian, hardy_weight
from lattice_zd import (
    BoxDomain,
    LatticeFunction,
    OutOfBoxError,
    field_to_vertex_function,
    leray_z2_asymptotic,
    leray_z2_check,
    leray_z2_weight,
    zd_coefficients,
    zd_fit_subleading,
    zd_form_margin,
    zd_inequality_check,
    zd_laplacian,
    zd_subleading_bound,
    zd_weight_asymptotic,
    zd_weight_exact,
    zd_weight_field,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


# ============================================================================
# BOX AND LAPLACIAN
# ============================================================================

def test_box_validation():
    with pytest.raises(ValueError):
        BoxDomain(1, 5)
    with pytest.raises(ValueError):
        BoxDomain(2, 1)
    with pytest.raises(OutOfBoxError):
        BoxDomain(2, 3, frozenset({(4, 0)}))
    assert BoxDomain(3, 4).excluded == frozenset({(0, 0, 0)})


def test_lattice_function_vanishes_on_collar_and_origin():
    domain = BoxDomain(2, 3)
    with pytest.raises(ValueError):
        LatticeFunction.delta(domain, (3, 0))
    with pytest.raises(ValueError):
        LatticeFunction.delta(domain, (0, 0))
    assert LatticeFunction.delta(domain, (1, 2))((1, 2)) == 1.0


def test_laplacian_of_delta():
    domain = BoxDomain(2, 4)
    u = LatticeFunction.delta(domain, (1, 2))
    assert zd_laplacian(u, (1, 2)) == 4.0
    for y in [(2, 2), (0, 2), (1, 3), (1, 1)]:
        assert zd_laplacian(u, y) == -1.0
    assert zd_laplacian(u, (2, 3)) == 0.0


def test_laplacian_of_constant_and_coordinate():
    domain = BoxDomain(3, 4, frozenset())
    const = LatticeFunction.from_callable(domain, lambda x: 2.5)
    coord = LatticeFunction.from_callable(domain, lambda x: float(x[0]))
    for x in itertools.product(range(-2, 3), repeat=3):
        assert zd_laplacian(const, x) == 0.0
        assert zd_laplacian(coord, x) == 0.0


def test_laplacian_out_of_box():
    domain = BoxDomain(2, 3)
    u = LatticeFunction.zero(domain)
    with pytest.raises(OutOfBoxError):
        zd_laplacian(u, (3, 0))


@pytest.mark.parametrize("d,R", [(2, 4), (3, 3)])
def test_laplacian_matches_graph_laplacian(d, R):
    domain = BoxDomain(d, R)
    G = domain.to_graph()
    rng = np.random.default_rng(d)
    u = LatticeFunction.random(domain, rng)
    uv = u.to_vertex_function()
    for x in itertools.product(range(-R + 1, R), repeat=d):
        assert abs(zd_laplacian(u, x) - graph_laplacian(G, uv, x)) <= 1e-14


# ============================================================================
# WEIGHTS
# ============================================================================

@pytest.mark.parametrize("alpha,d", [(1.0, 2), (0.0, 3), (2.0, 4), (-0.5, 3)])
def test_weight_field_matches_graph_hardy_weight(alpha, d):
    R = 4 if d == 2 else 3
    domain = BoxDomain(d, R)
    V, f, w = zd_weight_field(alpha, domain)
    G = domain.to_graph()
    Vv = field_to_vertex_function(domain, V)
    fv = field_to_vertex_function(domain, f)
    for x in itertools.product(range(-R + 1, R), repeat=d):
        if not any(x):
            continue
        expected = hardy_weight(G, Vv, fv, x)
        assert w[domain.index(x)] == pytest.approx(expected, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("alpha,d", [(1.0, 2), (0.0, 3), (2.0, 4)])
def test_weight_field_matches_exact_weight(alpha, d):
    domain = BoxDomain(d, 6)
    _V, _f, w = zd_weight_field(alpha, domain)
    for x in [(1,) + (0,) * (d - 1), (2, 3) + (0,) * (d - 2), (5,) * d, (-4, 1) + (2,) * (d - 2)]:
        assert w[domain.index(x)] == pytest.approx(zd_weight_exact(alpha, d, x), rel=1e-12)


def test_weight_symmetry():
    base = zd_weight_exact(0.5, 3, (7, 2, 3))
    for perm in itertools.permutations((7, 2, 3)):
        for signs in itertools.product((1, -1), repeat=3):
            x = tuple(s * c for s, c in zip(signs, perm))
            assert zd_weight_exact(0.5, 3, x) == pytest.approx(base, rel=1e-15)


def test_weight_rejects_bad_input():
    with pytest.raises(ValueError):
        zd_weight_exact(-1.5, 3, (1, 0, 0))
    with pytest.raises(ValueError):
        zd_weight_exact(0.0, 3, (0, 0, 0))


def test_leading_constant_three_dimensions():
    r = 200
    assert zd_weight_exact(0.0, 3, (r, 0, 0)) * r * r == pytest.approx(0.25, rel=1e-3)


def test_exact_against_expansion_two_dimensions():
    exact = zd_weight_exact(1.0, 2, (10, 0))
    assert exact == pytest.approx(zd_weight_asymptotic(1.0, 2, (10, 0), order=2), rel=1e-2)


def test_expansion_orders():
    x = (30, 4, 0)
    r = math.sqrt(30 ** 2 + 4 ** 2)
    assert zd_weight_asymptotic(0.0, 3, x, order=1) == pytest.approx(0.25 / r ** 2, rel=1e-14)
    assert zd_weight_asymptotic(0.0, 3, (2, 1, 0)) is None
    with pytest.raises(ValueError):
        zd_weight_asymptotic(0.0, 3, x, order=3)


def test_isotropic_coefficient_three_dimensions():
    c = zd_coefficients(0.0, 3)
    assert c.leading == pytest.approx(0.25)
    assert c.isotropic == pytest.approx(15 / 8, rel=1e-15)
    assert c.anisotropic == pytest.approx(585 / 192, rel=1e-14)


@pytest.mark.parametrize("alpha,d", [(0.5, 2), (1.0, 2), (0.5, 3), (2.0, 4), (-0.5, 5), (3.5, 3)])
def test_closed_form_coefficients(alpha, d):
    c = zd_coefficients(alpha, d)
    assert c.leading == pytest.approx((d - 2 + alpha) ** 2 / 4, rel=1e-14, abs=1e-15)
    closed = (d - 2 + alpha) * (3 * d + 6 + 2 * alpha ** 2 - 5 * alpha) / 8
    assert c.isotropic == pytest.approx(closed, rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("alpha,d", [(0.0, 2), (-1.0, 3), (-2.5, 4)])
def test_coefficients_reject_boundary_exponent(alpha, d):
    with pytest.raises(ValueError):
        zd_coefficients(alpha, d)


@pytest.mark.parametrize("alpha,d,anisotropic,axis,diagonal", [
    (0.0, 3, 585 / 192, 15 / 8 - 585 / 192, 15 / 8 - 585 / 576),
    (1.0, 2, 99 / 64, -27 / 64, 45 / 128),
    (2.0, 4, 16.0, -8.0, 4.0),
])
def test_anisotropic_coefficient_with_weight_exponent(alpha, d, anisotropic, axis, diagonal):
    c = zd_coefficients(alpha, d)
    assert c.anisotropic == pytest.approx(anisotropic, rel=1e-14)
    assert c.isotropic - c.anisotropic == pytest.approx(axis, rel=1e-13)
    assert c.isotropic - c.anisotropic / d == pytest.approx(diagonal, rel=1e-13)


def test_subleading_fit_on_planar_diagonal():
    fit = zd_fit_subleading(1.0, 2, ray=(1, 1))
    assert fit.expected == pytest.approx(45 / 128, rel=1e-13)
    assert fit.fitted == pytest.approx(fit.expected, rel=1e-3, abs=1e-3)


def test_exact_weight_matches_expansion_with_weight_exponent():
    t = 400
    for x in [(t, 0, 0, 0), (t, t, t, t)]:
        exact = zd_weight_exact(2.0, 4, x)
        second = zd_weight_asymptotic(2.0, 4, x, order=2)
        assert abs(exact - second) <= 1e-2 * abs(second - zd_weight_asymptotic(2.0, 4, x, order=1))


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_subleading_bound_at_zero_alpha(d):
    expected = Fraction(-(d * d - 4) * (d * d + 16 * d - 12), 192)
    assert zd_subleading_bound(0.0, d) == pytest.approx(float(expected), rel=1e-13)


@pytest.mark.parametrize("alpha,d", [(0.0, 3), (1.0, 2)])
def test_subleading_fit_along_axis(alpha, d):
    fit = zd_fit_subleading(alpha, d)
    assert fit.fitted == pytest.approx(fit.expected, rel=1e-3, abs=1e-3)
    assert abs(fit.remainder_exponent - (alpha - 6)) <= 0.3


def test_subleading_fit_on_diagonal():
    fit = zd_fit_subleading(0.0, 3, ray=(1, 1, 1), t_values=[12, 20, 30, 45, 60, 80])
    assert fit.fitted == pytest.approx(fit.expected, rel=1e-3, abs=1e-3)


@pytest.mark.parametrize("alpha,d", [(1.0, 2), (0.0, 3), (2.0, 4)])
def test_weight_above_half_leading_term(alpha, d):
    leading = zd_coefficients(alpha, d).leading
    for x in [(20,) + (0,) * (d - 1), (15, 15) + (0,) * (d - 2), (15,) * d, (40, 3) + (1,) * (d - 2)]:
        r = math.sqrt(sum(c * c for c in x))
        assert zd_weight_exact(alpha, d, x) >= 0.5 * leading * r ** (alpha - 2)


# ============================================================================
# INEQUALITY
# ============================================================================

def test_zero_function_gives_zero_margin():
    form = zd_form_margin(1.0, LatticeFunction.zero(BoxDomain(2, 6)))
    assert (form.energy, form.weighted_mass, form.margin, form.remainder) == (0.0, 0.0, 0.0, 0.0)


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_margin_equals_ground_state_remainder(seed):
    domain = BoxDomain(3, 5)
    form = zd_form_margin(0.5, LatticeFunction.random(domain, np.random.default_rng(seed)))
    assert form.residual <= 1e-12 * form.scale
    assert form.margin >= -1e-12 * form.scale


def test_delta_next_to_origin():
    domain = BoxDomain(2, 5)
    form = zd_form_margin(1.0, LatticeFunction.delta(domain, (1, 0)))
    assert form.margin == pytest.approx(form.remainder, abs=1e-13)
    assert form.margin >= 0


@pytest.mark.parametrize("alpha,d,R,trials", [(1.0, 2, 20, 200), (0.0, 3, 15, 200), (2.0, 4, 15, 20)])
def test_inequality_check(alpha, d, R, trials):
    report = zd_inequality_check(alpha, d, R, trials, seed=7)
    assert report.holds
    assert len(report.forms) == trials
    assert report.max_identity_residual <= 1e-12
    table = report.leading_table
    assert table['ratio'].iloc[-1] == pytest.approx(1.0, rel=0.1)


def test_inequality_check_reproducible():
    first = zd_inequality_check(1.0, 2, 8, 5, seed=3)
    second = zd_inequality_check(1.0, 2, 8, 5, seed=3)
    assert [f.margin for f in first.forms] == [f.margin for f in second.forms]


def test_inequality_check_rejects_small_box():
    with pytest.raises(ValueError):
        zd_inequality_check(1.0, 2, 4, 3)


# ============================================================================
# LERAY ON Z^2
# ============================================================================

def test_leray_leading_order():
    n = 100
    L = math.log(n)
    assert leray_z2_weight((n, 0)) * n * n * L * L == pytest.approx(0.25, abs=5e-2)


def test_leray_symmetry():
    base = leray_z2_weight((3, 4))
    for x in [(4, 3), (-3, 4), (3, -4), (-4, -3)]:
        assert leray_z2_weight(x) == pytest.approx(base, rel=1e-15)


def test_leray_rejects_small_norm():
    with pytest.raises(ValueError):
        leray_z2_weight((1, 1))
    with pytest.raises(ValueError):
        leray_z2_weight((1, 1, 1))


def test_leray_anisotropic_correction():
    axis = (100, 0)
    diagonal = (71, 71)
    axis_correction = leray_z2_weight(axis) - leray_z2_asymptotic(axis, order=1)
    diagonal_correction = leray_z2_weight(diagonal) - leray_z2_asymptotic(diagonal, order=1)
    assert axis_correction > 0
    assert diagonal_correction < 0


@pytest.mark.parametrize("x", [(100, 0), (71, 71), (80, 20)])
def test_leray_expansion_improves(x):
    exact = leray_z2_weight(x)
    first = abs(exact - leray_z2_asymptotic(x, order=1))
    second = abs(exact - leray_z2_asymptotic(x, order=2))
    third = abs(exact - leray_z2_asymptotic(x, order=3))
    assert second < first
    assert third < first
    r2 = x[0] ** 2 + x[1] ** 2
    L = 0.5 * math.log(r2)
    assert second * r2 * r2 * L * L < 5.0


def test_leray_check():
    report = leray_z2_check(12, trials=10, seed=1)
    assert report.holds
    assert report.max_identity_residual <= 1e-12
    assert set(report.envelope_constants) == {'printed', 'derived'}
    assert report.envelope_constants['printed'] <= report.envelope_constants['derived']
    assert report.notes


def test_leray_check_rejects_small_box():
    with pytest.raises(ValueError):
        leray_z2_check(3)
