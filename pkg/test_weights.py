"""
Tests for weight families, scalar functions, scans and form margins
"""
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seq_core import FiniteSequence
from weights import (
    ScalarDomainError,
    ScalarFunctionId,
    WeightModel,
    direct_hardy_weight,
    dual_evaluation_gap,
    gks_coefficients,
    gks_reference_weight,
    hardy_form_margin,
    improved_a_coefficient,
    improved_rellich2_coefficients,
    improved_rellich2_margin,
    improved_rellich2_weight,
    kpp_coefficients,
    kpp_weight,
    landau_weight,
    leray_check,
    leray_exact_weight,
    leray_weight,
    lower_bound_scan,
    monotone_scan,
    n5_coefficient_report,
    scalar_eval,
    second_order_margin,
    shifted_hardy_weight,
)
from weights.models import _binomial_series, shifted_hardy_coefficients
from weights.scalar import precise_value

SAMPLE_N = list(range(1, 3000)) + [10 ** 4, 54321, 10 ** 5, 777777, 10 ** 6]


# ============================================================================
# KPP
# ============================================================================

def test_kpp_boundary_value():
    assert kpp_weight(1) == pytest.approx(2 - math.sqrt(2), rel=1e-15)


def test_kpp_at_two():
    assert kpp_weight(2) == pytest.approx(2 - (1 + math.sqrt(3)) / math.sqrt(2), rel=1e-14)
    assert kpp_weight(2) == pytest.approx(0.0681483, abs=1e-7)


def test_kpp_series_coefficients():
    c = kpp_coefficients(3)
    assert c == (Fraction(1, 4), Fraction(5, 64), Fraction(21, 512))


def test_kpp_rejects_zero():
    with pytest.raises(ValueError):
        kpp_weight(0)


def test_kpp_above_classical_bound():
    for n in SAMPLE_N:
        assert kpp_weight(n) >= 1 / (4 * n * n)


# ============================================================================
# DUAL EVALUATION
# ============================================================================

@pytest.mark.parametrize("family,params", [
    ('kpp', {}),
    ('shifted_hardy', {'alpha': -2.0}),
    ('shifted_hardy', {'alpha': -0.5}),
    ('direct_hardy', {'alpha': 0.0}),
    ('direct_hardy', {'alpha': 0.5}),
    ('direct_hardy', {'alpha': 2.0}),
    ('direct_hardy', {'alpha': 3.0}),
    ('leray', {}),
    ('improved_rellich2', {}),
    ('gks_reference', {}),
    ('landau_constant', {'p': 3.0}),
])
def test_direct_and_series_agree_on_overlap_band(family, params):
    gap, _at = dual_evaluation_gap(WeightModel(family, params))
    assert gap <= 1e-12


def test_binomial_series_negative_integer_exponent():
    assert _binomial_series(-2.0, 4).tolist() == [1.0, -2.0, 3.0, -4.0, 5.0]
    assert _binomial_series(-1.0, 3).tolist() == [1.0, -1.0, 1.0, -1.0]
    assert _binomial_series(3.0, 5).tolist() == [1.0, 3.0, 3.0, 1.0, 0.0, 0.0]
    assert _binomial_series(0.5, 2).tolist() == [1.0, 0.5, -0.125]


@pytest.mark.parametrize("family,alpha", [
    ('shifted_hardy', -1.0),
    ('shifted_hardy', -2.0),
    ('shifted_hardy', -5.0),
    ('direct_hardy', 3.0),
    ('direct_hardy', 5.0),
])
def test_series_finite_at_integer_exponents(family, alpha):
    model = WeightModel(family, {'alpha': alpha})
    for n in (64, 65, 100, 1000):
        series = model.series(n)
        assert math.isfinite(series)
        assert series == pytest.approx(model.direct(n), rel=1e-12)
        assert math.isfinite(model(n))


def test_dual_gap_reports_non_finite_series(monkeypatch):
    model = WeightModel('kpp')
    monkeypatch.setattr(WeightModel, 'series', lambda self, n: float('nan'))
    gap, _at = dual_evaluation_gap(model)
    assert gap == math.inf


def test_auto_mode_switches_at_crossover():
    model = WeightModel('kpp', crossover_n=10)
    assert model(9) == model.direct(9)
    assert model(10) == model.series(10)


def test_model_validation():
    with pytest.raises(ValueError):
        WeightModel('nonexistent')
    with pytest.raises(ValueError):
        WeightModel('kpp', eval_mode='fast')
    with pytest.raises(ValueError):
        WeightModel('landau_constant', {'p': 1.0})


def test_boundary_metadata():
    assert WeightModel('kpp').boundary_zeros == 1
    assert WeightModel('leray').boundary_zeros == 2
    assert WeightModel('shifted_hardy', {'alpha': -1.0}).n_min == 2
    assert WeightModel('direct_hardy', {'alpha': 1.5}).n_min == 1


def test_row_has_csv_columns():
    row = WeightModel('kpp').row(5)
    assert set(row) == {'n', 'family', 'direct', 'series', 'bound', 'margin'}
    assert row['margin'] > 0


# ============================================================================
# SHIFTED AND DIRECT HARDY
# ============================================================================

@pytest.mark.parametrize("alpha", [-6.0, -2.0, -0.3, 0.5, 2.0])
def test_H_vanishes_at_zero(alpha):
    assert scalar_eval(ScalarFunctionId('H', alpha), 0.0) == 0.0


def test_shifted_leading_coefficient():
    h = shifted_hardy_coefficients(-2.0, 12)
    assert h[0] == pytest.approx(0.0, abs=1e-15)
    assert h[1] == pytest.approx(0.0, abs=1e-15)
    assert h[2] == pytest.approx(9 / 4, rel=1e-14)


def test_shifted_at_ten_above_bound():
    assert shifted_hardy_weight(-2.0, 10) >= 2.25e-4


@pytest.mark.parametrize("alpha", [-5.0, -2.0, -1.0, -0.25])
def test_shifted_certified_bound(alpha):
    for n in SAMPLE_N[1:]:
        assert shifted_hardy_weight(alpha, n) >= (alpha - 1) ** 2 / 4 * float(n) ** (alpha - 2)


def test_shifted_rejects_bad_arguments():
    with pytest.raises(ValueError):
        shifted_hardy_weight(0.0, 5)
    with pytest.raises(ValueError):
        shifted_hardy_weight(-1.0, 1)


def test_direct_hardy_alpha_three_boundary():
    value, bound = direct_hardy_weight(3.0, 1)
    assert value == pytest.approx(1 + 8 / 3, rel=1e-14)
    assert bound == pytest.approx(1.0)


def test_direct_hardy_alpha_one_is_trivial():
    for n in range(1, 200):
        value, bound = direct_hardy_weight(1.0, n)
        assert value >= 0
        assert bound == 0
    assert direct_hardy_weight(1.0, 1)[0] == pytest.approx(1.0)
    assert direct_hardy_weight(1.0, 7)[0] == 0.0


def test_direct_hardy_alpha_zero_is_kpp():
    assert direct_hardy_weight(0.0, 5)[0] == pytest.approx(kpp_weight(5), rel=1e-13)
    assert direct_hardy_weight(0.0, 5)[0] == pytest.approx(
        scalar_eval(ScalarFunctionId('G', 0.0), 0.2), rel=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.9, 1.5, 2.0, 2.7, 3.0, 4.0, 6.5])
def test_direct_hardy_certified_bound(alpha):
    for n in SAMPLE_N:
        value, bound = direct_hardy_weight(alpha, n)
        assert value >= bound


# ============================================================================
# LERAY
# ============================================================================

def test_leray_at_two():
    eps = 1e-6
    exact = leray_exact_weight(2, eps)
    expected = 5 - 3 * math.sqrt(math.log(3) / math.log(2)) - 2 * eps / math.sqrt(math.log(2))
    assert exact == pytest.approx(expected, rel=1e-14)
    assert exact > leray_weight(2) == pytest.approx(1 / (8 * math.log(2) ** 2))


def test_leray_bound_instance():
    assert leray_weight(8) == pytest.approx(1 / (32 * math.log(8) ** 2), rel=1e-15)


def test_leray_margin_at_hundred():
    check = leray_check(100)
    assert check.holds
    assert check.margin > 0


def test_leray_exact_above_bound():
    for n in SAMPLE_N[2:]:
        assert leray_exact_weight(n) >= leray_weight(n)


def test_leray_rejects_small_n():
    with pytest.raises(ValueError):
        leray_weight(1)
    with pytest.raises(ValueError):
        WeightModel('leray').series(2)


# ============================================================================
# IMPROVED SECOND ORDER AND REFERENCE SERIES
# ============================================================================

def test_improved_a_coefficients():
    assert improved_a_coefficient(2) == Fraction(9, 4)
    assert improved_a_coefficient(3) == Fraction(15, 4)
    assert improved_a_coefficient(4) == Fraction(301, 64)


def test_improved_a_coefficients_positive():
    for k in range(2, 65):
        assert improved_a_coefficient(k) > 0


def test_improved_combined_coefficients():
    coeffs = improved_rellich2_coefficients(24)
    assert coeffs[4] == Fraction(9, 16)
    assert coeffs[5] == Fraction(15, 16)
    assert coeffs[6] == Fraction(213, 128)
    assert all(c > 0 for c in coeffs.values())


def test_n5_report_picks_derived_coefficient():
    report = n5_coefficient_report()
    assert report.from_coefficients == Fraction(15, 16)
    assert report.from_taylor == pytest.approx(15 / 16, rel=1e-12)
    assert report.matches == ['15/16']


def test_improved_weight_leading_behaviour():
    for n in (2, 3, 10, 100, 1000):
        assert improved_rellich2_weight(n) >= 9 / (16 * n ** 4)
    assert improved_rellich2_weight(1000) * 1000 ** 4 == pytest.approx(9 / 16, abs=2e-3)


def test_gks_coefficients():
    d = gks_coefficients(2)
    assert d[0] == Fraction(9, 16)
    assert d[1] == Fraction(210, 256)


def test_gks_scaled_limit():
    assert abs(gks_reference_weight(100) * 100 ** 4 - 9 / 16) < 1e-4
    assert abs(gks_reference_weight(1000) * 1000 ** 4 - 9 / 16) < 1e-6


def test_gks_direct_is_fourth_difference():
    n = 50
    expected = ((n + 2) ** 1.5 - 4 * (n + 1) ** 1.5 + 6 * n ** 1.5 - 4 * (n - 1) ** 1.5 + (n - 2) ** 1.5) / n ** 1.5
    assert gks_reference_weight(n, mode='direct') == pytest.approx(expected, rel=1e-6)
    assert gks_reference_weight(n, mode='direct') == pytest.approx(gks_reference_weight(n), rel=1e-12)


def test_landau_weight():
    assert landau_weight(2.0, 3) == pytest.approx(1 / 36)


# ============================================================================
# SCALAR FUNCTIONS
# ============================================================================

@pytest.mark.parametrize("alpha", [0.0, 0.4, 1.0, 2.0, 5.0])
def test_base_points(alpha):
    assert scalar_eval(ScalarFunctionId('G', alpha), 0.0) == 0.0
    assert scalar_eval(ScalarFunctionId('F', alpha), 1.0) == 0.0


def test_g_at_one():
    assert scalar_eval(ScalarFunctionId('g'), 1.0) == pytest.approx(27 / 8)


def test_Q_at_two():
    q = scalar_eval(ScalarFunctionId('Q'), 2.0)
    assert q == pytest.approx(0.6747, abs=1e-4)
    assert q > 0.5


def test_K_at_one():
    for alpha in (1.5, 2.0, 2.5):
        assert scalar_eval(ScalarFunctionId('K', alpha), 1.0) == pytest.approx(
            3 * (alpha ** 2 - 3 * alpha + 4) / 4, rel=1e-13)


@pytest.mark.parametrize("alpha", [1.2, 2.0, 2.8])
def test_J_at_three_quarters_is_g(alpha):
    assert scalar_eval(ScalarFunctionId('J', alpha), 0.75) == pytest.approx(
        scalar_eval(ScalarFunctionId('g'), alpha), rel=1e-13)


@pytest.mark.parametrize("alpha", [1.3, 2.0, 2.6])
def test_G_cubic_combination(alpha):
    g = scalar_eval(ScalarFunctionId('g'), alpha)
    expected = (alpha + 1) * (alpha - 3) * (alpha - 5) / 16 - 0.75 * g
    assert scalar_eval(ScalarFunctionId('G_cubic'), alpha) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 2.5])
def test_derivative_identities(alpha):
    def F(x):
        return precise_value('F', alpha, x)

    def L(y):
        return precise_value('L', alpha, y)

    with mpmath.workdps(40):
        second = mpmath.diff(F, mpmath.mpf(1.5), 2)
        third = mpmath.diff(F, mpmath.mpf(1.2), 3)
        dL = mpmath.diff(L, mpmath.mpf(0.9))
    assert float(second) == pytest.approx(scalar_eval(ScalarFunctionId('Q'), alpha), rel=1e-9)
    assert float(third) == pytest.approx(
        (alpha - 1) * 1.2 ** (alpha - 3) * scalar_eval(ScalarFunctionId('K', alpha), 1.2), rel=1e-9)
    assert float(dL) == pytest.approx(
        0.9 ** ((alpha - 3) / 2) * scalar_eval(ScalarFunctionId('J', alpha), 0.9), rel=1e-9)


def test_out_of_interval_rejected():
    with pytest.raises(ScalarDomainError):
        scalar_eval(ScalarFunctionId('H', -1.0), 1.0)
    with pytest.raises(ScalarDomainError):
        scalar_eval(ScalarFunctionId('J', 2.0), 0.5)
    with pytest.raises(ScalarDomainError):
        scalar_eval(ScalarFunctionId('Q'), 3.5)
    with pytest.raises(ValueError):
        ScalarFunctionId('H')


def test_precise_mode_matches_binary64_away_from_cancellation():
    fid = ScalarFunctionId('H', -2.0)
    precise = scalar_eval(fid, 0.5, precise=True)
    assert float(precise) == pytest.approx(scalar_eval(fid, 0.5), rel=1e-14)


def test_precise_mode_resolves_small_arguments():
    fid = ScalarFunctionId('H', -2.0)
    x = 1e-6
    precise = scalar_eval(fid, x, precise=True)
    assert float(precise) == pytest.approx(9 / 4 * x ** 2 + 15 / 4 * x ** 3, rel=1e-10)


# ============================================================================
# SCANS
# ============================================================================

def test_H_scan_strict():
    report = lower_bound_scan('H', alphas=[-2.0])
    assert report.passed
    assert report.min_margin > 0
    assert 0 < report.worst_x < 1


def test_H_scan_default_alpha_range():
    report = lower_bound_scan('H', alphas=np.arange(-3.0, 0.0, 0.05), grid=np.linspace(0.001, 0.999, 500))
    assert report.passed


def test_G_and_F_scans_non_strict():
    assert lower_bound_scan('G', alphas=[0.0, 0.25, 0.5, 0.75, 1.0]).passed
    assert lower_bound_scan('F', alphas=[1.25, 1.5, 2.0, 2.5, 3.0, 4.0]).passed


def test_Q_scan():
    report = lower_bound_scan('Q', threshold=1e-9)
    assert report.passed
    assert 1.0 < report.worst_x < 3.0


def test_G_cubic_negative_scan():
    report = lower_bound_scan('G_cubic')
    assert report.sense == 'upper'
    assert report.passed


def test_scan_detects_false_claim():
    report = lower_bound_scan('H', alphas=[-2.0], bound=lambda a, x: 3.0 * x ** 2)
    assert not report.passed
    assert report.min_margin < 0


def test_g_positive_and_decreasing():
    assert lower_bound_scan('g').passed
    assert monotone_scan('g', np.linspace(1.0, 3.0, 2001), decreasing=True).passed
    assert not monotone_scan('g', np.linspace(1.0, 3.0, 201), decreasing=False).passed


def test_scan_without_default_bound():
    with pytest.raises(ValueError):
        lower_bound_scan('K', alphas=[2.0])


# ============================================================================
# FORM MARGINS
# ============================================================================

def _random_sequence(rng, start, length):
    return FiniteSequence.from_values([rng.uniform(-1, 1) for _ in range(length)], start)


@pytest.mark.parametrize("family,params", [
    ('kpp', {}),
    ('shifted_hardy', {'alpha': -2.0}),
    ('shifted_hardy', {'alpha': -0.7}),
    ('direct_hardy', {'alpha': 0.5}),
    ('direct_hardy', {'alpha': 2.5}),
    ('leray', {}),
])
@given(seed=st.integers(min_value=0, max_value=10 ** 6), length=st.integers(min_value=1, max_value=40))
@settings(max_examples=25, deadline=None)
def test_form_margin_matches_remainder(family, params, seed, length):
    rng = random.Random(seed)
    model = WeightModel(family, params, eval_mode='direct')
    u = _random_sequence(rng, model.boundary_zeros, length)
    result = hardy_form_margin(model, u)
    assert result.residual <= 1e-10 * result.scale
    assert result.holds()
    assert result.remainder >= 0


def test_form_margin_rejects_inadmissible():
    with pytest.raises(ValueError):
        hardy_form_margin(WeightModel('leray'), FiniteSequence.delta(1))
    with pytest.raises(ValueError):
        hardy_form_margin(WeightModel('gks_reference'), FiniteSequence.delta(3))


def test_kpp_margin_for_square_root_profile():
    # u_n = √n truncated: margin is the cost of the truncation only
    u = FiniteSequence.from_values([math.sqrt(n) for n in range(1, 200)], 1)
    result = hardy_form_margin(WeightModel('kpp', eval_mode='direct'), u)
    assert result.margin >= 0
    assert result.margin < result.energy


@given(seed=st.integers(min_value=0, max_value=10 ** 6), length=st.integers(min_value=1, max_value=40))
@settings(max_examples=40, deadline=None)
def test_improved_rellich2_margin_nonnegative(seed, length):
    rng = random.Random(seed)
    u = _random_sequence(rng, 2, length)
    result = improved_rellich2_margin(u)
    assert result.holds()
    assert second_order_margin(WeightModel('gks_reference'), u).holds()


def test_second_order_margin_rejects_first_order_family():
    with pytest.raises(ValueError):
        second_order_margin(WeightModel('kpp'), FiniteSequence.delta(3))
