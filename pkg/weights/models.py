"""
Weight Families
Closed-form and series evaluation of the Hardy / Rellich weight sequences on ℕ
"""
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Tuple

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from config import TOLERANCES, WEIGHT_CONFIG, WEIGHT_FAMILIES
from weights.scalar import precise_value

logger = logging.getLogger(__name__)

EVAL_MODES = ('direct', 'series', 'auto')


# ============================================================================
# COEFFICIENT TABLES
# ============================================================================

@lru_cache(maxsize=None)
def kpp_coefficients(terms: int) -> Tuple[Fraction, ...]:
    """c_k = C(4k,2k) / (2^{4k-1}(4k-1)), the coefficient of n^{-2k}, k = 1..terms"""
    return tuple(Fraction(math.comb(4 * k, 2 * k), 2 ** (4 * k - 1) * (4 * k - 1))
                 for k in range(1, terms + 1))


@lru_cache(maxsize=None)
def gks_coefficients(terms: int) -> Tuple[Fraction, ...]:
    """d_k = 6(4^k - 1)/4^{2k} · (4k)!/((2k)!(2k+2)!), the coefficient of n^{-2k-2}"""
    out = []
    for k in range(1, terms + 1):
        ratio = Fraction(math.factorial(4 * k), math.factorial(2 * k) * math.factorial(2 * k + 2))
        out.append(Fraction(6 * (4 ** k - 1), 4 ** (2 * k)) * ratio)
    return tuple(out)


def improved_a_coefficient(k: int) -> Fraction:
    """a_k = (k+1) - C(2k,k)/4^k - (-1)^k 3C(2k-4,k-2)/(4^{k-1}k(k-1)), k ≥ 2"""
    if k < 2:
        raise ValueError(f"a_k is defined for k >= 2, got {k}")
    return (Fraction(k + 1)
            - Fraction(math.comb(2 * k, k), 4 ** k)
            - (-1) ** k * Fraction(3 * math.comb(2 * k - 4, k - 2), 4 ** (k - 1) * k * (k - 1)))


@lru_cache(maxsize=None)
def improved_rellich2_coefficients(terms: Optional[int] = None) -> Dict[int, Fraction]:
    """
    Exact coefficients of n^{-j} in the improved second order weight

    The weight is A_n/4 + Σ_{k≥2} b_k n^{-2k-2} with A_n = Σ_{k≥2} a_k n^{-k-2}
    and b_k = c_k (2k+1)²/4. Powers j = 4 .. terms + 3 are returned.
    """
    terms = terms or WEIGHT_CONFIG['improved_rellich2_terms']
    max_power = terms + 3
    coeffs: Dict[int, Fraction] = {j: Fraction(0) for j in range(4, max_power + 1)}
    for k in range(2, max_power - 1):
        coeffs[k + 2] += improved_a_coefficient(k) / 4
    kpp = kpp_coefficients(max_power)
    k = 2
    while 2 * k + 2 <= max_power:
        coeffs[2 * k + 2] += kpp[k - 1] * (2 * k + 1) ** 2 / 4
        k += 1
    return coeffs


@lru_cache(maxsize=None)
def _binomial_series(exponent: float, order: int) -> np.ndarray:
    """Coefficients of (1 + y)^exponent up to y^order, finite for every real exponent"""
    coeffs = np.empty(order + 1)
    coeffs[0] = 1.0
    for k in range(1, order + 1):
        coeffs[k] = coeffs[k - 1] * (exponent - k + 1) / k
    return coeffs


@lru_cache(maxsize=None)
def shifted_hardy_coefficients(alpha: float, order: int) -> np.ndarray:
    """Taylor coefficients of H_α about 0"""
    k = np.arange(order + 1)
    sign = (-1.0) ** k
    coeffs = (_binomial_series(alpha, order) * sign
              - _binomial_series((1 + alpha) / 2, order) * sign
              - _binomial_series((1 - alpha) / 2, order))
    coeffs[0] += 1.0
    return coeffs


@lru_cache(maxsize=None)
def direct_hardy_coefficients(alpha: float, order: int) -> np.ndarray:
    """Taylor coefficients of G_α about 0 (α ≤ 1) or of t ↦ F_α(1 + t) (α > 1)"""
    k = np.arange(order + 1)
    if alpha <= 1:
        coeffs = (_binomial_series(alpha, order)
                  - _binomial_series((alpha + 1) / 2, order)
                  - (-1.0) ** k * _binomial_series((1 - alpha) / 2, order))
        coeffs[0] += 1.0
        return coeffs
    left = _binomial_series((3 * alpha - 1) / 2, order)
    right = _binomial_series((1 - alpha) / 2, order) * 2.0 ** k
    mixed = P.polymul(left, right)[:order + 1]
    coeffs = _binomial_series(alpha, order) - mixed - _binomial_series((alpha - 1) / 2, order)
    coeffs[0] += 1.0
    return coeffs


def leray_series_coefficients(n: int, order: Optional[int] = None) -> np.ndarray:
    """
    Coefficients in x = 1/n of the Leray weight at n (valid for n ≥ 3)

    With A(y) = 1 - √(1 + log(1+y)/ln n) the weight is n·A(-x) + (n+1)·A(x)
    = (A(-x) + A(x))/x + A(x).
    """
    order = order or WEIGHT_CONFIG['leray_series_order']
    L = math.log(n)
    z = np.zeros(order + 1)
    z[1:] = [(-1.0) ** (k + 1) / k / L for k in range(1, order + 1)]
    sqrt_c = _binomial_series(0.5, order)
    acc = np.zeros(order + 1)
    power = np.zeros(order + 1)
    power[0] = 1.0
    for j in range(1, order + 1):
        power = P.polymul(power, z)[:order + 1]
        acc += sqrt_c[j] * power
    A = -acc
    even = np.where(np.arange(order + 1) % 2 == 0, 2.0 * A, 0.0)
    total = A[:order].copy()
    total += even[1:]
    return total


# ============================================================================
# PER-FAMILY EVALUATORS
# ============================================================================

def _kpp_direct(n: int) -> float:
    x = 1.0 / n
    sm, sp = math.sqrt(1.0 - x), math.sqrt(1.0 + x)
    return 2.0 * x * x / ((1.0 + sm) * (1.0 + sp) * (sp + sm))


def _sum_series(coeffs, x: float, power_step: int, first_power: int) -> float:
    """Σ_k coeffs[k] x^{first_power + k·power_step}, stopped at the configured ratio"""
    stop = WEIGHT_CONFIG['series_stop_ratio']
    terms = []
    partial = 0.0
    for k, c in enumerate(coeffs):
        term = float(c) * x ** (first_power + k * power_step)
        terms.append(term)
        partial += term
        if partial != 0 and abs(term) < stop * abs(partial):
            break
    return math.fsum(terms)


def _kpp_series(n: int) -> float:
    return _sum_series(kpp_coefficients(WEIGHT_CONFIG['series_max_terms']), 1.0 / n, 2, 2)


def _gks_series(n: int, terms: int) -> float:
    return _sum_series(gks_coefficients(terms), 1.0 / n, 2, 4)


def _precise_dps(n: int, loss_power: int) -> int:
    return WEIGHT_CONFIG['extended_precision_dps'] + int(loss_power * math.log10(max(n, 1))) + 1


@lru_cache(maxsize=4096)
def _gks_direct(n: int) -> float:
    """Δ²g_n / g_n with g_n = n^{3/2}"""
    with mpmath.workdps(_precise_dps(n, 4)):
        g = [mpmath.mpf(n + j) ** mpmath.mpf(1.5) for j in (-2, -1, 0, 1, 2)]
        fourth = g[0] - 4 * g[1] + 6 * g[2] - 4 * g[3] + g[4]
        return float(fourth / g[2])


@lru_cache(maxsize=8192)
def _shifted_direct(alpha: float, n: int) -> float:
    with mpmath.workdps(_precise_dps(n, 2)):
        x = mpmath.mpf(1) / n
        return float(mpmath.mpf(n) ** alpha * precise_value('H', alpha, x))


def _shifted_series(alpha: float, n: int) -> float:
    coeffs = shifted_hardy_coefficients(alpha, WEIGHT_CONFIG['shifted_hardy_order'])
    return float(n ** alpha * P.polyval(1.0 / n, coeffs))


def _direct_hardy_boundary(alpha: float) -> float:
    """Exact weight at n = 1, where f_0 = 0"""
    if alpha <= 1:
        return 1.0 + 2.0 ** alpha * (1.0 - 2.0 ** ((1 - alpha) / 2))
    return 1.0 + 2.0 ** alpha * (1.0 - (2.0 / 3.0) ** ((alpha - 1) / 2))


@lru_cache(maxsize=8192)
def _direct_hardy_direct(alpha: float, n: int) -> float:
    if n == 1:
        return _direct_hardy_boundary(alpha)
    if alpha == 1:
        return 0.0
    with mpmath.workdps(_precise_dps(n, 2)):
        x = mpmath.mpf(1) / n
        if alpha <= 1:
            value = precise_value('G', alpha, x)
        else:
            value = precise_value('F', alpha, 1 + x)
        return float(mpmath.mpf(n) ** alpha * value)


def _direct_hardy_series(alpha: float, n: int) -> float:
    if n == 1:
        return _direct_hardy_boundary(alpha)
    coeffs = direct_hardy_coefficients(alpha, WEIGHT_CONFIG['direct_hardy_order'])
    return float(n ** alpha * P.polyval(1.0 / n, coeffs))


def _leray_direct(n: int, eps: float) -> float:
    L = math.log(n)
    if n == 2:
        return 5.0 - 3.0 * math.sqrt(math.log(3) / L) - 2.0 * eps / math.sqrt(L)
    x = 1.0 / n
    p, q = math.log1p(-x) / L, math.log1p(x) / L
    a, b = 0.5 * math.log1p(p), 0.5 * math.log1p(q)
    # (e^a + e^b)/2 - 1 with (a + b)/2 taken from log(1 - x²)
    s = 0.25 * math.log1p(math.log1p(-x * x) / L + p * q)
    d = 0.5 * (a - b)
    mean = math.expm1(s) * math.cosh(d) + 2.0 * math.sinh(0.5 * d) ** 2
    return -2.0 * n * mean - math.expm1(b)


def _leray_series(n: int) -> float:
    return float(P.polyval(1.0 / n, leray_series_coefficients(n)))


@lru_cache(maxsize=4096)
def _improved_direct(n: int) -> float:
    """A_n/4 + (t²/4)(g + 3t g' + t² g'') - 9t⁴/16 with g(t) = 2 - √(1-t) - √(1+t), t = 1/n"""
    with mpmath.workdps(_precise_dps(n, 6)):
        t = mpmath.mpf(1) / n
        one = mpmath.mpf(1)
        A = t ** 2 * (one + (one - t) ** -2 - (one - t) ** mpmath.mpf(-0.5) - (one + t) ** mpmath.mpf(1.5))
        g = 2 - mpmath.sqrt(one - t) - mpmath.sqrt(one + t)
        g1 = (one / mpmath.sqrt(one - t) - one / mpmath.sqrt(one + t)) / 2
        g2 = ((one - t) ** mpmath.mpf(-1.5) + (one + t) ** mpmath.mpf(-1.5)) / 4
        tail = t ** 2 / 4 * (g + 3 * t * g1 + t ** 2 * g2) - mpmath.mpf(9) / 16 * t ** 4
        return float(A / 4 + tail)


def _improved_series(n: int, terms: int) -> float:
    coeffs = improved_rellich2_coefficients(terms)
    x = 1.0 / n
    return math.fsum(float(c) * x ** j for j, c in sorted(coeffs.items(), reverse=True))


def _landau(p: float, n: int) -> float:
    return ((p - 1) / p) ** p * float(n) ** (-p)


# ============================================================================
# WEIGHT MODEL
# ============================================================================

@dataclass(frozen=True)
class FamilyInfo:
    """Validity range and boundary conditions of a family"""
    n_min: int
    boundary_zeros: int
    series_min: int
    ground_state: bool


_FAMILY_INFO: Dict[str, FamilyInfo] = {
    'kpp': FamilyInfo(1, 1, 2, True),
    'gks_reference': FamilyInfo(2, 2, 2, False),
    'shifted_hardy': FamilyInfo(2, 2, 2, True),
    'direct_hardy': FamilyInfo(1, 1, 1, True),
    'leray': FamilyInfo(2, 2, 3, True),
    'improved_rellich2': FamilyInfo(2, 2, 2, False),
    'landau_constant': FamilyInfo(1, 1, 1, False),
}


@dataclass(frozen=True)
class WeightModel:
    """
    A named weight family with parameters

    params by family: shifted_hardy / direct_hardy take 'alpha', leray takes
    'epsilon', landau_constant takes 'p', gks_reference / improved_rellich2
    take 'terms'.
    """
    family: str
    params: Dict[str, float] = field(default_factory=dict)
    eval_mode: str = 'auto'
    crossover_n: int = WEIGHT_CONFIG['crossover_n']

    def __post_init__(self):
        if self.family not in WEIGHT_FAMILIES:
            raise ValueError(f"Unknown weight family: {self.family}")
        if self.eval_mode not in EVAL_MODES:
            raise ValueError(f"Unknown evaluation mode: {self.eval_mode}")
        if self.crossover_n < 1:
            raise ValueError(f"crossover_n must be positive, got {self.crossover_n}")
        alpha = self.params.get('alpha')
        if self.family == 'shifted_hardy':
            if alpha is None or alpha >= 0:
                raise ValueError(f"shifted_hardy needs alpha < 0 (got {alpha}); use direct_hardy for alpha >= 0")
        if self.family == 'direct_hardy':
            if alpha is None or alpha < 0:
                raise ValueError(f"direct_hardy needs alpha >= 0, got {alpha}")
        if self.family == 'landau_constant':
            p = self.params.get('p')
            if p is None or p <= 1:
                raise ValueError(f"landau_constant needs p > 1, got {p}")

    # ------------------------------------------------------------------
    # Metadata
    # ------------------------------------------------------------------

    @property
    def info(self) -> FamilyInfo:
        return _FAMILY_INFO[self.family]

    @property
    def n_min(self) -> int:
        return self.info.n_min

    @property
    def boundary_zeros(self) -> int:
        """Number of leading entries u_0, u_1, ... that must vanish"""
        return self.info.boundary_zeros

    @property
    def alpha(self) -> Optional[float]:
        return self.params.get('alpha')

    @property
    def epsilon(self) -> float:
        return float(self.params.get('epsilon', WEIGHT_CONFIG['leray_epsilon']))

    @property
    def terms(self) -> int:
        default = WEIGHT_CONFIG['gks_terms'] if self.family == 'gks_reference' else WEIGHT_CONFIG['improved_rellich2_terms']
        return int(self.params.get('terms', default))

    def label(self) -> str:
        if self.family in ('shifted_hardy', 'direct_hardy'):
            return f"{self.family}({self.alpha:g})"
        if self.family == 'landau_constant':
            return f"landau_constant({self.params['p']:g})"
        return self.family

    def _check_n(self, n: int) -> None:
        if int(n) != n or n < self.n_min:
            raise ValueError(f"{self.label()} is defined for integers n >= {self.n_min}, got {n}")

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def direct(self, n: int) -> float:
        self._check_n(n)
        family = self.family
        if family == 'kpp':
            return _kpp_direct(n)
        if family == 'gks_reference':
            return _gks_direct(n)
        if family == 'shifted_hardy':
            return _shifted_direct(self.alpha, n)
        if family == 'direct_hardy':
            return _direct_hardy_direct(self.alpha, n)
        if family == 'leray':
            return _leray_direct(n, self.epsilon)
        if family == 'improved_rellich2':
            return _improved_direct(n)
        return _landau(self.params['p'], n)

    def series(self, n: int) -> float:
        self._check_n(n)
        if n < self.info.series_min:
            raise ValueError(f"Series evaluation of {self.label()} needs n >= {self.info.series_min}, got {n}")
        family = self.family
        if family == 'kpp':
            return _kpp_series(n)
        if family == 'gks_reference':
            return _gks_series(n, self.terms)
        if family == 'shifted_hardy':
            return _shifted_series(self.alpha, n)
        if family == 'direct_hardy':
            return _direct_hardy_series(self.alpha, n)
        if family == 'leray':
            return _leray_series(n)
        if family == 'improved_rellich2':
            return _improved_series(n, self.terms)
        return _landau(self.params['p'], n)

    def __call__(self, n: int) -> float:
        if self.eval_mode == 'direct':
            return self.direct(n)
        if self.eval_mode == 'series':
            return self.series(n)
        if n < self.crossover_n or n < self.info.series_min:
            return self.direct(n)
        return self.series(n)

    def bound(self, n: int) -> float:
        """Certified closed-form lower bound for the weight at n"""
        self._check_n(n)
        family = self.family
        if family == 'kpp':
            return 1.0 / (4.0 * n * n)
        if family in ('shifted_hardy', 'direct_hardy'):
            a = self.alpha
            return (a - 1) ** 2 / 4 * float(n) ** (a - 2)
        if family == 'leray':
            return 1.0 / (4.0 * n * math.log(n) ** 2)
        if family in ('gks_reference', 'improved_rellich2'):
            return 9.0 / (16.0 * float(n) ** 4)
        return _landau(self.params['p'], n)

    def row(self, n: int) -> Dict[str, Any]:
        """One CSV row: n, family, direct, series, bound, margin"""
        direct = self.direct(n)
        series = self.series(n) if n >= self.info.series_min else float('nan')
        bound = self.bound(n)
        return {
            'n': n,
            'family': self.label(),
            'direct': direct,
            'series': series,
            'bound': bound,
            'margin': self(n) - bound,
        }

    # ------------------------------------------------------------------
    # Ground state pair on ℕ
    # ------------------------------------------------------------------

    def ground_state(self) -> Tuple[Callable[[int], float], Callable[[int], float]]:
        """
        (V, f) with w_n = -div(V∇f)_n / f_n, where V_n sits on the edge (n-1, n)

        Raises:
            ValueError: the family has no ground state pair on ℕ
        """
        if not self.info.ground_state:
            raise ValueError(f"{self.label()} has no ground state pair")
        family = self.family
        if family == 'kpp':
            return (lambda n: 1.0), (lambda n: math.sqrt(n) if n > 0 else 0.0)
        if family == 'shifted_hardy':
            a = self.alpha
            return ((lambda n: float(n - 1) ** a if n >= 2 else 0.0),
                    (lambda n: float(n) ** ((1 - a) / 2) if n > 0 else 0.0))
        if family == 'direct_hardy':
            a = self.alpha
            shift = 0 if a <= 1 else 1
            return ((lambda n: float(n) ** a if n >= 1 else 0.0),
                    (lambda n: float(n + shift) ** ((1 - a) / 2) if n > 0 else 0.0))
        eps = self.epsilon
        return ((lambda n: float(n)),
                (lambda n: math.sqrt(math.log(n)) if n >= 2 else (eps if n == 1 else 0.0)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family,
            'label': self.label(),
            'params': dict(self.params),
            'eval_mode': self.eval_mode,
            'crossover_n': self.crossover_n,
            'n_min': self.n_min,
            'boundary_zeros': self.boundary_zeros,
        }


def dual_evaluation_gap(model: WeightModel, lo: Optional[int] = None, hi: Optional[int] = None) -> Tuple[float, int]:
    """
    Largest relative gap |direct - series| / |direct| on the overlap band

    Returns:
        Tuple of (max relative gap, n where it occurs)
    """
    lo = lo if lo is not None else max(model.crossover_n // 2, model.info.series_min)
    hi = hi if hi is not None else 2 * model.crossover_n
    worst, at = 0.0, lo
    for n in range(lo, hi + 1):
        d, s = model.direct(n), model.series(n)
        gap = abs(d - s) / abs(d) if d != 0 else abs(s)
        if not math.isfinite(gap):
            gap = math.inf
        if gap > worst:
            worst, at = gap, n
    if worst > TOLERANCES['dual_evaluation']:
        logger.warning(f"{model.label()}: direct/series gap {worst:.3e} at n={at}")
    return worst, at


# ============================================================================
# NAMED ENTRY POINTS
# ============================================================================

def kpp_weight(n: int, mode: str = 'auto') -> float:
    """Δ√n/√n; n = 0 is rejected"""
    if n == 0:
        raise ValueError("kpp weight is undefined at n=0")
    return WeightModel('kpp', eval_mode=mode)(n)


def shifted_hardy_weight(alpha: float, n: int, mode: str = 'auto') -> float:
    """n^α H_α(1/n) for α < 0, n ≥ 2"""
    return WeightModel('shifted_hardy', {'alpha': alpha}, eval_mode=mode)(n)


def direct_hardy_weight(alpha: float, n: int, mode: str = 'auto') -> Tuple[float, float]:
    """
    Exact -div(V∇f)_n/f_n for V_n = n^α

    Returns:
        Tuple of (weight, certified bound ((α-1)²/4) n^{α-2})
    """
    model = WeightModel('direct_hardy', {'alpha': alpha}, eval_mode=mode)
    return model(n), model.bound(n)


def leray_weight(n: int) -> float:
    """1/(4n (ln n)²)"""
    if n < 2:
        raise ValueError(f"Leray weight is defined for n >= 2, got {n}")
    return 1.0 / (4.0 * n * math.log(n) ** 2)


def leray_exact_weight(n: int, epsilon: Optional[float] = None, mode: str = 'auto') -> float:
    """-div(V∇f)_n / f_n with V_n = n, f_n = √(ln n), f_1 = ε"""
    params = {} if epsilon is None else {'epsilon': epsilon}
    return WeightModel('leray', params, eval_mode=mode)(n)


@dataclass
class LerayCheck:
    n: int
    bound: float
    exact: float

    @property
    def margin(self) -> float:
        return self.exact - self.bound

    @property
    def holds(self) -> bool:
        return self.margin > 0

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'bound': self.bound, 'exact': self.exact,
                'margin': self.margin, 'holds': self.holds}


def leray_check(n: int, epsilon: Optional[float] = None) -> LerayCheck:
    return LerayCheck(n=n, bound=leray_weight(n), exact=leray_exact_weight(n, epsilon))


def improved_rellich2_weight(n: int, terms: Optional[int] = None, mode: str = 'auto') -> float:
    params = {} if terms is None else {'terms': terms}
    return WeightModel('improved_rellich2', params, eval_mode=mode)(n)


def gks_reference_weight(n: int, terms: Optional[int] = None, mode: str = 'series') -> float:
    """Partial sum of the reference series Σ d_k n^{-2k-2}"""
    params = {} if terms is None else {'terms': terms}
    return WeightModel('gks_reference', params, eval_mode=mode)(n)


def landau_weight(p: float, n: int) -> float:
    """((p-1)/p)^p n^{-p}"""
    return WeightModel('landau_constant', {'p': p})(n)


# ============================================================================
# n^{-5} COEFFICIENT
# ============================================================================

N5_CANDIDATES = {'15/16': Fraction(15, 16), '29/32': Fraction(29, 32)}


@dataclass
class N5Report:
    """Which printed n^{-5} coefficient the improved weight actually has"""
    from_coefficients: Fraction
    from_taylor: float
    candidates: Dict[str, Fraction]
    matches: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'from_coefficients': str(self.from_coefficients),
            'from_taylor': self.from_taylor,
            'candidates': {k: str(v) for k, v in self.candidates.items()},
            'matches': list(self.matches),
        }


def n5_coefficient_report() -> N5Report:
    """
    Compare a_3/4 with both candidates and with an independent Taylor
    expansion of H_{-2}/4 computed by mpmath
    """
    exact = improved_rellich2_coefficients(WEIGHT_CONFIG['improved_rellich2_terms'])[5]
    with mpmath.workdps(WEIGHT_CONFIG['extended_precision_dps']):
        one = mpmath.mpf(1)
        def quarter_H(t):
            return (one + (one - t) ** -2 - (one - t) ** mpmath.mpf(-0.5) - (one + t) ** mpmath.mpf(1.5)) / 4

        taylor = float(mpmath.taylor(quarter_H, 0, 4)[3])
    matches = [name for name, value in N5_CANDIDATES.items()
               if value == exact and abs(float(value) - taylor) < 1e-14]
    logger.info(f"n^-5 coefficient: a_3/4 = {exact}, Taylor {taylor:.16g}, matches {matches}")
    return N5Report(from_coefficients=exact, from_taylor=taylor,
                    candidates=dict(N5_CANDIDATES), matches=matches)
