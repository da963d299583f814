"""
Weighted Hardy weights on ℤ^d
V = |x|^α, f = |x|^{2γ} with γ = (2 - d - α)/4, exact values and asymptotic expansions
"""
import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from config import LATTICE_CONFIG, WEIGHT_CONFIG
from lattice_zd.box import BoxDomain, ground_state_weight_field

logger = logging.getLogger(__name__)

Point = Tuple[int, ...]


def _check_alpha(alpha: float, d: int) -> None:
    if d < 2:
        raise ValueError(f"Lattice dimension must be >= 2, got {d}")
    if not alpha > 2 - d:
        raise ValueError(f"Weight exponent must satisfy alpha > 2 - d = {2 - d}, got {alpha}")


def _point(x: Iterable[int], d: int) -> Point:
    x = tuple(int(c) for c in x)
    if len(x) != d:
        raise ValueError(f"Point {x} does not have dimension {d}")
    if not any(x):
        raise ValueError("The weight is not defined at the origin")
    return x


def ground_state_exponent(alpha: float, d: int) -> float:
    """γ = (2 - d - α)/4"""
    return (2 - d - alpha) / 4


# ============================================================================
# EXPANSION COEFFICIENTS
# ============================================================================

@dataclass(frozen=True)
class ZdCoefficients:
    """w(x) ≈ leading|x|^{α-2} + isotropic|x|^{α-4} - anisotropic Σx_i⁴/|x|^{8-α}"""
    alpha: float
    d: int
    leading: float
    isotropic: float
    anisotropic: float

    @property
    def subleading_bound(self) -> float:
        """A with C Σx_i⁴ ≤ max(C, 0)|x|⁴ absorbed"""
        return self.isotropic - max(self.anisotropic, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha': self.alpha,
            'd': self.d,
            'leading': self.leading,
            'isotropic': self.isotropic,
            'anisotropic': self.anisotropic,
            'subleading_bound': self.subleading_bound,
        }


def zd_coefficients(alpha: float, d: int) -> ZdCoefficients:
    _check_alpha(alpha, d)
    g = ground_state_exponent(alpha, d)
    a = alpha
    k = a * g / 48 * ((a - 2) * (a - 4) + 3 * (a - 2) * (g - 1) + 4 * (g - 1) * (g - 2))
    leading = -2 * g * (d + a - 2 + 2 * g)
    isotropic = -g * ((g - 1) * (d + 4 * (g - 2)) + d * a / 2 + 3 * a * (a + 2 * g - 4) / 2)
    anisotropic = 4 * g * (g - 1) * (g - 2) * (g - 3) / 3 + 16 * k
    return ZdCoefficients(alpha, d, leading, isotropic, anisotropic)


def zd_subleading_bound(alpha: float, d: int) -> float:
    """(d-2+α)(3d+6+2α²-5α)/8 - max(C_{α,d}, 0)"""
    return zd_coefficients(alpha, d).subleading_bound


# ============================================================================
# EXACT WEIGHT
# ============================================================================

def zd_weight_exact(alpha: float, d: int, x: Iterable[int]) -> float:
    """
    w(x) = -div(V∇f)(x)/f(x) = Σ_{y∼x} ½(V(x)+V(y))(f(x) - f(y))/f(x)

    Evaluated in extended precision; V and f are 0 at the origin, so a
    neighbouring origin contributes ½V(x).
    """
    _check_alpha(alpha, d)
    x = _point(x, d)
    gamma = mpmath.mpf(ground_state_exponent(alpha, d))
    half_alpha = mpmath.mpf(alpha) / 2

    with mpmath.workdps(WEIGHT_CONFIG['extended_precision_dps']):
        def V(r2: int):
            return mpmath.mpf(r2) ** half_alpha if r2 else mpmath.mpf(0)

        def f(r2: int):
            return mpmath.mpf(r2) ** gamma if r2 else mpmath.mpf(0)

        r2 = sum(c * c for c in x)
        vx, fx = V(r2), f(r2)
        total = mpmath.mpf(0)
        for i, c in enumerate(x):
            for step in (1, -1):
                ry2 = r2 + 2 * step * c + 1
                total += (vx + V(ry2)) * (fx - f(ry2)) / 2
        return float(total / fx)


def zd_weight_field(alpha: float, domain: BoxDomain) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """V, f and w over the whole box in binary64 (V = f = 0 at the origin)"""
    _check_alpha(alpha, domain.d)
    r2 = domain.norm_squared().astype(float)
    gamma = ground_state_exponent(alpha, domain.d)
    nonzero = r2 > 0
    V = np.where(nonzero, np.power(r2, alpha / 2, where=nonzero, out=np.ones_like(r2)), 0.0)
    f = np.where(nonzero, np.power(r2, gamma, where=nonzero, out=np.ones_like(r2)), 0.0)
    return V, f, ground_state_weight_field(V, f)


# ============================================================================
# ASYMPTOTICS
# ============================================================================

def zd_weight_asymptotic(alpha: float, d: int, x: Iterable[int], order: int = 2) -> Optional[float]:
    """
    Truncated expansion of w(x); order 1 keeps the leading term, order 2 adds
    the |x|^{α-4} terms including the anisotropic Σx_i⁴ part.

    Returns:
        The value, or None when |x| is below LATTICE_CONFIG['asymptotic_min_norm']
    """
    if order not in (1, 2):
        raise ValueError(f"Expansion order must be 1 or 2, got {order}")
    coeffs = zd_coefficients(alpha, d)
    x = _point(x, d)
    r2 = sum(c * c for c in x)
    r = math.sqrt(r2)
    if r < LATTICE_CONFIG['asymptotic_min_norm']:
        logger.debug(f"|x| = {r:.3f} too small for the expansion at {x}")
        return None
    value = coeffs.leading * r ** (alpha - 2)
    if order == 2:
        quartic = sum(c ** 4 for c in x) / r2 ** 2
        value += (coeffs.isotropic - coeffs.anisotropic * quartic) * r ** (alpha - 4)
    return value


def _ray_point(ray: Sequence[int], t: int) -> Point:
    return tuple(int(c) * int(t) for c in ray)


def _ray_norm(ray: Sequence[int]) -> float:
    return math.sqrt(sum(int(c) ** 2 for c in ray))


@dataclass
class SubleadingFit:
    """Fitted coefficient of |x|^{α-4} along a ray, next to the expansion value"""
    alpha: float
    d: int
    ray: Tuple[int, ...]
    fitted: float
    expected: float
    remainder_exponent: float
    table: pd.DataFrame

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha': self.alpha,
            'd': self.d,
            'ray': list(self.ray),
            'fitted': self.fitted,
            'expected': self.expected,
            'remainder_exponent': self.remainder_exponent,
            'rows': self.table.to_dict(orient='records'),
        }


def zd_fit_subleading(
    alpha: float,
    d: int,
    ray: Optional[Sequence[int]] = None,
    t_values: Optional[Sequence[int]] = None,
) -> SubleadingFit:
    """
    Regress (w - leading|x|^{α-2})|x|^{4-α} on |x|^{-2} along x = t·ray

    The intercept is the fitted subleading coefficient; a log-log fit of
    |w - order 2 expansion| against |x| gives the remainder exponent.
    """
    ray = tuple(int(c) for c in (ray if ray is not None else (1,) + (0,) * (d - 1)))
    t_values = list(LATTICE_CONFIG['fit_t_values'] if t_values is None else t_values)
    if len(ray) != d or not any(ray):
        raise ValueError(f"Ray {ray} must be a nonzero vector of dimension {d}")
    if len(t_values) < 3:
        raise ValueError(f"Need at least three ray points, got {len(t_values)}")
    coeffs = zd_coefficients(alpha, d)

    rows = []
    for t in t_values:
        x = _ray_point(ray, t)
        r = _ray_norm(ray) * t
        exact = zd_weight_exact(alpha, d, x)
        rows.append({
            't': int(t),
            'norm': r,
            'exact': exact,
            'scaled_remainder': (exact - coeffs.leading * r ** (alpha - 2)) * r ** (4 - alpha),
            'expansion_error': exact - zd_weight_asymptotic(alpha, d, x, order=2),
        })
    table = pd.DataFrame(rows)

    inv_sq = (table['norm'].to_numpy() ** -2).reshape(-1, 1)
    model = LinearRegression().fit(inv_sq, table['scaled_remainder'].to_numpy())
    fitted = float(model.intercept_)

    errors = np.abs(table['expansion_error'].to_numpy())
    usable = errors > 0
    exponent = math.nan
    if usable.sum() >= 2:
        log_fit = LinearRegression().fit(np.log(table['norm'].to_numpy()[usable]).reshape(-1, 1), np.log(errors[usable]))
        exponent = float(log_fit.coef_[0])

    quartic = sum(c ** 4 for c in ray) / _ray_norm(ray) ** 4
    expected = coeffs.isotropic - coeffs.anisotropic * quartic
    logger.info(f"Subleading fit alpha={alpha}, d={d}, ray={ray}: {fitted:.6g} (expansion {expected:.6g})")
    return SubleadingFit(alpha, d, ray, fitted, expected, exponent, table)


def leading_ratio_table(alpha: float, d: int, norms: Optional[Sequence[int]] = None) -> pd.DataFrame:
    """w_exact·|x|^{2-α} against (d-2+α)²/4 on the first axis"""
    norms = LATTICE_CONFIG['ratio_norms'] if norms is None else norms
    leading = zd_coefficients(alpha, d).leading
    rows = []
    for t in norms:
        x = (int(t),) + (0,) * (d - 1)
        scaled = zd_weight_exact(alpha, d, x) * float(t) ** (2 - alpha)
        rows.append({'norm': int(t), 'scaled_weight': scaled, 'leading': leading, 'ratio': scaled / leading})
    return pd.DataFrame(rows, columns=['norm', 'scaled_weight', 'leading', 'ratio'])
