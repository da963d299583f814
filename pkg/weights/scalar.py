"""
Scalar analysis functions behind the weight lower bounds
H_α, G_α, F_α, K_α, J_α, L_α, Y and the α-functions g, G, Q
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple, Union

import mpmath
import numpy as np

from config import WEIGHT_CONFIG

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class ScalarDomainError(ValueError):
    """Argument outside the declared interval of a scalar function"""


# ============================================================================
# FUNCTION IDS
# ============================================================================

# name -> (interval low, high, low closed, high closed, argument, needs alpha)
_INTERVALS: Dict[str, Tuple[float, float, bool, bool, str, bool]] = {
    'H': (0.0, 1.0, True, False, 'x', True),
    'G': (0.0, 1.0, True, True, 'x', True),
    'F': (1.0, 1.5, True, True, 'x', True),
    'K': (1.0, 1.5, True, True, 'x', True),
    'Y': (1.0, 1.5, True, True, 'x', False),
    'J': (0.75, 1.0, True, True, 'Y', True),
    'L': (0.75, 1.0, True, True, 'Y', True),
    'g': (1.0, 3.0, True, True, 'alpha', False),
    'G_cubic': (1.0, 3.0, True, True, 'alpha', False),
    'Q': (1.0, 3.0, True, True, 'alpha', False),
}

SCALAR_FUNCTIONS = tuple(_INTERVALS)


@dataclass(frozen=True)
class ScalarFunctionId:
    """A scalar function with its parameter α (where it has one)"""
    name: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.name not in _INTERVALS:
            raise ValueError(f"Unknown scalar function: {self.name}")
        if _INTERVALS[self.name][5] and self.alpha is None:
            raise ValueError(f"Scalar function {self.name} needs a parameter alpha")

    @property
    def argument(self) -> str:
        return _INTERVALS[self.name][4]

    def interval(self) -> Tuple[float, float, bool, bool]:
        lo, hi, lo_closed, hi_closed, _arg, _needs = _INTERVALS[self.name]
        return lo, hi, lo_closed, hi_closed

    def contains(self, x: ArrayLike) -> bool:
        lo, hi, lo_closed, hi_closed = self.interval()
        arr = np.asarray(x, dtype=float)
        ok_lo = arr >= lo if lo_closed else arr > lo
        ok_hi = arr <= hi if hi_closed else arr < hi
        return bool(np.all(ok_lo & ok_hi))

    def label(self) -> str:
        return self.name if self.alpha is None else f"{self.name}[alpha={self.alpha:g}]"

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'alpha': self.alpha, 'interval': list(self.interval()[:2])}


# ============================================================================
# BINARY64 EVALUATORS
# ============================================================================

def pow_minus_one(a: float, y: ArrayLike) -> ArrayLike:
    """(1 + y)^a - 1 without cancellation for small y"""
    with np.errstate(divide='ignore', invalid='ignore'):
        out = np.expm1(a * np.log1p(y))
    if a == 0:
        out = np.zeros_like(np.asarray(y, dtype=float))
    return out


def H_alpha(alpha: float, x: ArrayLike) -> ArrayLike:
    """H_α(x) = 1 + (1-x)^α - (1-x)^{(1+α)/2} - (1+x)^{(1-α)/2}"""
    return pow_minus_one(alpha, -x) - pow_minus_one((1 + alpha) / 2, -x) - pow_minus_one((1 - alpha) / 2, x)


def G_alpha(alpha: float, x: ArrayLike) -> ArrayLike:
    """G_α(x) = 1 + (1+x)^α - (1+x)^{(α+1)/2} - (1-x)^{(1-α)/2}"""
    return pow_minus_one(alpha, x) - pow_minus_one((alpha + 1) / 2, x) - pow_minus_one((1 - alpha) / 2, -x)


def F_alpha_at(alpha: float, t: ArrayLike) -> ArrayLike:
    """F_α(1 + t); F_α(x) = 1 + x^α - x^{(3α-1)/2}(2x-1)^{(1-α)/2} - x^{(α-1)/2}"""
    t = np.asarray(t, dtype=float)
    mixed = np.expm1((3 * alpha - 1) / 2 * np.log1p(t) + (1 - alpha) / 2 * np.log1p(2 * t))
    return pow_minus_one(alpha, t) - mixed - pow_minus_one((alpha - 1) / 2, t)


def F_alpha(alpha: float, x: ArrayLike) -> ArrayLike:
    return F_alpha_at(alpha, np.asarray(x, dtype=float) - 1.0)


def Y_of_x(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    return x / (2 * x - 1)


def L_poly(alpha: float, Y: ArrayLike) -> ArrayLike:
    """Cubic P with L_α(Y) = Y^{(α-1)/2} P(Y)"""
    a = alpha
    return ((a + 1) * (a + 3) * Y ** 3
            - 3 * (3 * a - 1) * (a + 1) / 2 * Y ** 2
            + 9 * (3 * a - 1) * (a - 1) / 4 * Y
            - 3 * (3 * a - 1) * (3 * a - 5) / 8)


def L_alpha(alpha: float, Y: ArrayLike) -> ArrayLike:
    Y = np.asarray(Y, dtype=float)
    return Y ** ((alpha - 1) / 2) * L_poly(alpha, Y)


def J_alpha(alpha: float, Y: ArrayLike) -> ArrayLike:
    """J_α with L_α'(Y) = Y^{(α-3)/2} J_α(Y)"""
    a = alpha
    Y = np.asarray(Y, dtype=float)
    return ((a + 1) * (a + 3) * (a + 5) / 2 * Y ** 3
            - 3 * (3 * a - 1) * (a + 1) * (a + 3) / 4 * Y ** 2
            + 9 * (3 * a - 1) * (a * a - 1) / 8 * Y
            - 3 * (a - 1) * (3 * a - 1) * (3 * a - 5) / 16)


def K_alpha(alpha: float, x: ArrayLike) -> ArrayLike:
    """K_α with F_α'''(x) = (α-1) x^{α-3} K_α(x)"""
    x = np.asarray(x, dtype=float)
    a = alpha
    return a * (a - 2) - (a - 3) * (a - 5) / 8 * x ** ((-1 - a) / 2) + L_alpha(a, Y_of_x(x))


def g_alpha(alpha: ArrayLike) -> ArrayLike:
    """g(α) = J_α(3/4) = 3(-9α³ + 63α² - 175α + 265)/128"""
    a = np.asarray(alpha, dtype=float)
    return 3 * (-9 * a ** 3 + 63 * a ** 2 - 175 * a + 265) / 128


def G_cubic(alpha: ArrayLike) -> ArrayLike:
    """G(α) = (113α³ - 791α² + 1799α - 1905)/512"""
    a = np.asarray(alpha, dtype=float)
    return (113 * a ** 3 - 791 * a ** 2 + 1799 * a - 1905) / 512


def Q_alpha(alpha: ArrayLike) -> ArrayLike:
    """Q(α) = F_α''(3/2)"""
    a = np.asarray(alpha, dtype=float)
    return (a - 1) * (a * 1.5 ** (a - 2)
                      - (a + 1) * 1.5 ** ((3 * a - 1) / 2) * 2.0 ** ((-3 - a) / 2)
                      - (a - 3) / 4 * 1.5 ** ((a - 5) / 2))


# ============================================================================
# EXTENDED PRECISION EVALUATORS
# ============================================================================

def precise_value(name: str, alpha: Optional[float], x) -> Any:
    """Extended precision value at the current mpmath precision; x may be an mpf"""
    one = mpmath.mpf(1)
    a = None if alpha is None else mpmath.mpf(alpha)
    x = mpmath.mpf(x)
    if name == 'H':
        return one + (one - x) ** a - (one - x) ** ((1 + a) / 2) - (one + x) ** ((1 - a) / 2)
    if name == 'G':
        return one + (one + x) ** a - (one + x) ** ((a + 1) / 2) - (one - x) ** ((1 - a) / 2)
    if name == 'F':
        return one + x ** a - x ** ((3 * a - 1) / 2) * (2 * x - 1) ** ((1 - a) / 2) - x ** ((a - 1) / 2)
    if name == 'Y':
        return x / (2 * x - 1)
    if name == 'L':
        return x ** ((a - 1) / 2) * ((a + 1) * (a + 3) * x ** 3 - 3 * (3 * a - 1) * (a + 1) / 2 * x ** 2
                                     + 9 * (3 * a - 1) * (a - 1) / 4 * x - 3 * (3 * a - 1) * (3 * a - 5) / 8)
    if name == 'J':
        return ((a + 1) * (a + 3) * (a + 5) / 2 * x ** 3 - 3 * (3 * a - 1) * (a + 1) * (a + 3) / 4 * x ** 2
                + 9 * (3 * a - 1) * (a * a - 1) / 8 * x - 3 * (a - 1) * (3 * a - 1) * (3 * a - 5) / 16)
    if name == 'K':
        Y = x / (2 * x - 1)
        return a * (a - 2) - (a - 3) * (a - 5) / 8 * x ** ((-1 - a) / 2) + precise_value('L', alpha, Y)
    if name == 'g':
        return 3 * (-9 * x ** 3 + 63 * x ** 2 - 175 * x + 265) / 128
    if name == 'G_cubic':
        return (113 * x ** 3 - 791 * x ** 2 + 1799 * x - 1905) / 512
    if name == 'Q':
        h = mpmath.mpf(3) / 2
        return (x - 1) * (x * h ** (x - 2) - (x + 1) * h ** ((3 * x - 1) / 2) * mpmath.mpf(2) ** ((-3 - x) / 2)
                          - (x - 3) / 4 * h ** ((x - 5) / 2))
    raise ValueError(f"Unknown scalar function: {name}")


_FLOAT_EVALUATORS: Dict[str, Callable[[Optional[float], ArrayLike], ArrayLike]] = {
    'H': lambda a, x: H_alpha(a, x),
    'G': lambda a, x: G_alpha(a, x),
    'F': lambda a, x: F_alpha(a, x),
    'K': lambda a, x: K_alpha(a, x),
    'Y': lambda a, x: Y_of_x(x),
    'J': lambda a, x: J_alpha(a, x),
    'L': lambda a, x: L_alpha(a, x),
    'g': lambda a, x: g_alpha(x),
    'G_cubic': lambda a, x: G_cubic(x),
    'Q': lambda a, x: Q_alpha(x),
}


def scalar_eval(fid: ScalarFunctionId, x: ArrayLike, precise: bool = False,
                dps: Optional[int] = None) -> Any:
    """
    Evaluate a scalar function on its declared interval

    Args:
        fid: Function id (with α where needed)
        x: Argument (x, Y or α depending on the function); arrays allowed in binary64 mode
        precise: Use mpmath at `dps` digits (default from WEIGHT_CONFIG)

    Returns:
        float / ndarray, or mpmath.mpf in precise mode

    Raises:
        ScalarDomainError: x outside the declared interval
    """
    if not fid.contains(x):
        lo, hi, _lc, _hc = fid.interval()
        raise ScalarDomainError(f"{fid.label()} is defined on [{lo}, {hi}], got {x}")
    if precise:
        digits = dps or WEIGHT_CONFIG['extended_precision_dps']
        with mpmath.workdps(digits):
            if np.ndim(x) == 0:
                arg = x if isinstance(x, mpmath.mpf) else float(x)
                return +precise_value(fid.name, fid.alpha, arg)
            return [+precise_value(fid.name, fid.alpha, float(v)) for v in np.ravel(x)]
    value = _FLOAT_EVALUATORS[fid.name](fid.alpha, x)
    if np.ndim(value) == 0:
        return float(value)
    return value
