"""
Compensated summation helpers
Error-free transformations used for every inner product in the library
"""
import math
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> Tuple[float, float]:
    """
    Error-free product: a*b == p + e exactly (barring overflow)

    Returns:
        Tuple of (rounded product, rounding error)
    """
    p = a * b
    if not math.isfinite(p):
        return p, 0.0
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _is_exact(values: Iterable) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def compensated_sum(terms: Iterable) -> float:
    """Correctly rounded sum of floats; exact when every term is rational"""
    terms = list(terms)
    if terms and _is_exact(terms):
        return sum(terms, Fraction(0))
    return math.fsum(float(t) for t in terms)


def compensated_dot(xs: Sequence, ys: Sequence) -> float:
    """Dot product with products split into value and error before an fsum"""
    if len(xs) != len(ys):
        raise ValueError(f"Length mismatch in dot product: {len(xs)} vs {len(ys)}")
    if xs and _is_exact(xs) and _is_exact(ys):
        return sum((x * y for x, y in zip(xs, ys)), Fraction(0))
    parts: List[float] = []
    for x, y in zip(xs, ys):
        p, e = two_prod(float(x), float(y))
        parts.append(p)
        parts.append(e)
    return math.fsum(parts)


# ============================================================================
# ARRAY VARIANTS
# ============================================================================

def two_sum_arrays(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise error-free sum: a + b == s + e"""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def two_prod_arrays(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise error-free product via Dekker splitting"""
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


class CompensatedVector:
    """
    Running elementwise sum of products kept as value + error arrays
    (cascaded two_sum / two_prod, about twice the working precision)
    """

    def __init__(self, size: int):
        self.hi = np.zeros(size)
        self.lo = np.zeros(size)

    def add(self, values: np.ndarray) -> None:
        self.hi, e = two_sum_arrays(self.hi, values)
        self.lo += e

    def add_product(self, coeff: float, values: np.ndarray) -> None:
        p, e = two_prod_arrays(np.full_like(values, float(coeff)), values)
        self.add(p)
        self.lo += e

    def add_scaled_pair(self, coeff: float, hi: np.ndarray, lo: np.ndarray) -> None:
        """Add coeff * (hi + lo)"""
        self.add_product(coeff, hi)
        self.lo += coeff * lo

    def result(self) -> Tuple[np.ndarray, np.ndarray]:
        s = self.hi + self.lo
        return s, self.lo - (s - self.hi)
