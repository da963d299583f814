"""
Finitely supported sequences on the integers
Exact stencil calculus: gradient, divergence, shift, Laplacian and half powers
"""
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Optional, Tuple, Union

from seq_core.summation import compensated_sum

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


class WeightDomainError(ValueError):
    """A weight callback is undefined somewhere on the summation range"""


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class BoundaryOrder:
    """Order ℓ of an inequality (ℓ ≥ 1)"""
    ell: int

    def __post_init__(self):
        if not isinstance(self.ell, int) or isinstance(self.ell, bool) or self.ell < 1:
            raise ValueError(f"Boundary order must be a positive integer, got {self.ell!r}")


@dataclass(frozen=True)
class FiniteSequence:
    """
    Finitely supported real sequence u_n, n ∈ ℤ.

    Stored as the values from `offset` onwards; everything else is zero.
    The stored window is always trimmed so that its first and last values
    are nonzero, and the zero sequence has offset 0 and no values.
    """
    offset: int = 0
    values: Tuple[Number, ...] = ()

    def __post_init__(self):
        values = tuple(self.values)
        lo, hi = 0, len(values)
        while lo < hi and values[lo] == 0:
            lo += 1
        while hi > lo and values[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            object.__setattr__(self, 'offset', 0)
            object.__setattr__(self, 'values', ())
        else:
            object.__setattr__(self, 'offset', int(self.offset) + lo)
            object.__setattr__(self, 'values', values[lo:hi])

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls) -> 'FiniteSequence':
        return cls()

    @classmethod
    def delta(cls, n: int, value: Number = 1) -> 'FiniteSequence':
        return cls(n, (value,))

    @classmethod
    def from_values(cls, values: Iterable[Number], offset: int = 0) -> 'FiniteSequence':
        return cls(offset, tuple(values))

    @classmethod
    def from_dict(cls, mapping: Dict[int, Number]) -> 'FiniteSequence':
        nonzero = {n: v for n, v in mapping.items() if v != 0}
        if not nonzero:
            return cls()
        lo, hi = min(nonzero), max(nonzero)
        return cls(lo, tuple(nonzero.get(n, 0) for n in range(lo, hi + 1)))

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def __call__(self, n: int) -> Number:
        i = n - self.offset
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0

    def is_zero(self) -> bool:
        return not self.values

    @property
    def start(self) -> int:
        return self.offset

    @property
    def end(self) -> int:
        """Last index of the support (offset - 1 for the zero sequence)"""
        return self.offset + len(self.values) - 1

    def support(self) -> Optional[Tuple[int, int]]:
        if self.is_zero():
            return None
        return self.start, self.end

    def window(self, lo: int, hi: int) -> Tuple[Number, ...]:
        """Values u_lo..u_hi inclusive, zero padded"""
        return tuple(self(n) for n in range(lo, hi + 1))

    def vanishes_below(self, k: int) -> bool:
        """True iff u_n = 0 for every n < k"""
        return self.is_zero() or self.start >= k

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------

    def _combine(self, other: 'FiniteSequence', op: Callable[[Any, Any], Any]) -> 'FiniteSequence':
        if self.is_zero() and other.is_zero():
            return FiniteSequence()
        spans = [s for s in (self.support(), other.support()) if s is not None]
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        return FiniteSequence(lo, tuple(op(self(n), other(n)) for n in range(lo, hi + 1)))

    def __add__(self, other: 'FiniteSequence') -> 'FiniteSequence':
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: 'FiniteSequence') -> 'FiniteSequence':
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> 'FiniteSequence':
        return FiniteSequence(self.offset, tuple(-v for v in self.values))

    def scale(self, c: Number) -> 'FiniteSequence':
        return FiniteSequence(self.offset, tuple(c * v for v in self.values))

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.values), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'offset': self.offset,
            'values': [float(v) for v in self.values],
        }


def canonical(u: FiniteSequence) -> FiniteSequence:
    """Canonical form (construction already canonicalizes, so this is idempotent)"""
    return FiniteSequence(u.offset, u.values)


def _as_ell(ell: Union[int, BoundaryOrder]) -> int:
    if isinstance(ell, BoundaryOrder):
        return ell.ell
    return BoundaryOrder(ell).ell


# ============================================================================
# OPERATORS
# ============================================================================

def grad(u: FiniteSequence) -> FiniteSequence:
    """(∇u)_n = u_n - u_{n-1}"""
    if u.is_zero():
        return FiniteSequence()
    return FiniteSequence(u.start, tuple(u(n) - u(n - 1) for n in range(u.start, u.end + 2)))


def divergence(u: FiniteSequence) -> FiniteSequence:
    """div(u)_n = u_{n+1} - u_n"""
    if u.is_zero():
        return FiniteSequence()
    return FiniteSequence(u.start - 1, tuple(u(n + 1) - u(n) for n in range(u.start - 1, u.end + 1)))


def shift(u: FiniteSequence, k: int) -> FiniteSequence:
    """(τ_k u)_n = u_{n+k}"""
    if u.is_zero():
        return u
    return FiniteSequence(u.offset - k, u.values)


def laplace(u: FiniteSequence) -> FiniteSequence:
    """
    Δu_n = 2u_n - u_{n+1} - u_{n-1}

    Evaluated as -[(u_{n+1} - u_n) - (u_n - u_{n-1})], the same float
    expression as div∘∇ and ∇∘div, so the three agree bit for bit.
    """
    if u.is_zero():
        return FiniteSequence()
    lo, hi = u.start - 1, u.end + 1
    return FiniteSequence(lo, tuple(-((u(n + 1) - u(n)) - (u(n) - u(n - 1))) for n in range(lo, hi + 1)))


def half_laplace_power(u: FiniteSequence, ell: Union[int, BoundaryOrder]) -> FiniteSequence:
    """Δ^{ℓ/2}: Δ^{ℓ/2} for even ℓ, ∇Δ^{(ℓ-1)/2} for odd ℓ"""
    order = _as_ell(ell)
    result = u
    for _ in range(order // 2):
        result = laplace(result)
    if order % 2 == 1:
        result = grad(result)
    return result


# ============================================================================
# WEIGHTED SUMS
# ============================================================================

def weighted_sum(
    u: FiniteSequence,
    v: FiniteSequence,
    w: Optional[Callable[[int], Number]] = None,
    lo: Optional[int] = None,
    hi: Optional[int] = None,
) -> Number:
    """
    Σ_{n=lo}^{hi} w(n) u_n v_n with compensated summation

    Args:
        u, v: Sequences to pair
        w: Weight callback (default 1)
        lo, hi: Inclusive summation range; missing ends are inferred from
            the intersection of the supports

    Returns:
        The sum (a Fraction when every input is rational)

    Raises:
        WeightDomainError: if w(n) is undefined or non-finite on the range
    """
    if lo is None or hi is None:
        su, sv = u.support(), v.support()
        if su is None or sv is None:
            return 0.0
        lo = max(su[0], sv[0]) if lo is None else lo
        hi = min(su[1], sv[1]) if hi is None else hi
    if hi < lo:
        return 0.0

    terms = []
    for n in range(lo, hi + 1):
        if w is None:
            weight = 1
        else:
            try:
                weight = w(n)
            except (ZeroDivisionError, ValueError, OverflowError) as e:
                raise WeightDomainError(f"Weight undefined at n={n}: {e}") from e
            if weight is None or (isinstance(weight, float) and not math.isfinite(weight)):
                raise WeightDomainError(f"Weight is not finite at n={n}: {weight!r}")
        un, vn = u(n), v(n)
        if un == 0 or vn == 0:
            continue
        terms.append(weight * un * vn)
    if not terms:
        return 0.0
    return compensated_sum(terms)
