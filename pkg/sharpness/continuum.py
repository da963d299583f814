"""
Continuum-limit sampling
Samples u_n = φ(n/M) and compares the rescaled Rellich sums with the integrals they approximate
"""
import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from config import CONTINUUM_CONFIG
from seq_core import FiniteSequence
from sharpness.forms import BoundaryConditionError, rellich_lhs, rellich_mass

logger = logging.getLogger(__name__)

_Q = Polynomial([0.0, 1.0, -1.0])  # x(1 - x)
_DQ = _Q.deriv()


# ============================================================================
# PROFILES
# ============================================================================

@lru_cache(maxsize=None)
def _bump_polynomial(k: int) -> Polynomial:
    """P_k with φ^{(k)} = P_k φ / q^{2k} for φ = exp(4 - 1/q), q = x(1 - x)"""
    p = Polynomial([1.0])
    for j in range(k):
        p = p.deriv() * _Q * _Q + p * _DQ - 2 * j * p * _Q * _DQ
    return p


@dataclass(frozen=True)
class SmoothBump:
    """φ(x) = a·exp(4 - 1/(x(1 - x))) on (0, 1), zero elsewhere"""
    amplitude: float = 1.0

    vanishing_order = math.inf

    @property
    def name(self) -> str:
        return f"smooth_bump(a={self.amplitude!r})"

    def derivative(self, x: Union[float, np.ndarray], k: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        q = x * (1.0 - x)
        out = np.zeros_like(x)
        inside = q > 0
        if self.amplitude == 0 or not np.any(inside):
            return out
        qi = q[inside]
        log_part = 4.0 - 1.0 / qi - 2 * k * np.log(qi)
        out[inside] = self.amplitude * _bump_polynomial(k)(x[inside]) * np.exp(log_part)
        return out

    def value(self, x: Union[float, np.ndarray]) -> np.ndarray:
        return self.derivative(x, 0)


@dataclass(frozen=True)
class PolynomialBump:
    """φ(x) = a·(4x(1 - x))^order on [0, 1]; vanishes to `order` at both ends"""
    order: int = 3
    amplitude: float = 1.0

    @property
    def vanishing_order(self) -> int:
        return self.order

    @property
    def name(self) -> str:
        return f"polynomial_bump(order={self.order}, a={self.amplitude!r})"

    def derivative(self, x: Union[float, np.ndarray], k: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        poly = (4.0 * _Q) ** self.order
        if k:
            poly = poly.deriv(k)
        inside = (x >= 0) & (x <= 1)
        return np.where(inside, self.amplitude * poly(x), 0.0)

    def value(self, x: Union[float, np.ndarray]) -> np.ndarray:
        return self.derivative(x, 0)


Profile = Union[SmoothBump, PolynomialBump]

PROFILES = {
    'smooth_bump': SmoothBump,
    'polynomial_bump': PolynomialBump,
}


# ============================================================================
# SAMPLING
# ============================================================================

@dataclass
class ContinuumSample:
    """Rescaled discrete sums next to their continuum integrals"""
    profile: str
    M: int
    ell: int
    discrete_lhs: float
    discrete_rhs: float
    continuous_lhs: float
    continuous_rhs: float

    @property
    def lhs_error(self) -> float:
        return abs(self.discrete_lhs - self.continuous_lhs)

    @property
    def rhs_error(self) -> float:
        return abs(self.discrete_rhs - self.continuous_rhs)

    @property
    def discrete_ratio(self) -> float:
        return self.discrete_lhs / self.discrete_rhs if self.discrete_rhs else math.nan

    @property
    def continuous_ratio(self) -> float:
        return self.continuous_lhs / self.continuous_rhs if self.continuous_rhs else math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            'profile': self.profile,
            'M': self.M,
            'ell': self.ell,
            'discrete_lhs': self.discrete_lhs,
            'discrete_rhs': self.discrete_rhs,
            'continuous_lhs': self.continuous_lhs,
            'continuous_rhs': self.continuous_rhs,
            'lhs_error': self.lhs_error,
            'rhs_error': self.rhs_error,
            'discrete_ratio': self.discrete_ratio,
        }


@lru_cache(maxsize=64)
def _continuum_integrals(phi: Profile, ell: int):
    """∫₀¹ |φ^{(ℓ)}|² dx and ∫₀¹ φ²/x^{2ℓ} dx by adaptive quadrature"""
    opts = {'limit': 400, 'epsabs': 1e-15, 'epsrel': 1e-13}
    lhs, _ = quad(lambda x: float(phi.derivative(x, ell)) ** 2, 0.0, 1.0, **opts)

    def mass(x: float) -> float:
        if x <= 0:
            return 0.0 if phi.vanishing_order > ell else float(phi.derivative(0.0, phi.order)) ** 2 / math.factorial(phi.order) ** 2
        return float(phi.value(x)) ** 2 / x ** (2 * ell)

    rhs, _ = quad(mass, 0.0, 1.0, **opts)
    return lhs, rhs


def sample_profile(phi: Profile, M: int, ell: int) -> FiniteSequence:
    """u_n = φ(n/M) for n ≥ ℓ, with the first ℓ entries set to zero"""
    n = np.arange(0, M + 1)
    values = phi.value(n / M)
    dropped = float(np.max(np.abs(values[:ell]))) if ell else 0.0
    if dropped:
        logger.debug(f"{phi.name}, M={M}: zeroed u_0..u_{ell - 1} (max {dropped:.3e})")
    values[:ell] = 0.0
    return FiniteSequence.from_values(values.tolist(), 0)


def continuum_probe(phi: Profile, M: int, ell: int = 2) -> ContinuumSample:
    """
    Rescaled sums M^{2ℓ-1}Σ_{n≥ℓ-1}|Δ^{ℓ/2}u_n|² and M^{2ℓ-1}Σ_{n≥ℓ}u_n²/n^{2ℓ}
    with u_n = φ(n/M), next to ∫|φ^{(ℓ)}|² and ∫φ²/x^{2ℓ}

    Raises:
        BoundaryConditionError: φ vanishes to lower order than ℓ at the endpoints
        ValueError: M below CONTINUUM_CONFIG['min_M']
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    if M < CONTINUUM_CONFIG['min_M']:
        raise ValueError(f"Continuum sampling needs M >= {CONTINUUM_CONFIG['min_M']}, got {M}")
    if phi.vanishing_order < ell:
        raise BoundaryConditionError(
            f"{phi.name} vanishes to order {phi.vanishing_order} at the endpoints; order {ell} needs at least {ell}"
        )

    u = sample_profile(phi, M, ell)
    scale = float(M) ** (2 * ell - 1)
    discrete_lhs = scale * rellich_lhs(ell, u)
    discrete_rhs = scale * rellich_mass(ell, u)
    continuous_lhs, continuous_rhs = _continuum_integrals(phi, ell)
    return ContinuumSample(phi.name, M, ell, discrete_lhs, discrete_rhs, continuous_lhs, continuous_rhs)


# ============================================================================
# CONVERGENCE
# ============================================================================

@dataclass
class ContinuumConvergence:
    """Sample rows over increasing M with empirical orders in 1/M"""
    table: pd.DataFrame

    @property
    def min_order(self) -> float:
        orders = pd.concat([self.table['lhs_order'], self.table['rhs_order']]).dropna()
        return float(orders.min()) if len(orders) else math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rows': self.table.to_dict(orient='records'),
            'min_order': self.min_order,
        }


def _orders(errors: List[float], Ms: List[int], reference: float) -> List[float]:
    """log(e_{k-1}/e_k)/log(M_k/M_{k-1}); NaN once the error reaches rounding level"""
    noise = CONTINUUM_CONFIG['endpoint_tolerance'] * max(abs(reference), 1.0)
    orders = [math.nan]
    for k in range(1, len(errors)):
        if errors[k] <= noise or errors[k - 1] <= noise:
            orders.append(math.nan)
        else:
            orders.append(math.log(errors[k - 1] / errors[k]) / math.log(Ms[k] / Ms[k - 1]))
    return orders


def continuum_convergence(phi: Profile, M_list: Sequence[int], ell: int = 2) -> ContinuumConvergence:
    Ms = [int(M) for M in M_list]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError(f"M values must be strictly increasing, got {Ms}")
    samples = [continuum_probe(phi, M, ell) for M in Ms]
    table = pd.DataFrame([p.to_dict() for p in samples])
    table['lhs_order'] = _orders([p.lhs_error for p in samples], Ms, samples[0].continuous_lhs)
    table['rhs_order'] = _orders([p.rhs_error for p in samples], Ms, samples[0].continuous_rhs)
    logger.info(f"Continuum sampling {phi.name}, ell={ell}: {len(Ms)} resolutions")
    return ContinuumConvergence(table)
