"""
Rellich iteration chain and the boundary counterexample
Every quantity of the order-raising argument evaluated on a concrete sequence
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import COUNTEREXAMPLE_CONFIG, TOLERANCES
from seq_core import FiniteSequence, divergence, grad, half_laplace_power, laplace, shift, weighted_sum
from sharpness.forms import BoundaryConditionError, rellich_lhs, rellich_mass, sharp_constant

logger = logging.getLogger(__name__)


# ============================================================================
# COUNTEREXAMPLE
# ============================================================================

@dataclass
class CounterexampleResult:
    """Σ_{n≥1}|Δu_n|² against the partial Rellich mass for the piecewise-linear gradient profile"""
    M: int
    u: FiniteSequence
    lhs: float
    rhs_partial: float
    w_sum: Fraction

    @property
    def ratio(self) -> float:
        return self.rhs_partial / self.lhs

    @property
    def scaled_lhs(self) -> float:
        """M·lhs, bounded in M"""
        return self.M * self.lhs

    def to_dict(self) -> Dict[str, Any]:
        return {
            'M': self.M,
            'lhs': self.lhs,
            'rhs_partial': self.rhs_partial,
            'ratio': self.ratio,
            'scaled_lhs': self.scaled_lhs,
            'w_sum': str(self.w_sum),
            'u1': str(self.u(1)),
        }


def counterexample_gradient(M: int) -> FiniteSequence:
    """
    w_n = 1 + 1/(2M) on 1..M, 1 - (n-M)/M on M+1..3M, -1 + (n-3M)/(2M) on 3M+1..5M
    as exact rationals
    """
    if M < 2:
        raise ValueError(f"Counterexample needs M >= 2, got {M}")
    values = []
    for n in range(1, 5 * M + 1):
        if n <= M:
            values.append(1 + Fraction(1, 2 * M))
        elif n <= 3 * M:
            values.append(1 - Fraction(n - M, M))
        else:
            values.append(-1 + Fraction(n - 3 * M, 2 * M))
    return FiniteSequence.from_values(values, 1)


def counterexample_build(M: int) -> CounterexampleResult:
    """
    u_n = Σ_{k≤n} w_k: u_0 = 0, u_1 = 1 + 1/(2M), u_n = 0 for n > 5M, and
    Σ|Δu|² = O(1/M) while Σ_{n=2}^{M} u_n²/n⁴ ≥ Σ_{n=2}^{M} 1/n²
    """
    w = counterexample_gradient(M)
    w_sum = sum(w.values, Fraction(0))
    prefix, total = [], Fraction(0)
    for value in w.values:
        total += value
        prefix.append(total)
    u = FiniteSequence.from_values(prefix, 1)
    if w_sum != 0 or not u.vanishes_below(1) or u.end > 5 * M:
        raise ArithmeticError(f"Counterexample construction for M={M} is not finitely supported")

    lap = laplace(u)
    lhs = float(weighted_sum(lap, lap, lo=1, hi=lap.end))
    rhs_partial = float(weighted_sum(u, u, lambda n: 1.0 / n ** 4, lo=2, hi=M))
    return CounterexampleResult(M, u, lhs, rhs_partial, w_sum)


def counterexample_sweep(M_list: Optional[Sequence[int]] = None) -> pd.DataFrame:
    """Rows (M, lhs, rhs_partial, ratio) for each M"""
    M_list = COUNTEREXAMPLE_CONFIG['M_list'] if M_list is None else M_list
    rows = []
    for M in M_list:
        result = counterexample_build(int(M))
        rows.append({'M': result.M, 'lhs': result.lhs, 'rhs_partial': result.rhs_partial, 'ratio': result.ratio})
    return pd.DataFrame(rows, columns=['M', 'lhs', 'rhs_partial', 'ratio'])


def fit_lhs_constant(table: pd.DataFrame) -> float:
    """Least squares K in lhs ≈ K/M"""
    inv = 1.0 / table['M'].to_numpy(dtype=float)
    lhs = table['lhs'].to_numpy(dtype=float)
    return float(np.dot(inv, lhs) / np.dot(inv, inv))


# ============================================================================
# ITERATION CHAIN
# ============================================================================

@dataclass
class ChainStep:
    """One link `left relation right` of the chain"""
    order: int
    label: str
    relation: str
    left: float
    right: float

    @property
    def slack(self) -> float:
        if self.relation == '<=':
            return self.right - self.left
        return self.left - self.right

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        scale = abs(self.left) + abs(self.right) + 1.0
        if self.relation == '=':
            return abs(self.slack) <= tol * scale
        return self.slack >= -tol * scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            'order': self.order,
            'label': self.label,
            'relation': self.relation,
            'left': self.left,
            'right': self.right,
            'slack': self.slack,
            'holds': self.holds(),
        }


@dataclass
class ChainReport:
    ell: int
    steps: List[ChainStep] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(step.holds() for step in self.steps)

    @property
    def min_slack(self) -> float:
        inequalities = [s.slack for s in self.steps if s.relation != '=']
        return min(inequalities) if inequalities else 0.0

    def failures(self) -> List[ChainStep]:
        return [s for s in self.steps if not s.holds()]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ell': self.ell,
            'holds': self.holds,
            'min_slack': self.min_slack,
            'steps': [s.to_dict() for s in self.steps],
        }


def _sq(u: FiniteSequence, lo: int) -> float:
    """Σ_{n≥lo} u_n²"""
    if u.is_zero() or u.end < lo:
        return 0.0
    return float(weighted_sum(u, u, lo=lo, hi=u.end))


def _shifted_mass(g: FiniteSequence, power: int, lo: int) -> float:
    """Σ_{n≥lo} g_n² / (n-1)^power"""
    if g.is_zero() or g.end < lo:
        return 0.0
    return float(weighted_sum(g, g, lambda n: 1.0 / (n - 1) ** power, lo=lo, hi=g.end))


def _first_order(u: FiniteSequence) -> List[ChainStep]:
    lhs = _sq(grad(u), 0)
    return [ChainStep(1, 'Σ_{n≥0}|∇u|² ≥ ¼Σ_{n≥1}u²/n²', '>=', lhs, 0.25 * rellich_mass(1, u, 1))]


def _second_order(u: FiniteSequence) -> List[ChainStep]:
    v = divergence(u)
    lap = laplace(u)
    a = _sq(lap, 1)
    b = _sq(grad(v), 1)
    c = 0.25 * rellich_mass(1, v, 1)
    d = 0.25 * _shifted_mass(grad(u), 2, 2)
    e = sharp_constant(2) * rellich_mass(2, u, 2)
    return [
        ChainStep(2, 'Σ_{n≥1}|Δu|² = Σ_{n≥1}|∇v|², v = div u', '=', a, b),
        ChainStep(2, 'Σ_{n≥1}|∇v|² ≥ ¼Σ_{n≥1}v²/n²', '>=', b, c),
        ChainStep(2, '¼Σ_{n≥1}v²/n² = ¼Σ_{n≥2}|∇u|²/(n-1)²', '=', c, d),
        ChainStep(2, '¼Σ_{n≥2}|∇u|²/(n-1)² ≥ (9/16)Σ_{n≥2}u²/n⁴', '>=', d, e),
    ]


def _odd_order(u: FiniteSequence, m: int) -> List[ChainStep]:
    """ℓ = 2m+1 from ℓ = 2m on ∇τ₁u and the shifted Hardy inequality with α = -4m"""
    ell = 2 * m + 1
    v = shift(u, 1)
    gv = grad(v)
    c_prev = sharp_constant(2 * m)
    a = _sq(grad(half_laplace_power(u, 2 * m)), 2 * m)
    b = _sq(grad(half_laplace_power(v, 2 * m)), 2 * m - 1)
    c = _sq(half_laplace_power(gv, 2 * m), 2 * m - 1)
    d = c_prev * rellich_mass(2 * m, gv, 2 * m)
    e = c_prev * _shifted_mass(grad(u), 4 * m, 2 * m + 1)
    f = c_prev * _shifted_mass(grad(u), 4 * m, 2)
    g = c_prev * (4 * m + 1) ** 2 / 4 * rellich_mass(ell, u, 2)
    h = sharp_constant(ell) * rellich_mass(ell, u, ell)
    return [
        ChainStep(ell, f'Σ_{{n≥{2 * m}}}|∇Δ^{m}u|² = Σ_{{n≥{2 * m - 1}}}|∇Δ^{m}v|², v = τ₁u', '=', a, b),
        ChainStep(ell, f'Σ|∇Δ^{m}v|² = Σ|Δ^{m}∇v|²', '=', b, c),
        ChainStep(ell, f'Σ_{{n≥{2 * m - 1}}}|Δ^{m}∇v|² ≥ C_{2 * m}Σ_{{n≥{2 * m}}}(∇v)²/n^{4 * m}', '>=', c, d),
        ChainStep(ell, f'C_{2 * m}Σ(∇v)²/n^{4 * m} = C_{2 * m}Σ_{{n≥{2 * m + 1}}}(∇u)²/(n-1)^{4 * m}', '=', d, e),
        ChainStep(ell, f'range n≥{2 * m + 1} = range n≥2', '=', e, f),
        ChainStep(ell, f'C_{2 * m}Σ_{{n≥2}}(∇u)²/(n-1)^{4 * m} ≥ C_{2 * m}({4 * m + 1}²/4)Σ_{{n≥2}}u²/n^{4 * m + 2}', '>=', f, g),
        ChainStep(ell, f'= C_{ell}Σ_{{n≥{ell}}}u²/n^{2 * ell}', '=', g, h),
    ]


def _even_order(u: FiniteSequence, m: int) -> List[ChainStep]:
    """
    ℓ = 2m+2 from ℓ = 2m+1 on div u and the shifted Hardy inequality with α = -4m-2

    The first link extends the range down to n = 2m, so it holds as `<=`.
    """
    ell = 2 * m + 2
    v = divergence(u)
    c_prev = sharp_constant(2 * m + 1)
    a = _sq(half_laplace_power(u, ell), 2 * m + 1)
    b = _sq(grad(half_laplace_power(v, 2 * m)), 2 * m)
    c = c_prev * rellich_mass(2 * m + 1, v, 2 * m + 1)
    d = c_prev * _shifted_mass(grad(u), 4 * m + 2, 2)
    e = c_prev * (4 * m + 3) ** 2 / 4 * rellich_mass(ell, u, ell)
    f = sharp_constant(ell) * rellich_mass(ell, u, ell)
    return [
        ChainStep(ell, f'Σ_{{n≥{2 * m + 1}}}|Δ^{m + 1}u|² ≤ Σ_{{n≥{2 * m}}}|∇Δ^{m}v|², v = div u', '<=', a, b),
        ChainStep(ell, f'Σ_{{n≥{2 * m}}}|∇Δ^{m}v|² ≥ C_{2 * m + 1}Σ_{{n≥{2 * m + 1}}}v²/n^{4 * m + 2}', '>=', b, c),
        ChainStep(ell, f'C_{2 * m + 1}Σv²/n^{4 * m + 2} = C_{2 * m + 1}Σ_{{n≥2}}(∇u)²/(n-1)^{4 * m + 2}', '=', c, d),
        ChainStep(ell, f'C_{2 * m + 1}Σ_{{n≥2}}(∇u)²/(n-1)^{4 * m + 2} ≥ C_{2 * m + 1}({4 * m + 3}²/4)Σ_{{n≥{ell}}}u²/n^{2 * ell}', '>=', d, e),
        ChainStep(ell, f'= C_{ell}Σ_{{n≥{ell}}}u²/n^{2 * ell}', '=', e, f),
    ]


def iteration_chain_check(ell: int, u: FiniteSequence) -> ChainReport:
    """
    Evaluate each link of the chain raising the Rellich order to ℓ

    Raises:
        BoundaryConditionError: u_k ≠ 0 for some k ≤ ℓ-1
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    if not u.vanishes_below(ell):
        raise BoundaryConditionError(f"Chain of order {ell} needs u_0..u_{ell - 1} = 0, support starts at {u.start}")

    if ell == 1:
        steps = _first_order(u)
    elif ell == 2:
        steps = _second_order(u)
    elif ell % 2 == 1:
        steps = _odd_order(u, (ell - 1) // 2)
    else:
        steps = _even_order(u, (ell - 2) // 2)

    report = ChainReport(ell, steps)
    for step in report.failures():
        logger.warning(f"Chain order {ell}: step '{step.label}' fails with slack {step.slack:.3e}")
    return report
