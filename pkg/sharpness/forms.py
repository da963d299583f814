"""
Rellich quadratic forms on ℕ
Banded assembly of Σ_{n≥ℓ-1}|Δ^{ℓ/2}u_n|² with Dirichlet elimination, and the sharp constants
"""
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Tuple

import mpmath
import numpy as np
from scipy import sparse

from config import EIGEN_CONFIG
from seq_core import CompensatedVector, FiniteSequence, half_laplace_power, weighted_sum
from weights.margins import RellichMargin

logger = logging.getLogger(__name__)


class BoundaryConditionError(ValueError):
    """Test sequence or profile does not vanish where the inequality requires it"""


# ============================================================================
# SHARP CONSTANTS
# ============================================================================

def sharp_constant_exact(ell: int) -> Fraction:
    """[(2ℓ)! / (4^ℓ ℓ!)]² as an exact rational"""
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    base = Fraction(math.factorial(2 * ell), 4 ** ell * math.factorial(ell))
    return base * base


def sharp_constant(ell: int) -> float:
    """
    Optimal Rellich constant C_ℓ in binary64

    Exact integer intermediates up to EIGEN_CONFIG['max_ell_exact'], extended
    precision beyond.
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    if ell <= EIGEN_CONFIG['max_ell_exact']:
        return float(sharp_constant_exact(ell))
    with mpmath.workdps(50):
        value = (mpmath.factorial(2 * ell) / (mpmath.mpf(4) ** ell * mpmath.factorial(ell))) ** 2
        if value > mpmath.mpf(np.finfo(float).max):
            raise ValueError(f"C_{ell} overflows binary64")
        return float(value)


# ============================================================================
# STENCILS
# ============================================================================

@lru_cache(maxsize=None)
def half_power_stencil(ell: int) -> Tuple[int, Tuple[int, ...]]:
    """
    Integer stencil of Δ^{ℓ/2}: (Δ^{ℓ/2}u)_n = Σ_j c_j u_{n+lo+j}

    Returns:
        Tuple of (lo, coefficients)
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    m = ell // 2
    coeffs = np.array([1], dtype=np.int64)
    for _ in range(m):
        coeffs = np.convolve(coeffs, np.array([-1, 2, -1], dtype=np.int64))
    lo = -m
    if ell % 2 == 1:
        coeffs = np.convolve(np.array([-1, 1], dtype=np.int64), coeffs)
        lo -= 1
    return lo, tuple(int(c) for c in coeffs)


# ============================================================================
# BANDED FORM
# ============================================================================

@dataclass
class BandedForm:
    """
    A v = λ B v over the unknowns u_ℓ..u_N

    A = SᵀS where S maps the unknowns to (Δ^{ℓ/2}u)_n, n ≥ ℓ-1, with
    u_k = 0 for k < ℓ and k > N; B = diag(n^{-2ℓ}).
    """
    N: int
    ell: int
    S: sparse.csr_matrix
    A: sparse.csr_matrix
    B: np.ndarray
    row_start: int
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.N - self.ell + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.ell, self.N + 1)

    def apply_stencil(self, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """S v as a compensated (value, error) pair"""
        lo, coeffs = half_power_stencil(self.ell)
        rows = self.S.shape[0]
        # row r is n = row_start + r; it reads unknown index n + lo + j - ell
        offset = len(coeffs) + self.ell
        padded = np.zeros(rows + self.size + 2 * offset)
        padded[offset:offset + self.size] = v
        acc = CompensatedVector(rows)
        base = self.row_start + lo - self.ell + offset
        for j, c in enumerate(coeffs):
            start = base + j
            acc.add_product(c, padded[start:start + rows])
        return acc.result()

    def apply_transpose(self, hi: np.ndarray, lo_part: np.ndarray, acc: CompensatedVector) -> None:
        """acc += Sᵀ (hi + lo_part)"""
        lo, coeffs = half_power_stencil(self.ell)
        rows = self.S.shape[0]
        offset = len(coeffs) + self.size
        padded_hi = np.zeros(rows + 2 * offset)
        padded_lo = np.zeros(rows + 2 * offset)
        padded_hi[offset:offset + rows] = hi
        padded_lo[offset:offset + rows] = lo_part
        # unknown i (n = i + ell) is read by row n - lo - j
        for j, c in enumerate(coeffs):
            start = offset + self.ell - lo - j - self.row_start
            acc.add_scaled_pair(c, padded_hi[start:start + self.size], padded_lo[start:start + self.size])

    def energy(self, v: np.ndarray) -> float:
        """vᵀAv = ‖Sv‖² with the stencil product kept compensated"""
        hi, lo = self.apply_stencil(v)
        return math.fsum(hi * hi) + 2.0 * math.fsum(hi * lo)

    def mass(self, v: np.ndarray) -> float:
        return math.fsum(self.B * v * v)

    def to_dict(self) -> Dict[str, Any]:
        return {'N': self.N, 'ell': self.ell, 'size': self.size, 'halfwidth': self.ell}


def assemble_form(ell: int, N: int) -> BandedForm:
    """
    Assemble the Rellich form of order ℓ truncated at N

    Raises:
        ValueError: N < ℓ + 1 (fewer than two unknowns)
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    if N < ell + 1:
        raise ValueError(f"Truncation N={N} too small for order {ell}; need N >= {ell + 1}")

    lo, coeffs = half_power_stencil(ell)
    hi = lo + len(coeffs) - 1
    size = N - ell + 1
    row_start = max(ell - 1, ell - hi)
    row_end = N - lo
    n_rows = row_end - row_start + 1

    rows, cols, vals = [], [], []
    for j, c in enumerate(coeffs):
        n = np.arange(row_start, row_end + 1)
        k = n + lo + j
        keep = (k >= ell) & (k <= N)
        rows.append(n[keep] - row_start)
        cols.append(k[keep] - ell)
        vals.append(np.full(int(keep.sum()), float(c)))
    S = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_rows, size),
    ).tocsr()
    A = (S.T @ S).tocsr()
    B = np.arange(ell, N + 1, dtype=float) ** (-2 * ell)

    logger.debug(f"Assembled Rellich form ell={ell}, N={N}: {size} unknowns, {n_rows} stencil rows")
    return BandedForm(N=N, ell=ell, S=S, A=A, B=B, row_start=row_start)


def form_vector(form: BandedForm, u: FiniteSequence) -> np.ndarray:
    """Values u_ℓ..u_N of an admissible sequence as the unknown vector"""
    support = u.support()
    if support is not None and (support[0] < form.ell or support[1] > form.N):
        raise BoundaryConditionError(
            f"Sequence supported on {support[0]}..{support[1]} does not fit unknowns {form.ell}..{form.N}"
        )
    return np.array([float(u(n)) for n in range(form.ell, form.N + 1)])


# ============================================================================
# RELLICH MARGIN
# ============================================================================

def rellich_lhs(ell: int, u: FiniteSequence) -> float:
    """Σ_{n≥ℓ-1} |Δ^{ℓ/2}u_n|²"""
    h = half_laplace_power(u, ell)
    if h.is_zero():
        return 0.0
    return float(weighted_sum(h, h, lo=ell - 1, hi=h.end))


def rellich_mass(ell: int, u: FiniteSequence, lo: int = None) -> float:
    """Σ_{n≥lo} u_n² / n^{2ℓ} (lo defaults to ℓ)"""
    lo = ell if lo is None else lo
    if u.is_zero() or u.end < lo:
        return 0.0
    power = 2 * ell
    return float(weighted_sum(u, u, lambda n: 1.0 / n ** power, lo=max(lo, 1), hi=u.end))


def rellich_form_margin(ell: int, u: FiniteSequence) -> RellichMargin:
    """
    Σ_{n≥ℓ-1}|Δ^{ℓ/2}u_n|² - C_ℓ Σ_{n≥ℓ} u_n²/n^{2ℓ}

    Raises:
        BoundaryConditionError: u_k ≠ 0 for some k ≤ ℓ-1
    """
    if not u.vanishes_below(ell):
        raise BoundaryConditionError(f"Rellich order {ell} needs u_0..u_{ell - 1} = 0, support starts at {u.start}")
    lhs = rellich_lhs(ell, u)
    rhs = sharp_constant(ell) * rellich_mass(ell, u)
    return RellichMargin(f"rellich(ell={ell})", lhs, rhs)
