"""
Landau's ℓ^p Hardy inequality on ℕ

((p-1)/p)^p Σ_{n≥1} ((a_1 + ... + a_n)/n)^p ≤ Σ a_n^p for a ≥ 0
"""
import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from config import LP_CONFIG, TOLERANCES
from seq_core import FiniteSequence
from lp_hardy.operators import LpParams, _as_p

logger = logging.getLogger(__name__)


@dataclass
class LandauReport:
    """Both sides of Landau's inequality with the analytic tail of the truncated sum"""
    p: float
    lhs: float
    rhs: float
    last_index: int
    tail_bound: float

    @property
    def constant(self) -> float:
        return ((self.p - 1.0) / self.p) ** self.p

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def certified_margin(self) -> float:
        """Margin after charging the whole neglected tail to the left side"""
        return self.margin - self.constant * self.tail_bound

    @property
    def scale(self) -> float:
        return abs(self.lhs) + abs(self.rhs) + 1.0

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        return self.margin >= -tol * self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'margin': self.margin,
            'last_index': self.last_index,
            'tail_bound': self.tail_bound,
            'certified_margin': self.certified_margin,
        }


def landau_check(a: FiniteSequence, p: Union[float, LpParams],
                 tail_terms: Optional[int] = None) -> LandauReport:
    """
    Evaluate Landau's inequality for a nonnegative sequence supported in n ≥ 1

    Past the support the prefix sum is the constant S = Σ a_n, so the left
    side is summed up to the support end plus `tail_terms` indices K and the
    rest is bounded by S^p K^{1-p}/(p-1).

    Raises:
        ValueError: a negative entry, an entry at n ≤ 0, or p ≤ 1
    """
    p = _as_p(p)
    tail_terms = LP_CONFIG['landau_tail_terms'] if tail_terms is None else int(tail_terms)
    if tail_terms < 0:
        raise ValueError(f"Number of tail terms must be nonnegative, got {tail_terms}")
    if not a.vanishes_below(1):
        raise ValueError(f"Landau sequence must be supported in n >= 1, starts at {a.start}")
    if any(v < 0 for v in a.values):
        raise ValueError(f"Landau sequence must be nonnegative, got min entry {min(a.values)}")

    if a.is_zero():
        return LandauReport(p=p, lhs=0.0, rhs=0.0, last_index=0, tail_bound=0.0)

    N = a.end
    entries = np.array([float(a(n)) for n in range(1, N + 1)])
    prefix = np.cumsum(entries)
    total = math.fsum(entries)
    n = np.arange(1, N + 1, dtype=float)
    body = math.fsum((prefix / n) ** p)
    tail_n = np.arange(N + 1, N + tail_terms + 1, dtype=float)
    tail = total ** p * math.fsum(tail_n ** -p) if tail_terms else 0.0
    last = N + tail_terms

    constant = ((p - 1.0) / p) ** p
    report = LandauReport(
        p=p,
        lhs=constant * math.fsum([body, tail]),
        rhs=math.fsum(entries ** p),
        last_index=last,
        tail_bound=total ** p * float(last) ** (1.0 - p) / (p - 1.0),
    )
    if not report.holds():
        logger.warning(f"Landau inequality violated at p={p}: margin {report.margin:.3e}")
    return report
