"""
Weighted Hardy inequality on ℤ^d: random trials on a box
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from config import LATTICE_CONFIG, TOLERANCES, max_threads
from lattice_zd.box import BoxDomain, LatticeForm, LatticeFunction, lattice_form
from lattice_zd.weights import leading_ratio_table, zd_coefficients, zd_weight_field

logger = logging.getLogger(__name__)


@dataclass
class ZdReport:
    """Trial margins of Σ|x|^α|∇u|² - Σ w u² and the leading-ratio table"""
    alpha: float
    d: int
    R: int
    trials: int
    seed: int
    forms: List[LatticeForm]
    leading_table: pd.DataFrame
    subleading_bound: float

    @property
    def min_margin(self) -> float:
        return min((fm.margin for fm in self.forms), default=0.0)

    @property
    def max_identity_residual(self) -> float:
        return max((fm.residual / fm.scale for fm in self.forms), default=0.0)

    def violations(self, tol: Optional[float] = None) -> List[Dict[str, Any]]:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        return [
            {'trial': i, 'seed': self.seed + i, **fm.to_dict()}
            for i, fm in enumerate(self.forms)
            if fm.margin < -tol * fm.scale
        ]

    @property
    def holds(self) -> bool:
        return not self.violations()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': {'alpha': self.alpha, 'd': self.d, 'R': self.R, 'trials': self.trials, 'seed': self.seed},
            'min_margin': self.min_margin,
            'max_identity_residual': self.max_identity_residual,
            'subleading_bound': self.subleading_bound,
            'leading_ratio_table': self.leading_table.to_dict(orient='records'),
            'holds': self.holds,
        }


def zd_form_margin(alpha: float, u: LatticeFunction) -> LatticeForm:
    """Both sides of the weighted Hardy inequality for one test function"""
    V, f, w = zd_weight_field(alpha, u.domain)
    return lattice_form(u, V, f, w)


def zd_inequality_check(alpha: float, d: int, R: int, trials: int, seed: int = 0) -> ZdReport:
    """
    Σ_x |x|^α|∇u|²(x) - Σ_x w(x)u(x)² on `trials` random u supported in the box
    minus the origin; trial i draws from seed + i

    Raises:
        ValueError: R below LATTICE_CONFIG['min_check_radius'] or α ≤ 2 - d
    """
    if R < LATTICE_CONFIG['min_check_radius']:
        raise ValueError(f"Inequality check needs R >= {LATTICE_CONFIG['min_check_radius']}, got {R}")
    if trials < 0:
        raise ValueError(f"Number of trials must be nonnegative, got {trials}")
    coeffs = zd_coefficients(alpha, d)
    domain = BoxDomain(d, R)
    V, f, w = zd_weight_field(alpha, domain)
    logger.info(f"Lattice check alpha={alpha}, d={d}, R={R}: {domain.side ** d} points, {trials} trials")

    def one(i: int) -> LatticeForm:
        u = LatticeFunction.random(domain, np.random.default_rng(seed + i))
        return lattice_form(u, V, f, w)

    workers = max(1, min(max_threads(), trials))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        forms = list(executor.map(one, range(trials)))

    report = ZdReport(
        alpha=alpha,
        d=d,
        R=R,
        trials=trials,
        seed=seed,
        forms=forms,
        leading_table=leading_ratio_table(alpha, d),
        subleading_bound=coeffs.subleading_bound,
    )
    for v in report.violations():
        logger.warning(f"Lattice inequality violated in trial {v['trial']}: margin {v['margin']:.3e}")
    return report
