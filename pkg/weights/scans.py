"""
Grid scans for the pointwise claims about the scalar functions
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from config import SCAN_CONFIG, TOLERANCES
from weights.scalar import ScalarFunctionId, scalar_eval

logger = logging.getLogger(__name__)

Bound = Callable[[Optional[float], np.ndarray], np.ndarray]

# name -> (bound(α, x), sense, strict)
DEFAULT_BOUNDS: Dict[str, Tuple[Bound, str, bool]] = {
    'H': (lambda a, x: (1 - a) ** 2 / 4 * x ** 2, 'lower', True),
    'G': (lambda a, x: (a - 1) ** 2 / 4 * x ** 2, 'lower', False),
    'F': (lambda a, x: (a - 1) ** 2 / 4 * (x - 1) ** 2, 'lower', False),
    'Q': (lambda a, x: (x - 1) ** 2 / 2, 'lower', True),
    'G_cubic': (lambda a, x: np.zeros_like(x), 'upper', True),
    'g': (lambda a, x: np.zeros_like(x), 'lower', True),
}

# α ranges for the x-functions: (low, high, include low, include high)
DEFAULT_ALPHA_RANGES: Dict[str, Tuple[float, float, bool, bool]] = {
    'H': (-3.0, 0.0, True, False),
    'G': (0.0, 1.0, True, True),
    'F': (1.0, 3.0, False, True),
}


@dataclass
class ScanReport:
    """Worst margin found on a grid"""
    name: str
    sense: str
    strict: bool
    n_points: int
    min_margin: float
    worst_alpha: Optional[float]
    worst_x: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'sense': self.sense,
            'strict': self.strict,
            'n_points': self.n_points,
            'min_margin': self.min_margin,
            'worst_alpha': self.worst_alpha,
            'worst_x': self.worst_x,
            'passed': self.passed,
        }


def _interior_range(lo: float, hi: float, lo_closed: bool, hi_closed: bool, step: float) -> np.ndarray:
    count = int(round((hi - lo) / step))
    grid = lo + step * np.arange(count + 1)
    grid[-1] = hi
    if not lo_closed:
        grid = grid[1:]
    if not hi_closed:
        grid = grid[:-1]
    return grid


def default_grid(name: str, points: Optional[int] = None, open_ends: bool = False) -> np.ndarray:
    """`points` equally spaced arguments across the declared interval of `name`"""
    points = points or SCAN_CONFIG['grid_points']
    lo, hi, lo_closed, hi_closed = ScalarFunctionId(name, alpha=0.0).interval()
    if name in ('g', 'G_cubic', 'Q'):
        return _interior_range(lo, hi, False, False, SCAN_CONFIG['alpha_step'])
    grid = np.linspace(lo, hi, points + 2)
    keep_lo = lo_closed and not open_ends
    keep_hi = hi_closed and not open_ends
    return grid[(0 if keep_lo else 1):(len(grid) if keep_hi else len(grid) - 1)]


def default_alphas(name: str, step: Optional[float] = None) -> np.ndarray:
    if name not in DEFAULT_ALPHA_RANGES:
        raise ValueError(f"No default alpha range for {name}")
    lo, hi, lo_closed, hi_closed = DEFAULT_ALPHA_RANGES[name]
    return _interior_range(lo, hi, lo_closed, hi_closed, step or SCAN_CONFIG['alpha_step'])


def lower_bound_scan(
    name: str,
    alphas: Optional[Sequence[float]] = None,
    grid: Optional[Sequence[float]] = None,
    bound: Optional[Bound] = None,
    sense: Optional[str] = None,
    strict: Optional[bool] = None,
    threshold: float = 0.0,
) -> ScanReport:
    """
    Scan value - bound (sense 'lower') or bound - value (sense 'upper')

    Args:
        name: Scalar function name
        alphas: Parameter values for the functions of (α, x); ignored for g, G_cubic, Q
        grid: Arguments (default: the declared interval, open where the claim is strict)
        bound: Callback bound(α, x) vectorized over x
        sense: 'lower' or 'upper'
        strict: Pass needs margin > threshold (else margin ≥ -nonnegativity tolerance)
        threshold: Strictness threshold

    Returns:
        ScanReport
    """
    default = DEFAULT_BOUNDS.get(name)
    if bound is None:
        if default is None:
            raise ValueError(f"No default bound for {name}; pass a bound callback")
        bound = default[0]
    sense = sense or (default[1] if default else 'lower')
    if sense not in ('lower', 'upper'):
        raise ValueError(f"Unknown scan sense: {sense}")
    strict = strict if strict is not None else (default[2] if default else True)

    x = np.asarray(default_grid(name, open_ends=strict) if grid is None else grid, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Scan grid must be finite")

    alpha_free = name in ('g', 'G_cubic', 'Q', 'Y')
    alpha_list = [None] if alpha_free else list(default_alphas(name) if alphas is None else alphas)

    worst = (np.inf, None, float('nan'))
    for a in alpha_list:
        values = np.asarray(scalar_eval(ScalarFunctionId(name, a), x), dtype=float)
        b = np.asarray(bound(a, x), dtype=float)
        margin = values - b if sense == 'lower' else b - values
        i = int(np.argmin(margin))
        if margin[i] < worst[0]:
            worst = (float(margin[i]), a, float(x[i]))

    min_margin = worst[0]
    if strict:
        passed = min_margin > threshold
    else:
        passed = min_margin >= -TOLERANCES['nonnegativity']
    report = ScanReport(
        name=name, sense=sense, strict=strict, n_points=len(x) * len(alpha_list),
        min_margin=min_margin, worst_alpha=worst[1], worst_x=worst[2], passed=passed,
    )
    logger.info(f"Scan {name}: min margin {min_margin:.3e} at alpha={worst[1]}, x={worst[2]:.6g}, passed={passed}")
    return report


@dataclass
class MonotoneReport:
    name: str
    decreasing: bool
    n_points: int
    worst_step: float
    worst_at: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'decreasing': self.decreasing, 'n_points': self.n_points,
                'worst_step': self.worst_step, 'worst_at': self.worst_at, 'passed': self.passed}


def monotone_scan(name: str, grid: Optional[Sequence[float]] = None, decreasing: bool = True,
                  alpha: Optional[float] = None) -> MonotoneReport:
    """Check strict monotonicity of a scalar function along a sorted grid"""
    x = np.sort(np.asarray(default_grid(name) if grid is None else grid, dtype=float))
    values = np.asarray(scalar_eval(ScalarFunctionId(name, alpha), x), dtype=float)
    steps = np.diff(values)
    signed = -steps if decreasing else steps
    i = int(np.argmin(signed))
    report = MonotoneReport(name=name, decreasing=decreasing, n_points=len(x),
                            worst_step=float(signed[i]), worst_at=float(x[i]),
                            passed=bool(signed[i] > 0))
    logger.info(f"Monotone scan {name}: worst step {report.worst_step:.3e}, passed={report.passed}")
    return report
