"""
Quadratic form margins on ℕ for the weight families
"""
import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from config import TOLERANCES
from seq_core import FiniteSequence, compensated_sum, grad, laplace, weighted_sum
from weights.models import WeightModel

logger = logging.getLogger(__name__)


@dataclass
class FormMargin:
    """Σ V|∇u|² - Σ w u² next to its ground state remainder"""
    family: str
    energy: float
    weighted_mass: float
    remainder: float
    bound_mass: float

    @property
    def margin(self) -> float:
        return self.energy - self.weighted_mass

    @property
    def bound_margin(self) -> float:
        return self.energy - self.bound_mass

    @property
    def scale(self) -> float:
        return abs(self.energy) + abs(self.weighted_mass) + 1.0

    @property
    def residual(self) -> float:
        return abs(self.margin - self.remainder)

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        return self.margin >= -tol * self.scale and self.bound_margin >= -tol * self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family,
            'energy': self.energy,
            'weighted_mass': self.weighted_mass,
            'margin': self.margin,
            'remainder': self.remainder,
            'residual': self.residual,
            'bound_margin': self.bound_margin,
            'holds': self.holds(),
        }


@dataclass
class RellichMargin:
    """Σ |Δu|² - Σ W u² for a second order weight"""
    family: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def scale(self) -> float:
        return abs(self.lhs) + abs(self.rhs) + 1.0

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        return self.margin >= -tol * self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family, 'lhs': self.lhs, 'rhs': self.rhs,
                'margin': self.margin, 'holds': self.holds()}


def _check_admissible(model: WeightModel, u: FiniteSequence) -> None:
    if not u.vanishes_below(model.boundary_zeros):
        raise ValueError(
            f"{model.label()} needs u_0..u_{model.boundary_zeros - 1} = 0, "
            f"got support starting at {u.start}"
        )


def hardy_form_margin(model: WeightModel, u: FiniteSequence) -> FormMargin:
    """
    Evaluate both sides of the ground state identity

        Σ_{n≥1} V_n|∇u_n|² - Σ w_n u_n² = Σ_{n≥2} V_n (√(f_{n-1}/f_n) u_n - √(f_n/f_{n-1}) u_{n-1})²

    Args:
        model: A family with a ground state pair (kpp, shifted_hardy, direct_hardy, leray)
        u: Admissible test sequence

    Returns:
        FormMargin
    """
    _check_admissible(model, u)
    V, f = model.ground_state()
    label = model.label()
    if u.is_zero():
        return FormMargin(label, 0.0, 0.0, 0.0, 0.0)

    g = grad(u)
    energy = float(weighted_sum(g, g, V, lo=1, hi=g.end))
    lo = max(model.n_min, u.start)
    weighted_mass = float(weighted_sum(u, u, model.direct, lo=lo, hi=u.end))
    bound_mass = float(weighted_sum(u, u, model.bound, lo=lo, hi=u.end))

    terms = []
    for n in range(max(2, u.start), u.end + 2):
        un, um = u(n), u(n - 1)
        if un == 0 and um == 0:
            continue
        fn, fm = f(n), f(n - 1)
        diff = math.sqrt(fm / fn) * un - math.sqrt(fn / fm) * um
        terms.append(V(n) * diff * diff)
    remainder = float(compensated_sum(terms)) if terms else 0.0

    result = FormMargin(label, energy, weighted_mass, remainder, bound_mass)
    logger.debug(f"{label}: margin {result.margin:.6e}, remainder {remainder:.6e}")
    return result


def second_order_margin(model: WeightModel, u: FiniteSequence) -> RellichMargin:
    """Σ_{n≥1}|Δu_n|² - Σ_{n≥2} W_n u_n² with u_0 = u_1 = 0"""
    if model.family not in ('improved_rellich2', 'gks_reference'):
        raise ValueError(f"{model.label()} is not a second order weight")
    _check_admissible(model, u)
    if u.is_zero():
        return RellichMargin(model.label(), 0.0, 0.0)
    lap = laplace(u)
    lhs = float(weighted_sum(lap, lap, lo=1, hi=lap.end))
    rhs = float(weighted_sum(u, u, model, lo=max(2, u.start), hi=u.end))
    return RellichMargin(model.label(), lhs, rhs)


def improved_rellich2_margin(u: FiniteSequence, terms: Optional[int] = None) -> RellichMargin:
    params = {} if terms is None else {'terms': terms}
    return second_order_margin(WeightModel('improved_rellich2', params), u)
