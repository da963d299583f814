"""
ℓ^p Hardy inequality on graphs and its randomized check
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from config import LP_CONFIG, TOLERANCES, max_threads
from seq_core import FiniteSequence, compensated_sum
from graph_core.graph import Graph, NonPositiveReferenceError, VertexFunction, path_graph, random_sparse_graph
from lp_hardy.landau import LandauReport, landau_check
from lp_hardy.operators import LpParams, _as_p, _picone_term, lp_grad_norm, lp_hardy_weight, signed_power

logger = logging.getLogger(__name__)


@dataclass
class LpForm:
    """Σ V|∇u|^p_p, Σ w_p u^p and the summed Picone remainder for one u ≥ 0"""
    energy: float
    weighted_mass: float
    remainder: float

    @property
    def margin(self) -> float:
        return self.energy - self.weighted_mass

    @property
    def scale(self) -> float:
        return abs(self.energy) + abs(self.weighted_mass) + 1.0

    @property
    def residual(self) -> float:
        return abs(self.margin - self.remainder)

    def to_dict(self) -> Dict[str, float]:
        return {
            'energy': self.energy,
            'weighted_mass': self.weighted_mass,
            'margin': self.margin,
            'remainder': self.remainder,
            'residual': self.residual,
        }


def lp_hardy_check(G: Graph, V: VertexFunction, f: VertexFunction, u: VertexFunction,
                   p: Union[float, LpParams]) -> LpForm:
    """
    Σ_x V(x)|∇u|^p_p(x) against Σ_x w_p(x) u(x)^p for nonnegative u

    The remainder is ½ Σ_{x,y} b^{p-1} V(x) times the Picone residual of the
    edge, which the margin equals up to rounding.

    Raises:
        ValueError: u takes a negative value
        NonPositiveReferenceError: f ≤ 0 on the support of u or f < 0 next to it
    """
    p = _as_p(p)
    negative = [x for x, v in u.values.items() if v < 0]
    if negative:
        raise ValueError(f"ℓ^p Hardy check needs u >= 0, got {u(negative[0])!r} at {negative[0]!r}")
    support = u.support()
    if not support:
        return LpForm(0.0, 0.0, 0.0)
    region = G.ball(support, 1)
    for x in region:
        if f(x) < 0:
            raise NonPositiveReferenceError(f"Reference function is {f(x)!r} at {x!r}")

    energy = compensated_sum([V(x) * lp_grad_norm(G, u, p, x) for x in region])
    weighted_mass = compensated_sum([lp_hardy_weight(G, V, f, p, x) * signed_power(u(x), p) for x in support])
    remainder_terms = []
    for x in region:
        for y, b in G.neighbors(x):
            remainder_terms.append(0.5 * b ** (p - 1.0) * V(x) * _picone_term(u(x), u(y), f(x), f(y), p))
    return LpForm(energy, weighted_mass, compensated_sum(remainder_terms))


# ============================================================================
# RANDOMIZED CHECK
# ============================================================================

def power_reference(G: Graph, p: float) -> VertexFunction:
    """f_n = n^{(p-1)/p} on a path window, f_0 = 0"""
    return VertexFunction({n: float(n) ** ((p - 1.0) / p) for n in G.vertices if n > 0})


def _path_trial(p: float, rng: np.random.Generator, length: int) -> LpForm:
    G = path_graph(length)
    V = VertexFunction.constant(G, 1.0)
    f = power_reference(G, p)
    top = int(rng.integers(1, length))
    u = VertexFunction({n: float(rng.uniform(0.0, 1.0)) for n in range(1, top + 1)})
    return lp_hardy_check(G, V, f, u, p)


def _graph_trial(p: float, rng: np.random.Generator, size: int, seed: int) -> LpForm:
    G = random_sparse_graph(size, seed=seed)
    V = VertexFunction({x: float(rng.uniform(0.5, 2.0)) for x in G.vertices})
    f = VertexFunction({x: float(rng.uniform(0.1, 1.0)) for x in G.vertices})
    u = VertexFunction({x: float(rng.uniform(0.0, 1.0)) for x in G.vertices if rng.random() < 0.5})
    return lp_hardy_check(G, V, f, u, p)


def _landau_trial(p: float, rng: np.random.Generator, length: int) -> LandauReport:
    values = rng.uniform(0.0, 1.0, size=int(rng.integers(1, length + 1)))
    return landau_check(FiniteSequence.from_values(values.tolist(), offset=1), p)


@dataclass
class LpReport:
    p: float
    trials: int
    seed: int
    path_forms: List[LpForm]
    graph_forms: List[LpForm]
    landau: List[LandauReport]
    notes: List[str] = field(default_factory=list)

    @property
    def min_margin(self) -> float:
        return min((fm.margin for fm in self.path_forms + self.graph_forms), default=0.0)

    @property
    def max_identity_residual(self) -> float:
        return max((fm.residual / fm.scale for fm in self.path_forms + self.graph_forms), default=0.0)

    def violations(self, tol: Optional[float] = None) -> List[Dict[str, Any]]:
        tol = TOLERANCES['nonnegativity'] if tol is None else tol
        found = []
        for kind, forms in (('path', self.path_forms), ('graph', self.graph_forms)):
            for i, fm in enumerate(forms):
                if fm.margin < -tol * fm.scale:
                    found.append({'kind': kind, 'trial': i, 'seed': self.seed + i, **fm.to_dict()})
        for i, rep in enumerate(self.landau):
            if not rep.holds(tol):
                found.append({'kind': 'landau', 'trial': i, 'seed': self.seed + i, **rep.to_dict()})
        return found

    @property
    def holds(self) -> bool:
        return not self.violations()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': {'p': self.p, 'trials': self.trials, 'seed': self.seed},
            'min_margin': self.min_margin,
            'max_identity_residual': self.max_identity_residual,
            'min_landau_margin': min((r.margin for r in self.landau), default=0.0),
            'min_landau_certified_margin': min((r.certified_margin for r in self.landau), default=0.0),
            'notes': self.notes,
            'holds': self.holds,
        }


def lp_trials(p: Union[float, LpParams], trials: Optional[int] = None, seed: int = 0) -> LpReport:
    """
    Trial i (seed + i) checks the ℓ^p Hardy inequality on a path window with
    f_n = n^{(p-1)/p}, on a random sparse graph with random positive f, and
    Landau's inequality on a random nonnegative sequence
    """
    p = _as_p(p)
    trials = LP_CONFIG['default_trials'] if trials is None else trials
    if trials < 0:
        raise ValueError(f"Number of trials must be nonnegative, got {trials}")
    logger.info(f"ℓ^p check p={p}: {trials} trials from seed {seed}")

    def one(i: int) -> Tuple[LpForm, LpForm, LandauReport]:
        rng = np.random.default_rng(seed + i)
        return (
            _path_trial(p, rng, LP_CONFIG['path_length']),
            _graph_trial(p, rng, LP_CONFIG['graph_size'], seed + i),
            _landau_trial(p, rng, LP_CONFIG['landau_length']),
        )

    workers = max(1, min(max_threads(), trials))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(one, range(trials)))

    report = LpReport(
        p=p,
        trials=trials,
        seed=seed,
        path_forms=[r[0] for r in results],
        graph_forms=[r[1] for r in results],
        landau=[r[2] for r in results],
        notes=["The weight is paired with u^p and checked for nonnegative u only."],
    )
    for v in report.violations():
        logger.warning(f"ℓ^p inequality violated ({v['kind']} trial {v['trial']}): margin {v['margin']:.3e}")
    return report
