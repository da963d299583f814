"""
Weighted Hardy-Rellich identities on graphs
Both sides of each identity evaluated as written, with hypothesis checks
"""
import re
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

from config import TOLERANCES
from seq_core.summation import compensated_sum
from graph_core.graph import (
    Graph,
    HypothesisViolation,
    NonPositiveReferenceError,
    Vertex,
    VertexFunction,
)
from graph_core.operators import (
    apply_laplacian,
    f_functional,
    grad_norm_sq,
    grad_pairing,
    graph_laplacian,
    laplacian_powers,
    t_functional,
    t_functional_all,
    weighted_energy,
)

logger = logging.getLogger(__name__)

IDENTITY_KINDS = ('first_order', 'second_order', 'iterated', 'odd_order')
_PATTERN = re.compile(r'^\s*(first_order|second_order|iterated|odd_order)\s*(?:\(\s*(\d+)\s*\))?\s*$')


@dataclass
class IdentityReport:
    """Both sides of one identity evaluation"""
    which: str
    m: int
    lhs: float
    rhs: float
    residual: float
    bound: float
    terms: Dict[str, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.residual <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            'which': self.which,
            'm': self.m,
            'lhs': float(self.lhs),
            'rhs': float(self.rhs),
            'residual': float(self.residual),
            'bound': float(self.bound),
            'holds': self.holds,
            'terms': {k: float(v) for k, v in self.terms.items()},
        }


def parse_identity(which: str, m: Optional[int] = None) -> Tuple[str, int]:
    """
    Resolve an identity id such as 'first_order', 'iterated(2)' or 'odd_order'
    (with m passed separately)
    """
    match = _PATTERN.match(str(which))
    if not match:
        raise ValueError(f"Unknown identity: {which}")
    kind, order = match.group(1), match.group(2)
    if order is not None:
        if m is not None and int(order) != m:
            raise ValueError(f"Conflicting orders for {which}: {m}")
        m = int(order)
    if kind in ('iterated', 'odd_order'):
        if m is None or m < 1:
            raise ValueError(f"Identity {kind} needs an order m >= 1, got {m}")
    elif kind == 'second_order':
        m = 1
    else:
        m = 0 if m is None else m
    return kind, m


# ============================================================================
# HYPOTHESES
# ============================================================================

def _scale(values: Iterable[float]) -> float:
    return max((abs(v) for v in values), default=0.0) or 1.0


def check_positivity(
    G: Graph,
    powers: List[VertexFunction],
    support: Set[Vertex],
    strict_radius: List[int],
    weak_radius: Optional[List[int]] = None,
) -> None:
    """
    Check Δ^k f > tol·scale on ball(supp u, strict_radius[k]) and, where
    given, Δ^k f ≥ 0 on ball(supp u, weak_radius[k]).

    Raises:
        HypothesisViolation: first offending vertex (in graph order) and k
    """
    tol = TOLERANCES['hypothesis_strict']
    for k, radius in enumerate(strict_radius):
        region = G.ball(support, radius)
        h = powers[k]
        scale = _scale(h(x) for x in region)
        for x in G.vertices:
            if x in region and not h(x) > tol * scale:
                raise HypothesisViolation(x, k, h(x))
        if weak_radius is not None and weak_radius[k] > radius:
            outer = G.ball(support, weak_radius[k])
            for x in G.vertices:
                if x in outer and h(x) < 0:
                    raise HypothesisViolation(x, k, h(x))


# ============================================================================
# IDENTITIES
# ============================================================================

def _first_order(G: Graph, V: VertexFunction, f: VertexFunction, u: VertexFunction) -> Tuple[float, float, Dict[str, float]]:
    support = u.support()
    check_positivity(G, [f], support, [0], [1])
    lhs = weighted_energy(G, V, u)
    weight_mass = compensated_sum([t_functional(G, V, f, x) / f(x) * u(x) ** 2 for x in support])
    remainder = f_functional(G, V, f, u)
    return lhs, compensated_sum([weight_mass, remainder]), {'weight_mass': weight_mass, 'F': remainder}


def _second_order(G: Graph, V: VertexFunction, f: VertexFunction, u: VertexFunction) -> Tuple[float, float, Dict[str, float]]:
    """Σ V|Δu|² = Σ Δ(VΔf)/f u² + 2F(V L(f), f, u) + Σ V|Δu - L(f)u|²"""
    support = u.support()
    check_positivity(G, [f], support, [1])
    region = G.ball(support, 1)
    lap_u = apply_laplacian(G, u, region)
    lap_f = apply_laplacian(G, f, G.ball(support, 2))
    v_lap_f = VertexFunction({x: V(x) * lap_f(x) for x in lap_f.values})

    lhs = compensated_sum([V(x) * lap_u(x) ** 2 for x in region])
    weight_mass = compensated_sum([graph_laplacian(G, v_lap_f, x) / f(x) * u(x) ** 2 for x in support])
    VL = VertexFunction({x: V(x) * lap_f(x) / f(x) for x in region})
    remainder = f_functional(G, VL, f, u)
    square = compensated_sum([V(x) * (lap_u(x) - lap_f(x) / f(x) * u(x)) ** 2 for x in region])
    rhs = compensated_sum([weight_mass, 2.0 * remainder, square])
    return lhs, rhs, {'weight_mass': weight_mass, 'F': remainder, 'square': square}


def _telescoped_terms(
    G: Graph,
    f_powers: List[VertexFunction],
    u_powers: List[VertexFunction],
    W: List[VertexFunction],
    m: int,
    support: Set[Vertex],
) -> Tuple[float, float]:
    """
    Σ_k Σ_x W_{m-1-k}/Δ^{k+1}f |Δ^{k+1}u - L(Δ^k f)Δ^k u|² and
    Σ_k F(W_{m-1-k}/Δ^k f, Δ^k f, Δ^k u) for k = 0..m-1
    """
    squares, remainders = [], []
    for k in range(m):
        region = G.ball(support, k + 1)
        hk, hk1 = f_powers[k], f_powers[k + 1]
        w = W[m - 1 - k]
        for x in region:
            diff = u_powers[k + 1](x) - hk1(x) / hk(x) * u_powers[k](x)
            if diff != 0:
                squares.append(w(x) / hk1(x) * diff * diff)
        coeff = VertexFunction({x: w(x) / hk(x) for x in region})
        remainders.append(f_functional(G, coeff, hk, u_powers[k]))
    return compensated_sum(squares), compensated_sum(remainders)


def _iterated(G: Graph, V: VertexFunction, f: VertexFunction, u: VertexFunction, m: int,
              odd: bool) -> Tuple[float, float, Dict[str, float]]:
    support = u.support()
    f_powers = laplacian_powers(G, f, m + (1 if odd else 0))
    strict = [j + 1 for j in range(m)] + [m]
    weak = [j + 1 for j in range(m + 1)] if odd else None
    check_positivity(G, f_powers[:m + 1], support, strict, weak)

    u_powers = [VertexFunction({x: u(x) for x in G.vertices})]
    for _ in range(m):
        u_powers.append(apply_laplacian(G, u_powers[-1]))

    top = f_powers[m]
    if odd:
        W0 = t_functional_all(G, V, top)
    else:
        W0 = VertexFunction({x: V(x) * top(x) for x in G.vertices})
    W = [W0]
    for _ in range(m):
        W.append(apply_laplacian(G, W[-1]))

    um = u_powers[m]
    reach = G.ball(support, m + 1)
    if odd:
        energy = compensated_sum([V(x) * grad_norm_sq(G, um, x) for x in reach])
    else:
        energy = compensated_sum([V(x) * um(x) ** 2 for x in reach])
    weight_mass = compensated_sum([W[m](x) / f(x) * u(x) ** 2 for x in support])
    lhs = compensated_sum([energy, -weight_mass])

    squares, remainders = _telescoped_terms(G, f_powers, u_powers, W, m, support)
    parts = [squares, 2.0 * remainders]
    terms = {'energy': energy, 'weight_mass': weight_mass, 'squares': squares, 'F': remainders}
    if odd:
        top_remainder = f_functional(G, V, top, um)
        parts.append(top_remainder)
        terms['F_top'] = top_remainder
    return lhs, compensated_sum(parts), terms


def identity_report(
    G: Graph,
    V: VertexFunction,
    f: VertexFunction,
    u: VertexFunction,
    which: str,
    m: Optional[int] = None,
) -> IdentityReport:
    """
    Evaluate both sides of a Hardy-Rellich equality

    Args:
        G: Graph
        V: Vertex weight
        f: Reference function (positivity hypotheses checked near supp u)
        u: Finitely supported test function
        which: first_order | second_order | iterated(m) | odd_order(m)
        m: Order when not embedded in `which`

    Returns:
        IdentityReport with lhs, rhs and |lhs - rhs|

    Raises:
        HypothesisViolation: positivity fails in stencil reach of supp u
        ValueError: unknown identity id
    """
    kind, order = parse_identity(which, m)
    if not u.support():
        return IdentityReport(kind, order, 0.0, 0.0, 0.0, TOLERANCES['identity'])

    if kind == 'first_order':
        lhs, rhs, terms = _first_order(G, V, f, u)
    elif kind == 'second_order':
        lhs, rhs, terms = _second_order(G, V, f, u)
    elif kind == 'iterated':
        lhs, rhs, terms = _iterated(G, V, f, u, order, odd=False)
    else:
        lhs, rhs, terms = _iterated(G, V, f, u, order, odd=True)

    residual = abs(lhs - rhs)
    bound = TOLERANCES['identity'] * (abs(lhs) + abs(rhs) + 1.0)
    if residual > bound:
        logger.warning(f"Identity {kind}(m={order}) residual {residual:.3e} exceeds {bound:.3e}")
    return IdentityReport(kind, order, lhs, rhs, residual, bound, terms)


def identity_residual(
    G: Graph,
    V: VertexFunction,
    f: VertexFunction,
    u: VertexFunction,
    which: str,
    m: Optional[int] = None,
) -> float:
    """|LHS - RHS| of the selected identity"""
    return identity_report(G, V, f, u, which, m).residual


# ============================================================================
# GREEN / LEIBNIZ
# ============================================================================

def leibniz_green_residual(G: Graph, f: VertexFunction, g: VertexFunction) -> float:
    """
    Max of the relative Green residual |⟨Δf, g⟩ - ⟨∇f, ∇g⟩| and the pointwise
    Leibniz residual Δ(fg) - [fΔg + gΔf - 2⟨∇f, ∇g⟩]
    """
    support = g.support()
    if not support:
        return 0.0
    reach = G.ball(support, 1)
    a = compensated_sum([graph_laplacian(G, f, x) * g(x) for x in support])
    b = compensated_sum([grad_pairing(G, f, g, x) for x in reach])
    worst = abs(a - b) / (1.0 + abs(a) + abs(b))

    fg = VertexFunction({x: f(x) * g(x) for x in G.ball(support, 2)})
    for x in reach:
        left = graph_laplacian(G, fg, x)
        pieces = [f(x) * graph_laplacian(G, g, x), g(x) * graph_laplacian(G, f, x), -2.0 * grad_pairing(G, f, g, x)]
        right = compensated_sum(pieces)
        scale = 1.0 + abs(left) + sum(abs(p) for p in pieces)
        worst = max(worst, abs(left - right) / scale)
    return worst


# ============================================================================
# RELLICH-TYPE WEIGHTS
# ============================================================================

@dataclass
class RellichWeight:
    """Weight Δ^ℓ f / f with the hypothesis certificate on the queried region"""
    weight: VertexFunction
    ell: int
    hypotheses_hold: bool
    failures: List[Tuple[Any, int, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ell': self.ell,
            'hypotheses_hold': self.hypotheses_hold,
            'failures': [{'vertex': repr(x), 'k': k, 'value': float(v)} for x, k, v in self.failures],
            'weight': self.weight.to_dict(),
        }


def rellich_weight_from_f(
    G: Graph,
    f: VertexFunction,
    ell: int,
    region: Optional[Iterable[Vertex]] = None,
) -> RellichWeight:
    """
    x ↦ Δ^ℓ f(x) / f(x) on `region` (default: all vertices), certified by
    Δ^k f > 0 for k ≤ ⌊ℓ/2⌋ and Δ^i f ≥ 0 for ⌊ℓ/2⌋ < i ≤ ℓ

    Raises:
        NonPositiveReferenceError: f ≤ 0 at a queried vertex
    """
    if ell < 1:
        raise ValueError(f"Order must be >= 1, got {ell}")
    verts = list(G.vertices if region is None else region)
    for x in verts:
        if not f(x) > 0:
            raise NonPositiveReferenceError(f"Reference function is {f(x)!r} at {x!r}")
    powers = laplacian_powers(G, f, ell)
    weight = VertexFunction({x: powers[ell](x) / f(x) for x in verts})

    failures = []
    half = ell // 2
    for k in range(1, ell + 1):
        for x in verts:
            value = powers[k](x)
            if (k <= half and not value > 0) or (k > half and value < 0):
                failures.append((x, k, value))
    return RellichWeight(weight, ell, not failures, failures)


def iterated_weight(G: Graph, V: VertexFunction, f: VertexFunction, m: int,
                    region: Optional[Iterable[Vertex]] = None) -> VertexFunction:
    """x ↦ Δ^m(VΔ^m f)(x) / f(x)"""
    powers = laplacian_powers(G, f, m)
    W = VertexFunction({x: V(x) * powers[m](x) for x in G.vertices})
    for _ in range(m):
        W = apply_laplacian(G, W)
    verts = G.vertices if region is None else region
    return VertexFunction({x: W(x) / f(x) for x in verts if f(x) > 0})
