"""
ℓ^p calculus on weighted graphs
p-gradient norm, Picone residual and the ℓ^p Hardy weight -div[V(∇f)_b^{p-1}]/f^{p-1}
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from seq_core import compensated_dot
from graph_core.graph import EdgeFunction, Graph, NonPositiveReferenceError, Vertex, VertexFunction
from graph_core.operators import edge_divergence

logger = logging.getLogger(__name__)

Number = Union[float, np.ndarray]


@dataclass(frozen=True)
class LpParams:
    """Exponent p > 1 of the ℓ^p setting"""
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p <= 1:
            raise ValueError(f"Exponent p must be > 1, got {self.p}")
        object.__setattr__(self, 'p', p)

    @property
    def conjugate_constant(self) -> float:
        """((p - 1)/p)^p"""
        return ((self.p - 1.0) / self.p) ** self.p


def _as_p(p: Union[float, LpParams]) -> float:
    return p.p if isinstance(p, LpParams) else LpParams(p).p


def signed_power(t: Number, beta: float) -> Number:
    """t^β := |t|^{β-1} t, the odd extension of the power function"""
    if beta <= 0:
        raise ValueError(f"Signed power needs beta > 0, got {beta}")
    if isinstance(t, np.ndarray):
        return np.sign(t) * np.abs(t) ** beta
    t = float(t)
    if t == 0:
        return 0.0
    return abs(t) ** beta if t > 0 else -(abs(t) ** beta)


def lp_grad_norm(G: Graph, u: VertexFunction, p: Union[float, LpParams], x: Vertex) -> float:
    """|∇u|^p_p(x) = ½ Σ_{y∼x} b(x,y)^{p-1} |u(x) - u(y)|^p"""
    p = _as_p(p)
    nbrs = G.neighbors(x)
    ux = u(x)
    return 0.5 * compensated_dot([b ** (p - 1.0) for _y, b in nbrs],
                                 [abs(ux - u(y)) ** p for y, _b in nbrs])


def _quotient(u: float, f: float, p: float) -> float:
    """u^p / f^{p-1}, taken as 0 where u vanishes"""
    if u == 0:
        return 0.0
    return signed_power(u, p) / f ** (p - 1.0)


def _picone_term(ux: float, uy: float, fx: float, fy: float, p: float) -> float:
    df = fx - fy
    return abs(ux - uy) ** p - (_quotient(ux, fx, p) - _quotient(uy, fy, p)) * signed_power(df, p - 1.0)


def picone_residual(G: Graph, u: VertexFunction, f: VertexFunction,
                    p: Union[float, LpParams], x: Vertex, y: Vertex) -> float:
    """
    |∇u(x,y)|^p - ∇(u^p/f^{p-1})(x,y) (∇f)^{p-1}(x,y) on the edge (x, y)

    Nonnegative for u ≥ 0 and zero when u is a multiple of f.

    Raises:
        NonPositiveReferenceError: f(x) ≤ 0 or f(y) ≤ 0
        ValueError: x and y are not adjacent
    """
    p = _as_p(p)
    if G.weight(x, y) == 0:
        raise ValueError(f"Vertices {x!r} and {y!r} are not adjacent")
    fx, fy = f(x), f(y)
    for at, value in ((x, fx), (y, fy)):
        if value <= 0:
            raise NonPositiveReferenceError(f"Reference function is {value!r} at {at!r}")
    return _picone_term(u(x), u(y), fx, fy, p)


def lp_gradient_power(G: Graph, f: VertexFunction, p: Union[float, LpParams], vertices=None) -> EdgeFunction:
    """(∇f)_b^{p-1}(x, y) = b(x,y)^{p-2} (f(x) - f(y))^{p-1}"""
    p = _as_p(p)
    return EdgeFunction.from_callable(
        G, lambda x, y: G.weight(x, y) ** (p - 2.0) * signed_power(f(x) - f(y), p - 1.0), vertices)


def lp_hardy_weight(G: Graph, V: VertexFunction, f: VertexFunction,
                    p: Union[float, LpParams], x: Vertex) -> float:
    """
    w_p(x) = -div[V (∇f)_b^{p-1}](x) / f(x)^{p-1}

    At p = 2 this is the ground state weight -div(V∇f)/f.

    Raises:
        NonPositiveReferenceError: f(x) ≤ 0
    """
    p = _as_p(p)
    fx = f(x)
    if fx <= 0:
        raise NonPositiveReferenceError(f"Reference function is {fx!r} at {x!r}")
    local = [x] + [y for y, _b in G.neighbors(x)]
    flux = lp_gradient_power(G, f, p, local)
    weighted = EdgeFunction({(a, c): V(a) * v for (a, c), v in flux.values.items()})
    return -edge_divergence(G, weighted, x) / fx ** (p - 1.0)
