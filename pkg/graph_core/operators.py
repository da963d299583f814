"""
Graph operators: Laplacian, gradient pairing, edge divergence and the
T / F functionals of the weighted ground state transform
"""
import math
import logging
from typing import Iterable, List, Optional, Set

import numpy as np

from seq_core.summation import compensated_dot, compensated_sum
from graph_core.graph import (
    EdgeFunction,
    Graph,
    NonPositiveReferenceError,
    Vertex,
    VertexFunction,
)

logger = logging.getLogger(__name__)


def graph_laplacian(G: Graph, f: VertexFunction, x: Vertex) -> float:
    """Δf(x) = Σ_{y∼x} b(x,y)[f(x) - f(y)]"""
    nbrs = G.neighbors(x)
    fx = f(x)
    return compensated_dot([b for _y, b in nbrs], [fx - f(y) for y, _b in nbrs])


def grad_pairing(G: Graph, f: VertexFunction, g: VertexFunction, x: Vertex) -> float:
    """⟨∇f, ∇g⟩_x = ½ Σ_{y∼x} b(x,y)[f(x) - f(y)][g(x) - g(y)]"""
    nbrs = G.neighbors(x)
    fx, gx = f(x), g(x)
    return 0.5 * compensated_dot(
        [b * (fx - f(y)) for y, b in nbrs],
        [gx - g(y) for y, _b in nbrs],
    )


def grad_norm_sq(G: Graph, u: VertexFunction, x: Vertex) -> float:
    """|∇u|²(x)"""
    return grad_pairing(G, u, u, x)


def edge_divergence(G: Graph, F: EdgeFunction, x: Vertex) -> float:
    """div F(x) = ½ Σ_{y∼x} b(x,y)[F(y,x) - F(x,y)]"""
    nbrs = G.neighbors(x)
    return 0.5 * compensated_dot([b for _y, b in nbrs], [F(y, x) - F(x, y) for y, _b in nbrs])


def edge_pairing(G: Graph, F: EdgeFunction, H: EdgeFunction,
                 vertices: Optional[Iterable[Vertex]] = None) -> float:
    """⟨F, H⟩ = ½ Σ_{x,y} b(x,y) F(x,y) H(x,y)"""
    verts = G.vertices if vertices is None else vertices
    xs, ys = [], []
    for x in verts:
        for y, b in G.neighbors(x):
            xs.append(b * F(x, y))
            ys.append(H(x, y))
    return 0.5 * compensated_dot(xs, ys)


def t_functional(G: Graph, V: VertexFunction, f: VertexFunction, x: Vertex) -> float:
    """T(V, f)(x) = V(x)Δf(x) - ⟨∇f, ∇V⟩_x, which equals -div(V∇f)(x)"""
    return compensated_sum([V(x) * graph_laplacian(G, f, x), -grad_pairing(G, f, V, x)])


def apply_laplacian(G: Graph, f: VertexFunction, vertices: Optional[Iterable[Vertex]] = None) -> VertexFunction:
    verts = G.vertices if vertices is None else vertices
    return VertexFunction({x: graph_laplacian(G, f, x) for x in verts})


def laplacian_powers(G: Graph, f: VertexFunction, k_max: int) -> List[VertexFunction]:
    """[f, Δf, ..., Δ^{k_max} f] evaluated on every vertex of G"""
    powers = [VertexFunction({x: f(x) for x in G.vertices})]
    for _ in range(k_max):
        powers.append(apply_laplacian(G, powers[-1]))
    return powers


def t_functional_all(G: Graph, V: VertexFunction, f: VertexFunction) -> VertexFunction:
    return VertexFunction({x: t_functional(G, V, f, x) for x in G.vertices})


# ============================================================================
# GROUND STATE REMAINDER
# ============================================================================

def _ratio_term(h_num: float, h_den: float, g: float, at: Vertex) -> float:
    """√(h_num / h_den)·g with the convention that the term is 0 when g = 0"""
    if g == 0:
        return 0.0
    if h_den <= 0:
        raise NonPositiveReferenceError(f"Reference function is {h_den!r} at {at!r} where u is nonzero")
    if h_num < 0:
        raise NonPositiveReferenceError(f"Reference function is negative ({h_num!r}) next to the support")
    return math.sqrt(h_num / h_den) * g


def f_functional(G: Graph, V: VertexFunction, f: VertexFunction, u: VertexFunction) -> float:
    """
    F(V, f, u) = ½ Σ_{x,y} b(x,y) V(x) (√(f(x)/f(y)) u(y) - √(f(y)/f(x)) u(x))²

    f must be positive wherever u is nonzero and nonnegative on the
    neighbours of the support; only pairs touching supp(u) contribute.
    """
    support = u.support()
    if not support:
        return 0.0
    region: Set[Vertex] = G.ball(support, 1)
    terms = []
    for x in region:
        vx, fx, ux = V(x), f(x), u(x)
        if vx == 0:
            continue
        for y, b in G.neighbors(x):
            uy = u(y)
            if ux == 0 and uy == 0:
                continue
            fy = f(y)
            diff = _ratio_term(fx, fy, uy, y) - _ratio_term(fy, fx, ux, x)
            terms.append(b * vx * diff * diff)
    return 0.5 * compensated_sum(terms) if terms else 0.0


def weighted_energy(G: Graph, V: VertexFunction, u: VertexFunction) -> float:
    """Σ_x V(x)|∇u|²(x)"""
    support = u.support()
    if not support:
        return 0.0
    region = G.ball(support, 1)
    return compensated_sum([V(x) * grad_norm_sq(G, u, x) for x in region])


def hardy_weight(G: Graph, V: VertexFunction, f: VertexFunction, x: Vertex) -> float:
    """-div(V∇f)(x) / f(x)"""
    fx = f(x)
    if fx <= 0:
        raise NonPositiveReferenceError(f"Reference function is {fx!r} at {x!r}")
    return t_functional(G, V, f, x) / fx


def dirichlet_ground_state(G: Graph, interior: Iterable[Vertex]):
    """
    Positive principal eigenfunction of the Laplacian restricted to `interior`
    (zero outside); Δ^k f = λ^k f at vertices at distance ≥ k from the exterior.

    Returns:
        Tuple of (VertexFunction, eigenvalue)
    """
    inside = set(interior)
    nodes = [x for x in G.vertices if x in inside]
    if not nodes:
        raise ValueError("Interior set is empty")
    L = G.laplacian_matrix(nodelist=list(G.vertices)).toarray()
    index = {x: i for i, x in enumerate(G.vertices)}
    idx = [index[x] for x in nodes]
    sub = L[np.ix_(idx, idx)]
    evals, evecs = np.linalg.eigh(sub)
    vec = evecs[:, 0]
    if vec.sum() < 0:
        vec = -vec
    if np.any(vec <= 0):
        raise NonPositiveReferenceError("Principal eigenvector is not positive; is the interior connected?")
    values = {x: 0.0 for x in G.vertices}
    values.update({x: float(v) for x, v in zip(nodes, vec)})
    f = VertexFunction(values)
    logger.debug(f"Ground state on {len(nodes)} interior vertices, eigenvalue {evals[0]:.6e}")
    return f, float(evals[0])
