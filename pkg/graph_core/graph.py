"""
Locally finite weighted graphs
Finite in-memory windows with symmetric positive conductances b(x, y)
"""
import math
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np

from config import GRAPH_CONFIG

logger = logging.getLogger(__name__)

Vertex = Hashable


# ============================================================================
# ERRORS
# ============================================================================

class UnknownVertexError(KeyError):
    """Vertex is not part of the graph"""


class MissingEdgeValueError(KeyError):
    """Edge function has no value stored on a required ordered pair"""


class NonPositiveReferenceError(ValueError):
    """A reference function that must be positive is not"""


class HypothesisViolation(ValueError):
    """Positivity hypothesis Δ^k f > 0 fails at a vertex in stencil reach"""

    def __init__(self, vertex: Any, k: int, value: float, message: str = ""):
        self.vertex = vertex
        self.k = k
        self.value = value
        super().__init__(message or f"Hypothesis Δ^{k} f > 0 violated at vertex {vertex!r}: value {value!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {'vertex': repr(self.vertex), 'k': self.k, 'value': float(self.value)}


# ============================================================================
# GRAPH
# ============================================================================

class Graph:
    """
    Weighted graph with symmetric conductance b(x, y) > 0 and no self-loops.

    The networkx graph is copied on construction; adjacency is cached as
    tuples so that evaluators can share one instance across threads.
    """

    def __init__(self, graph: nx.Graph, name: str = ""):
        if graph.is_directed():
            raise ValueError("Graph must be undirected (b is symmetric)")
        self.name = name
        self._nx = nx.Graph()
        self._nx.add_nodes_from(graph.nodes())
        for x, y, data in graph.edges(data=True):
            if x == y:
                raise ValueError(f"Self-loop at vertex {x!r} is not allowed")
            b = float(data.get('weight', 1.0))
            if not math.isfinite(b) or b <= 0:
                raise ValueError(f"Edge ({x!r}, {y!r}) has non-positive weight {b}")
            self._nx.add_edge(x, y, weight=b)
        self._vertices: Tuple[Vertex, ...] = tuple(self._nx.nodes())
        self._adj: Dict[Vertex, Tuple[Tuple[Vertex, float], ...]] = {
            x: tuple((y, d['weight']) for y, d in self._nx[x].items())
            for x in self._vertices
        }

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Tuple[Vertex, Vertex, float]],
        vertices: Optional[Iterable[Vertex]] = None,
        name: str = "",
    ) -> 'Graph':
        g = nx.Graph()
        if vertices is not None:
            g.add_nodes_from(vertices)
        for x, y, b in edges:
            if g.has_edge(x, y) and g[x][y]['weight'] != b:
                raise ValueError(f"Conflicting weights for edge ({x!r}, {y!r})")
            g.add_edge(x, y, weight=b)
        return cls(g, name=name)

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self._vertices

    def __contains__(self, x: Vertex) -> bool:
        return x in self._adj

    def __len__(self) -> int:
        return len(self._vertices)

    def neighbors(self, x: Vertex) -> Tuple[Tuple[Vertex, float], ...]:
        """Neighbours of x with conductances, as (y, b(x, y)) pairs"""
        try:
            return self._adj[x]
        except KeyError:
            raise UnknownVertexError(f"Unknown vertex: {x!r}") from None

    def weight(self, x: Vertex, y: Vertex) -> float:
        """b(x, y), zero for non-adjacent pairs"""
        for z, b in self.neighbors(x):
            if z == y:
                return b
        return 0.0

    def edges(self) -> List[Tuple[Vertex, Vertex, float]]:
        return [(x, y, d['weight']) for x, y, d in self._nx.edges(data=True)]

    def number_of_edges(self) -> int:
        return self._nx.number_of_edges()

    def is_connected(self) -> bool:
        return len(self) > 0 and nx.is_connected(self._nx)

    def ball(self, centers: Iterable[Vertex], radius: int) -> Set[Vertex]:
        """Vertices within graph distance `radius` of any center"""
        frontier = {x for x in centers if x in self._adj}
        seen = set(frontier)
        for _ in range(radius):
            nxt = set()
            for x in frontier:
                for y, _b in self._adj[x]:
                    if y not in seen:
                        nxt.add(y)
            seen |= nxt
            frontier = nxt
            if not frontier:
                break
        return seen

    def distances_from(self, source: Vertex) -> Dict[Vertex, int]:
        if source not in self._adj:
            raise UnknownVertexError(f"Unknown vertex: {source!r}")
        return dict(nx.single_source_shortest_path_length(self._nx, source))

    def laplacian_matrix(self, nodelist: Optional[List[Vertex]] = None):
        """Sparse weighted Laplacian D - B in the given vertex order"""
        return nx.laplacian_matrix(self._nx, nodelist=nodelist, weight='weight').astype(float)

    def to_networkx(self) -> nx.Graph:
        return self._nx.copy()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'vertices': len(self),
            'edges': self.number_of_edges(),
            'connected': self.is_connected(),
        }


# ============================================================================
# FUNCTIONS ON VERTICES AND EDGES
# ============================================================================

@dataclass(frozen=True)
class VertexFunction:
    """Real function on vertices; 0 outside the stored values"""
    values: Dict[Vertex, float] = field(default_factory=dict)

    def __call__(self, x: Vertex) -> float:
        return self.values.get(x, 0.0)

    @classmethod
    def constant(cls, graph: Graph, c: float) -> 'VertexFunction':
        return cls({x: c for x in graph.vertices})

    @classmethod
    def from_callable(cls, graph: Graph, fn: Callable[[Vertex], float],
                      vertices: Optional[Iterable[Vertex]] = None) -> 'VertexFunction':
        verts = graph.vertices if vertices is None else vertices
        return cls({x: fn(x) for x in verts})

    def support(self) -> Set[Vertex]:
        return {x for x, v in self.values.items() if v != 0}

    def is_positive_on(self, vertices: Iterable[Vertex]) -> bool:
        return all(self(x) > 0 for x in vertices)

    def map(self, fn: Callable[[float], float]) -> 'VertexFunction':
        return VertexFunction({x: fn(v) for x, v in self.values.items()})

    def __mul__(self, other: 'VertexFunction') -> 'VertexFunction':
        keys = set(self.values) & set(other.values)
        return VertexFunction({x: self(x) * other(x) for x in keys})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.values.values()), default=0.0)

    def to_dict(self) -> Dict[str, float]:
        return {repr(x): float(v) for x, v in self.values.items()}


@dataclass(frozen=True)
class EdgeFunction:
    """Real function on ordered adjacent pairs (x, y)"""
    values: Dict[Tuple[Vertex, Vertex], float] = field(default_factory=dict)

    def __call__(self, x: Vertex, y: Vertex) -> float:
        try:
            return self.values[(x, y)]
        except KeyError:
            raise MissingEdgeValueError(f"No edge value stored on ({x!r}, {y!r})") from None

    @classmethod
    def from_callable(cls, graph: Graph, fn: Callable[[Vertex, Vertex], float],
                      vertices: Optional[Iterable[Vertex]] = None) -> 'EdgeFunction':
        verts = graph.vertices if vertices is None else vertices
        return cls({(x, y): fn(x, y) for x in verts for y, _b in graph.neighbors(x)})

    @classmethod
    def gradient(cls, graph: Graph, f: VertexFunction,
                 vertices: Optional[Iterable[Vertex]] = None) -> 'EdgeFunction':
        """∇f(x, y) := f(x) - f(y)"""
        return cls.from_callable(graph, lambda x, y: f(x) - f(y), vertices)

    def is_antisymmetric(self, tol: float = 0.0) -> bool:
        for (x, y), v in self.values.items():
            other = self.values.get((y, x))
            if other is None or abs(v + other) > tol:
                return False
        return True


# ============================================================================
# GENERATORS
# ============================================================================

def path_graph(
    n_max: int,
    conductance: Optional[Callable[[int], float]] = None,
    start: int = 0,
) -> Graph:
    """
    ℕ-window start..n_max with edge (n-1, n) of conductance b = conductance(n)

    Edges with zero conductance are omitted, so 1-D energies Σ V_n |∇u_n|²
    are graph energies Σ_x |∇u|²(x).
    """
    if n_max <= start:
        raise ValueError(f"Path window needs n_max > start, got {start}..{n_max}")
    g = nx.Graph()
    g.add_nodes_from(range(start, n_max + 1))
    for n in range(start + 1, n_max + 1):
        b = 1.0 if conductance is None else float(conductance(n))
        if b != 0:
            g.add_edge(n - 1, n, weight=b)
    return Graph(g, name=f"path[{start}..{n_max}]")


def _conductances(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(GRAPH_CONFIG['conductance_low'], GRAPH_CONFIG['conductance_high'], size=count)


def random_tree(n: int, seed: int, window: Optional[int] = None) -> Graph:
    """
    Random tree on 0..n-1: vertex k attaches to a uniformly chosen earlier vertex.

    With `window`, the parent is drawn from the last `window` vertices only,
    which produces long, path-like trees.
    """
    if n < 1:
        raise ValueError(f"Tree needs at least one vertex, got {n}")
    rng = np.random.default_rng(seed)
    b = _conductances(rng, max(n - 1, 0))
    g = nx.Graph()
    g.add_node(0)
    for k in range(1, n):
        lo = 0 if window is None else max(0, k - window)
        parent = int(rng.integers(lo, k))
        g.add_edge(parent, k, weight=float(b[k - 1]))
    return Graph(g, name=f"tree(n={n}, seed={seed})")


def random_sparse_graph(n: int, p: Optional[float] = None, seed: int = 0) -> Graph:
    """Erdős–Rényi G(n, p) with conductances uniform in the configured range"""
    p = GRAPH_CONFIG['edge_probability'] if p is None else p
    base = nx.gnp_random_graph(n, p, seed=seed)
    rng = np.random.default_rng(seed)
    b = _conductances(rng, base.number_of_edges())
    for (x, y), w in zip(sorted(base.edges()), b):
        base[x][y]['weight'] = float(w)
    return Graph(base, name=f"gnp(n={n}, p={p}, seed={seed})")


# ============================================================================
# INTERCHANGE FORMAT
# ============================================================================

def parse_edge_list(text: str) -> Graph:
    """Parse `x y b(x,y)` lines (nonnegative integer ids, '#' comments)"""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"Line {lineno}: expected 'x y b', got {raw!r}")
        try:
            x, y, b = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"Line {lineno}: cannot parse {raw!r}") from None
        if x < 0 or y < 0:
            raise ValueError(f"Line {lineno}: vertex ids must be nonnegative")
        edges.append((x, y, b))
    return Graph.from_edges(edges)


def read_edge_list(path: Union[str, Path]) -> Graph:
    path = Path(path)
    graph = parse_edge_list(path.read_text())
    graph.name = path.name
    logger.info(f"Loaded graph {path.name}: {len(graph)} vertices, {graph.number_of_edges()} edges")
    return graph


def format_edge_list(graph: Graph) -> str:
    lines = [f"{x} {y} {b!r}" for x, y, b in sorted(graph.edges(), key=lambda e: (e[0], e[1]))]
    return "\n".join(lines) + "\n"


def write_edge_list(graph: Graph, path: Union[str, Path]) -> None:
    Path(path).write_text(format_edge_list(graph))
