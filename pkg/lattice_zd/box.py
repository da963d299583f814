"""
Box truncations of ℤ^d
Lattice functions stored as dense arrays over {-R..R}^d with a zero collar
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, Iterable, Optional, Tuple

import networkx as nx
import numpy as np

from graph_core import Graph, VertexFunction

logger = logging.getLogger(__name__)

Point = Tuple[int, ...]


class OutOfBoxError(ValueError):
    """Lattice point or stencil reaches outside the box"""


# ============================================================================
# DOMAIN
# ============================================================================

@dataclass(frozen=True)
class BoxDomain:
    """
    Box {x : |x|_∞ ≤ R} in ℤ^d with a set of excluded points

    Test functions live on the interior |x|_∞ ≤ R - 1 minus the excluded
    points, so every nearest-neighbour stencil they need stays in the box.
    """
    d: int
    R: int
    excluded: FrozenSet[Point] = field(default=None)

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"Lattice dimension must be >= 2, got {self.d}")
        if self.R < 2:
            raise ValueError(f"Box radius must be >= 2, got {self.R}")
        excluded = frozenset({self.origin}) if self.excluded is None else frozenset(tuple(p) for p in self.excluded)
        for p in excluded:
            if not self.contains(p):
                raise OutOfBoxError(f"Excluded point {p} lies outside the box of radius {self.R}")
        object.__setattr__(self, 'excluded', excluded)

    @property
    def origin(self) -> Point:
        return (0,) * self.d

    @property
    def side(self) -> int:
        return 2 * self.R + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.side,) * self.d

    def contains(self, x: Iterable[int]) -> bool:
        x = tuple(x)
        return len(x) == self.d and all(abs(c) <= self.R for c in x)

    def index(self, x: Iterable[int]) -> Tuple[int, ...]:
        x = tuple(int(c) for c in x)
        if not self.contains(x):
            raise OutOfBoxError(f"Point {x} lies outside the box of radius {self.R} in dimension {self.d}")
        return tuple(c + self.R for c in x)

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Integer coordinate arrays, one per axis"""
        axis = np.arange(-self.R, self.R + 1)
        return tuple(np.meshgrid(*([axis] * self.d), indexing='ij'))

    def norm_squared(self) -> np.ndarray:
        """|x|² from exact integer squares"""
        total = np.zeros(self.shape, dtype=np.int64)
        for c in self.coordinates():
            total += c * c
        return total

    def interior_mask(self) -> np.ndarray:
        """|x|_∞ ≤ R - 1 and x not excluded"""
        mask = np.zeros(self.shape, dtype=bool)
        mask[(slice(1, -1),) * self.d] = True
        for p in self.excluded:
            mask[self.index(p)] = False
        return mask

    def to_graph(self) -> Graph:
        """The box as a graph_core Graph with unit conductances"""
        g = nx.grid_graph(dim=[range(-self.R, self.R + 1)] * self.d)
        nx.set_edge_attributes(g, 1.0, 'weight')
        return Graph(g, name=f"box(d={self.d}, R={self.R})")

    def to_dict(self):
        return {'d': self.d, 'R': self.R, 'excluded': [list(p) for p in sorted(self.excluded)]}


# ============================================================================
# LATTICE FUNCTIONS
# ============================================================================

@dataclass(frozen=True)
class LatticeFunction:
    """Real function on the box; zero on the collar and on excluded points"""
    domain: BoxDomain
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.domain.shape:
            raise ValueError(f"Values have shape {values.shape}, box needs {self.domain.shape}")
        if np.any(values[~self.domain.interior_mask()] != 0):
            raise ValueError("Lattice function must vanish on the collar and on excluded points")
        object.__setattr__(self, 'values', values)

    def __call__(self, x: Iterable[int]) -> float:
        x = tuple(x)
        if not self.domain.contains(x):
            return 0.0
        return float(self.values[self.domain.index(x)])

    @classmethod
    def zero(cls, domain: BoxDomain) -> 'LatticeFunction':
        return cls(domain, np.zeros(domain.shape))

    @classmethod
    def delta(cls, domain: BoxDomain, p: Iterable[int], value: float = 1.0) -> 'LatticeFunction':
        values = np.zeros(domain.shape)
        values[domain.index(p)] = value
        return cls(domain, values)

    @classmethod
    def from_callable(cls, domain: BoxDomain, fn: Callable[[Point], float]) -> 'LatticeFunction':
        values = np.zeros(domain.shape)
        for idx in zip(*np.nonzero(domain.interior_mask())):
            values[idx] = fn(tuple(int(i) - domain.R for i in idx))
        return cls(domain, values)

    @classmethod
    def random(cls, domain: BoxDomain, rng: np.random.Generator,
               allowed: Optional[np.ndarray] = None) -> 'LatticeFunction':
        """Uniform(-1, 1) values on a random fraction of the admissible points"""
        mask = domain.interior_mask() if allowed is None else domain.interior_mask() & allowed
        density = rng.uniform(0.05, 1.0)
        keep = mask & (rng.random(domain.shape) < density)
        values = np.where(keep, rng.uniform(-1.0, 1.0, size=domain.shape), 0.0)
        return cls(domain, values)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def to_vertex_function(self) -> VertexFunction:
        coords = self.domain.coordinates()
        nonzero = np.nonzero(self.values)
        return VertexFunction({
            tuple(int(c[idx]) for c in coords): float(self.values[idx])
            for idx in zip(*nonzero)
        })


def field_to_vertex_function(domain: BoxDomain, values: np.ndarray) -> VertexFunction:
    """Every box entry of an array as a VertexFunction"""
    coords = domain.coordinates()
    return VertexFunction({
        tuple(int(c[idx]) for c in coords): float(values[idx])
        for idx in np.ndindex(*domain.shape)
    })


# ============================================================================
# OPERATORS
# ============================================================================

def _neighbours(x: Point) -> Iterable[Point]:
    for i in range(len(x)):
        for step in (1, -1):
            y = list(x)
            y[i] += step
            yield tuple(y)


def zd_laplacian(u: LatticeFunction, x: Iterable[int]) -> float:
    """
    Δu(x) = Σ_{i,±} (u(x) - u(x ± e_i))

    Raises:
        OutOfBoxError: x or one of its neighbours is outside the box
    """
    x = tuple(int(c) for c in x)
    domain = u.domain
    neighbours = list(_neighbours(x))
    for y in [x] + neighbours:
        if not domain.contains(y):
            raise OutOfBoxError(f"Stencil of {x} reaches {y}, outside the box of radius {domain.R}")
    ux = u(x)
    return math.fsum(ux - u(y) for y in neighbours)


def _axis_pairs(a: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """(a at x, a at x + e_axis) over every edge along the axis"""
    n = a.shape[axis]
    lower = np.take(a, np.arange(0, n - 1), axis=axis)
    upper = np.take(a, np.arange(1, n), axis=axis)
    return lower, upper


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def ground_state_weight_field(V: np.ndarray, f: np.ndarray) -> np.ndarray:
    """
    w(x) = Σ_{y∼x} ½(V(x) + V(y))(f(x) - f(y)) / f(x) inside the box

    Equals T(V, f)/f = (VΔf - ⟨∇f, ∇V⟩)/f; zero on the outer layer and
    where f vanishes.
    """
    total = np.zeros(f.shape)
    for axis in range(f.ndim):
        f_lo, f_hi = _axis_pairs(f, axis)
        v_lo, v_hi = _axis_pairs(V, axis)
        flux = 0.5 * (v_lo + v_hi) * (f_lo - f_hi)
        n = f.shape[axis]
        lower_idx = [slice(None)] * f.ndim
        upper_idx = [slice(None)] * f.ndim
        lower_idx[axis] = slice(0, n - 1)
        upper_idx[axis] = slice(1, n)
        total[tuple(lower_idx)] += flux
        total[tuple(upper_idx)] -= flux
    inner = np.zeros(f.shape, dtype=bool)
    inner[(slice(1, -1),) * f.ndim] = True
    return np.where(inner, _safe_ratio(total, f), 0.0)


@dataclass
class LatticeForm:
    """Σ V|∇u|², Σ w u² and the ground state remainder for one u"""
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

    def to_dict(self):
        return {
            'energy': self.energy,
            'weighted_mass': self.weighted_mass,
            'margin': self.margin,
            'remainder': self.remainder,
            'residual': self.residual,
        }


def lattice_form(u: LatticeFunction, V: np.ndarray, f: np.ndarray, w: np.ndarray) -> LatticeForm:
    """
    Evaluate Σ_{x≠0} V(x)|∇u|²(x), Σ w u² and
    Σ_{edges} ½(V(x)+V(y)) f(x)f(y) (u(x)/f(x) - u(y)/f(y))²

    V and f carry 0 at excluded points, so edges into them contribute
    ½V(x)u(x)² to the energy and nothing to the remainder.
    """
    if u.is_zero():
        return LatticeForm(0.0, 0.0, 0.0)
    ratio = _safe_ratio(u.values, f)
    energy_terms, remainder_terms = [], []
    for axis in range(u.values.ndim):
        u_lo, u_hi = _axis_pairs(u.values, axis)
        v_lo, v_hi = _axis_pairs(V, axis)
        f_lo, f_hi = _axis_pairs(f, axis)
        r_lo, r_hi = _axis_pairs(ratio, axis)
        c = 0.5 * (v_lo + v_hi)
        energy_terms.append(float(np.sum(c * (u_lo - u_hi) ** 2)))
        remainder_terms.append(float(np.sum(c * f_lo * f_hi * (r_lo - r_hi) ** 2)))
    weighted_mass = float(np.sum(w * u.values * u.values))
    return LatticeForm(math.fsum(energy_terms), weighted_mass, math.fsum(remainder_terms))
