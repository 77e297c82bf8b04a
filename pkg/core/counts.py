"""
core/counts.py
──────────────────────────────────────────────────────────────────────────────
Numeric counts of persistence modules.

Modules:
  1.  CubeModule3                - dense three-parameter modules (reference only)
  2.  Inclusion-exclusion        - n_incl_excl for two and three parameters
  3.  Two-parameter counts       - n2, n_bth, n_dth, n_dec
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np

from core import linalg as la
from core.decomp import DEFAULT_BUDGET, decompose, quiver_from_grid
from core.endcurves import births, deaths
from core.errors import ContractViolationError, InvalidSpreadError
from core.gridmod import GridModule, is_connected, is_convex, unit_vectors

logger = logging.getLogger(__name__)

Point3 = Tuple[int, int, int]

# ─────────────────────────────────────────────────────────────────────────────
# 1.  THREE-PARAMETER MODULES
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CubeWindow:
    lo: Point3
    hi: Point3

    def points(self) -> List[Point3]:
        return [tuple(q) for q in product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))]

    def contains(self, q: Sequence[int]) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, q, self.hi))


@dataclass(frozen=True, eq=False)
class CubeModule3:
    """maps[axis][q] : M_q -> M_{q + e_axis}; zero whenever it leaves the window."""

    p: int
    window: CubeWindow
    dims: Dict[Point3, int]
    maps: Tuple[Dict[Point3, np.ndarray], ...] = field(default_factory=lambda: ({}, {}, {}))

    def dim(self, q: Sequence[int]) -> int:
        q = tuple(q)
        return self.dims.get(q, 0) if self.window.contains(q) else 0

    def arrow(self, axis: int, q: Sequence[int]) -> np.ndarray:
        q = tuple(q)
        tgt = tuple(c + d for c, d in zip(q, unit_vectors(3)[axis]))
        m = self.maps[axis].get(q)
        if m is None or not self.window.contains(q) or not self.window.contains(tgt):
            return la.zeros(self.dim(tgt), self.dim(q))
        return m

    def structure_map(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        out = la.identity(self.dim(a))
        q = list(a)
        for axis in range(3):
            while q[axis] < b[axis]:
                out = la.matmul(self.arrow(axis, q), out, p=self.p)
                q[axis] += 1
        return out

    def points(self) -> List[Point3]:
        return self.window.points()

    def check(self) -> "CubeModule3":
        units = unit_vectors(3)
        for q in self.points():
            for i, j in combinations(range(3), 2):
                qi = tuple(c + d for c, d in zip(q, units[i]))
                qj = tuple(c + d for c, d in zip(q, units[j]))
                lhs = la.matmul(self.arrow(j, qi), self.arrow(i, q), p=self.p)
                rhs = la.matmul(self.arrow(i, qj), self.arrow(j, q), p=self.p)
                if not np.array_equal(lhs, rhs):
                    raise ContractViolationError(f"axes {i},{j} do not commute at {q}")
        return self


def spread_module3(points: Iterable[Sequence[int]], p: int = la.DEFAULT_PRIME) -> CubeModule3:
    pts = frozenset(tuple(q) for q in points)
    if not pts or not is_connected(pts) or not is_convex(pts):
        raise InvalidSpreadError(f"{sorted(pts)} is not a spread of Z^3")
    window = CubeWindow(
        tuple(min(q[i] for q in pts) for i in range(3)),
        tuple(max(q[i] for q in pts) for i in range(3)),
    )
    one = np.ones((1, 1), dtype=np.int64)
    units = unit_vectors(3)
    maps = tuple(
        {q: one for q in pts if tuple(c + d for c, d in zip(q, units[axis])) in pts} for axis in range(3)
    )
    return CubeModule3(p, window, {q: 1 for q in pts}, maps).check()


def box_points(lo: Sequence[int], hi: Sequence[int]) -> FrozenSet[Tuple[int, ...]]:
    """The lattice segment [lo, hi] in any number of dimensions."""
    return frozenset(tuple(q) for q in product(*(range(a, b + 1) for a, b in zip(lo, hi))))


# ─────────────────────────────────────────────────────────────────────────────
# 2.  INCLUSION-EXCLUSION
# ─────────────────────────────────────────────────────────────────────────────


def n_incl_excl(m: Union[GridModule, CubeModule3]) -> int:
    """sum over S of (-1)^|S| dim(x_S M), each dim a sum of ranks of phi_{q, q + e_S}."""
    n = 3 if isinstance(m, CubeModule3) else 2
    units = unit_vectors(n)
    total = 0
    for size in range(n + 1):
        for subset in combinations(range(n), size):
            step = tuple(sum(units[i][k] for i in subset) for k in range(n))
            dim_image = 0
            for q in m.points():
                tgt = tuple(a + b for a, b in zip(q, step))
                if m.dim(q) and m.dim(tgt):
                    dim_image += la.rank(m.structure_map(q, tgt), m.p)
            total += (-1) ** size * dim_image
    return total


# ─────────────────────────────────────────────────────────────────────────────
# 3.  TWO-PARAMETER COUNTS
# ─────────────────────────────────────────────────────────────────────────────


def n2(m: GridModule) -> int:
    """dim M - dim xM - dim yM + dim xyM."""
    dim_m = dim_x = dim_y = dim_xy = 0
    for q in m.points():
        if not m.dim(q):
            continue
        dim_m += m.dim(q)
        dim_x += la.rank(m.xmap(q), m.p)
        dim_y += la.rank(m.ymap(q), m.p)
        dim_xy += la.rank(m.xymap(q), m.p)
    return dim_m - dim_x - dim_y + dim_xy


def n_bth(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> int:
    return len(births(m, seed, budget))


def n_dth(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> int:
    return len(deaths(m, seed, budget))


def n_dec(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> int:
    if m.is_zero():
        return 0
    return len(decompose(quiver_from_grid(m), seed=seed, budget=budget))


def pointwise_max_dim(m: GridModule) -> int:
    return max((m.dim(q) for q in m.points()), default=0)
