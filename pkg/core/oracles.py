"""
core/oracles.py
──────────────────────────────────────────────────────────────────────────────
Brute-force signed invariants on tiny grids, used to cross-check the counts.
Everything here is exponential in the grid size and capped accordingly.

Modules:
  1.  Enumeration                - spreads, segments, hooks, principal upsets
  2.  Invariants                 - generalized rank (lim -> colim), hom dims
  3.  Mobius inversion           - signed decompositions over a family
  4.  Counts                     - GPD, signed barcode, hooks, int. Euler, Hilbert
  5.  Order complexes            - Euler characteristic by chain counting
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from core import linalg as la
from core.counts import CubeModule3, CubeWindow, spread_module3
from core.decomp import QuiverRep, hom_basis
from core.errors import MobiusInversionError, SizeLimitError
from core.gridmod import GridModule, Window, is_connected, leq, spread_module, unit_vectors

logger = logging.getLogger(__name__)

MAX_ENUMERATION_POINTS = 16
MAX_CHAIN_POINTS = 12

Point = Tuple[int, ...]
PointSet = FrozenSet[Point]
AnyWindow = Union[Window, CubeWindow]
AnyModule = Union[GridModule, CubeModule3]
SignedMultiset = Dict[PointSet, int]

# ─────────────────────────────────────────────────────────────────────────────
# 1.  ENUMERATION
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SpreadFamily:
    points: Tuple[Point, ...]
    spreads: Tuple[PointSet, ...] = field(default_factory=tuple)
    segments: Tuple[PointSet, ...] = field(default_factory=tuple)
    hooks: Tuple[PointSet, ...] = field(default_factory=tuple)
    upsets: Tuple[PointSet, ...] = field(default_factory=tuple)


def _sort_key(s: PointSet):
    return (len(s), sorted(s))


def _window_points(window: AnyWindow) -> Tuple[Point, ...]:
    return tuple(sorted(tuple(q) for q in window.points()))


@lru_cache(maxsize=32)
def enumerate_spreads(window: AnyWindow, max_points: int = MAX_ENUMERATION_POINTS) -> SpreadFamily:
    pts = _window_points(window)
    n = len(pts)
    if n > max_points:
        raise SizeLimitError(f"spread enumeration is capped at {max_points} grid points, got {n}")
    up = [sum(1 << j for j in range(n) if leq(pts[i], pts[j])) for i in range(n)]
    down = [sum(1 << j for j in range(n) if leq(pts[j], pts[i])) for i in range(n)]

    spreads = []
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        upper = lower = 0
        for i in members:
            upper |= up[i]
            lower |= down[i]
        if upper & lower != mask:
            continue
        subset = frozenset(pts[i] for i in members)
        if is_connected(subset):
            spreads.append(subset)

    segments = {
        frozenset(q for q in pts if leq(a, q) and leq(q, b)) for a in pts for b in pts if leq(a, b)
    }
    hooks = set()
    for a in pts:
        for b in list(pts) + [None]:
            hook = frozenset(q for q in pts if leq(a, q) and (b is None or not leq(b, q)))
            if hook:
                hooks.add(hook)
    upsets = {frozenset(q for q in pts if leq(a, q)) for a in pts}
    family = SpreadFamily(
        pts,
        tuple(sorted(spreads, key=_sort_key)),
        tuple(sorted(segments, key=_sort_key)),
        tuple(sorted(hooks, key=_sort_key)),
        tuple(sorted(upsets, key=_sort_key)),
    )
    logger.debug(
        f"[ORACLE] {n} points: {len(family.spreads)} spreads, "
        f"{len(family.segments)} segments, {len(family.hooks)} hooks"
    )
    return family


# ─────────────────────────────────────────────────────────────────────────────
# 2.  INVARIANTS
# ─────────────────────────────────────────────────────────────────────────────


def _covers(points: Sequence[Point]) -> List[Tuple[Point, Point]]:
    inside = set(points)
    units = unit_vectors(len(next(iter(points))))
    return [
        (q, tuple(a + b for a, b in zip(q, e)))
        for q in sorted(inside)
        for e in units
        if tuple(a + b for a, b in zip(q, e)) in inside
    ]


def generalized_rank(m: AnyModule, spread: PointSet) -> int:
    """rank(lim M|_I -> colim M|_I)."""
    pts = sorted(tuple(q) for q in spread)
    if not pts:
        return 0
    offsets, total = {}, 0
    for q in pts:
        offsets[q] = total
        total += m.dim(q)
    if total == 0:
        return 0
    covers = _covers(pts)

    # lim: families with phi v_q = v_q' along every cover
    compat_rows = []
    # colim: quotient of the sum by iota_q'(phi v) - iota_q(v)
    relation_cols = []
    for q, r in covers:
        phi = m.structure_map(q, r)
        block = la.zeros(m.dim(r), total)
        block[:, offsets[q] : offsets[q] + m.dim(q)] = phi
        block[:, offsets[r] : offsets[r] + m.dim(r)] -= la.identity(m.dim(r))
        compat_rows.append(block % m.p)
        rel = la.zeros(total, m.dim(q))
        rel[offsets[r] : offsets[r] + m.dim(r)] = phi
        rel[offsets[q] : offsets[q] + m.dim(q)] -= la.identity(m.dim(q))
        relation_cols.append(rel % m.p)
    compat = np.vstack(compat_rows) if compat_rows else la.zeros(0, total)
    lim = la.kernel_basis(compat, m.p)
    if lim.shape[1] == 0:
        return 0
    relations = np.hstack(relation_cols) if relation_cols else la.zeros(total, 0)
    quot, _ = la.quotient_map(relations, total, m.p)
    q0 = pts[0]
    select = la.zeros(total, total)
    select[offsets[q0] : offsets[q0] + m.dim(q0), offsets[q0] : offsets[q0] + m.dim(q0)] = la.identity(m.dim(q0))
    return la.rank(la.matmul(quot, select, lim, p=m.p), m.p)


def _full_quiver(m: AnyModule, pts: Sequence[Point]) -> QuiverRep:
    covers = _covers(pts)
    return QuiverRep(
        m.p,
        list(pts),
        covers,
        {q: m.dim(q) for q in pts},
        [m.structure_map(q, r) for q, r in covers],
    )


def hom_dim(n: AnyModule, m: AnyModule, points: Optional[Sequence[Point]] = None) -> int:
    """dim Hom(N, M) over the grid spanned by ``points`` (default: N's window)."""
    pts = sorted(tuple(q) for q in (points if points is not None else n.window.points()))
    return len(hom_basis(_full_quiver(n, pts), _full_quiver(m, pts)))


def thin_hom_dim(source: PointSet, target: PointSet) -> int:
    """
    dim Hom(k_J, k_I) for spreads J (source) and I (target): one per component
    of J & I with no cover into I - J and no cover from J - I.
    """
    common = set(source) & set(target)
    if not common:
        return 0
    units = unit_vectors(len(next(iter(common))))
    seen = set()
    total = 0
    for start in sorted(common):
        if start in seen:
            continue
        comp, stack = {start}, [start]
        while stack:
            q = stack.pop()
            for e in units:
                for sign in (1, -1):
                    nb = tuple(a + sign * b for a, b in zip(q, e))
                    if nb in common and nb not in comp:
                        comp.add(nb)
                        stack.append(nb)
        seen |= comp
        blocked = False
        for q in comp:
            for e in units:
                up = tuple(a + b for a, b in zip(q, e))
                down = tuple(a - b for a, b in zip(q, e))
                if (up in target and up not in source) or (down in source and down not in target):
                    blocked = True
        total += 0 if blocked else 1
    return total


def indicator_module(points: PointSet, window: AnyWindow, p: int) -> AnyModule:
    """k_I on the given window, for two or three parameters."""
    if isinstance(window, CubeWindow):
        inner = spread_module3(points, p)
        return CubeModule3(p, window, dict(inner.dims), inner.maps)
    return spread_module(points, window, p)


# ─────────────────────────────────────────────────────────────────────────────
# 3.  MOBIUS INVERSION
# ─────────────────────────────────────────────────────────────────────────────

_LIFT_PRIME = sympy.prevprime(2**26)


def _pairing_matrix(family: Sequence[PointSet], pairing: Callable[[PointSet, PointSet], int]) -> np.ndarray:
    """entry [i, j] = invariant of the basis element for family[j], evaluated at family[i]."""
    n = len(family)
    mat = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(family):
        for j, b in enumerate(family):
            mat[i, j] = pairing(a, b)
    return mat


def _triangular_solve(mat: np.ndarray, values: np.ndarray) -> Optional[np.ndarray]:
    n = mat.shape[0]
    if any(mat[i, i] == 0 for i in range(n)):
        return None
    graph = {i: {j for j in range(n) if j != i and mat[i, j]} for i in range(n)}
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError:
        return None
    coeffs = np.zeros(n, dtype=np.int64)
    for i in order:
        rest = int(values[i]) - sum(int(mat[i, j]) * int(coeffs[j]) for j in graph[i])
        if rest % int(mat[i, i]):
            raise MobiusInversionError(f"values are not an integer combination at index {i}")
        coeffs[i] = rest // int(mat[i, i])
    return coeffs


def _modular_solve(mat: np.ndarray, values: np.ndarray) -> np.ndarray:
    p = _LIFT_PRIME
    sol = la.solve_membership(mat % p, (values % p).reshape(-1, 1), p)
    if sol is None or la.rank(mat, p) != mat.shape[0]:
        raise MobiusInversionError("pairing matrix is singular or the values are outside its span")
    lifted = np.array([int(c) - p if int(c) > p // 2 else int(c) for c in sol[:, 0]], dtype=np.int64)
    if not np.array_equal(mat @ lifted, values):
        raise MobiusInversionError("integer lift of the modular solution does not reproduce the values")
    return lifted


def mobius_invert(
    values: Dict[PointSet, int],
    family: Sequence[PointSet],
    pairing: Callable[[PointSet, PointSet], int],
) -> SignedMultiset:
    """Unique integers c_J with values[I] = sum_J c_J pairing(I, J)."""
    family = list(family)
    vec = np.array([int(values.get(s, 0)) for s in family], dtype=np.int64)
    if set(values) - set(family):
        raise MobiusInversionError("values are supported outside the family")
    mat = _pairing_matrix(family, pairing)
    coeffs = _triangular_solve(mat, vec)
    if coeffs is None:
        logger.warning(f"[ORACLE] pairing over {len(family)} spreads is not triangular, solving modularly")
        coeffs = _modular_solve(mat, vec)
    return {s: int(c) for s, c in zip(family, coeffs) if c}


# ─────────────────────────────────────────────────────────────────────────────
# 4.  COUNTS
# ─────────────────────────────────────────────────────────────────────────────


def _contained(a: PointSet, b: PointSet) -> int:
    return int(a <= b)


def rank_invariant(m: AnyModule, family: Sequence[PointSet]) -> Dict[PointSet, int]:
    return {s: generalized_rank(m, s) for s in family}


def hom_invariant(m: AnyModule, family: Sequence[PointSet], window: AnyWindow) -> Dict[PointSet, int]:
    pts = _window_points(window)
    return {s: hom_dim(indicator_module(s, window, m.p), m, pts) for s in family}


def gpd(m: AnyModule) -> SignedMultiset:
    """Generalized persistence diagram: Mobius inversion of Rk over all spreads."""
    fam = enumerate_spreads(m.window)
    return mobius_invert(rank_invariant(m, fam.spreads), fam.spreads, _contained)


def signed_barcode(m: AnyModule) -> SignedMultiset:
    fam = enumerate_spreads(m.window)
    return mobius_invert(rank_invariant(m, fam.segments), fam.segments, _contained)


def hook_decomposition(m: AnyModule) -> SignedMultiset:
    fam = enumerate_spreads(m.window)
    return mobius_invert(hom_invariant(m, fam.hooks, m.window), fam.hooks, thin_hom_dim)


def int_euler_decomposition(m: AnyModule) -> SignedMultiset:
    fam = enumerate_spreads(m.window)
    return mobius_invert(hom_invariant(m, fam.spreads, m.window), fam.spreads, thin_hom_dim)


def hilbert_decomposition(m: AnyModule) -> SignedMultiset:
    fam = enumerate_spreads(m.window)
    values = {u: m.dim(min(u)) for u in fam.upsets}
    return mobius_invert(values, fam.upsets, lambda at, basis: int(min(at) in basis))


def count_gpd(m: AnyModule) -> int:
    return sum(gpd(m).values())


def count_signed_barcode(m: AnyModule) -> int:
    return sum(signed_barcode(m).values())


def count_hooks(m: AnyModule) -> int:
    return sum(hook_decomposition(m).values())


def count_int_euler(m: AnyModule) -> int:
    return sum(int_euler_decomposition(m).values())


def count_hilbert(m: AnyModule) -> int:
    return sum(hilbert_decomposition(m).values())


# ─────────────────────────────────────────────────────────────────────────────
# 5.  ORDER COMPLEXES
# ─────────────────────────────────────────────────────────────────────────────


def order_complex_euler(points: PointSet, max_points: int = MAX_CHAIN_POINTS) -> int:
    """sum_k (-1)^k #(chains with k+1 elements) of the induced subposet."""
    pts = sorted(tuple(q) for q in points)
    if len(pts) > max_points:
        raise SizeLimitError(f"chain enumeration is capped at {max_points} points, got {len(pts)}")
    # chains[q][k]: chains of k+1 elements whose maximum is q
    chains: Dict[Point, List[int]] = {}
    for q in pts:
        counts = [1] + [0] * (len(pts) - 1)
        for r in pts:
            if r != q and leq(r, q):
                for k, c in enumerate(chains[r][:-1]):
                    counts[k + 1] += c
        chains[q] = counts
    return sum((-1) ** k * c for q in pts for k, c in enumerate(chains[q]))
