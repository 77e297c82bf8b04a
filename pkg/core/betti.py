"""
core/betti.py
──────────────────────────────────────────────────────────────────────────────
Bigraded Betti tables.

Modules:
  1.  BettiTables                - b0 / b1 / b2 as multisets of grades
  2.  Koszul homology            - koszul_betti
  3.  Square analysis            - type multiplicities on sq(l), closed formulas
  4.  Curves to Betti tables     - betti_from_curves
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from collections import Counter
from typing import Dict, FrozenSet, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from core import linalg as la
from core.decomp import DEFAULT_BUDGET, decompose, quiver_from_grid
from core.endcurves import CornerData, CurveMultiset, corners
from core.errors import InternalInconsistencyError
from core.gridmod import E1, E2, E12, Bigrade, GridModule, Window

logger = logging.getLogger(__name__)

SQUARE_TYPES = "abcdefghijk"

# ─────────────────────────────────────────────────────────────────────────────
# 1.  BETTI TABLES
# ─────────────────────────────────────────────────────────────────────────────


class BettiTables(BaseModel):
    """Each table is a sorted list of grades, repeated by multiplicity."""

    model_config = ConfigDict(frozen=True)

    b0: List[Bigrade] = []
    b1: List[Bigrade] = []
    b2: List[Bigrade] = []

    @classmethod
    def from_counters(cls, b0: Counter, b1: Counter, b2: Counter) -> "BettiTables":
        def expand(c):
            return sorted(Bigrade(*q) for q, n in c.items() for _ in range(n))

        return cls(b0=expand(b0), b1=expand(b1), b2=expand(b2))

    def table(self, degree: int) -> List[Bigrade]:
        return [self.b0, self.b1, self.b2][degree]

    def as_dict(self) -> Dict[str, List[List[int]]]:
        return {
            f"b{k}": [[q[0], q[1]] for q in self.table(k)]
            for k in range(3)
        }


# ─────────────────────────────────────────────────────────────────────────────
# 2.  KOSZUL HOMOLOGY
# ─────────────────────────────────────────────────────────────────────────────


def koszul_ranks(m: GridModule, q: Bigrade):
    """(dims of the three terms, rank d2, rank d1) of K(M) at grade q."""
    low = q.minus(E12)
    left, down = q.minus(E1), q.minus(E2)
    d2 = np.vstack([m.ymap(low), (-m.xmap(low)) % m.p])
    d1 = np.hstack([m.xmap(left), m.ymap(down)])
    dims = (m.dim(low), m.dim(left) + m.dim(down), m.dim(q))
    return dims, la.rank(d2, m.p), la.rank(d1, m.p)


def koszul_betti(m: GridModule) -> BettiTables:
    """Homology of 0 -> M[-1,-1] -> M[-1,0] + M[0,-1] -> M -> 0 at every grade."""
    b0, b1, b2 = Counter(), Counter(), Counter()
    grid = Window(m.window.lo, m.window.hi.plus(E12))
    for q in grid.points():
        (top, mid, bottom), r2, r1 = koszul_ranks(m, q)
        for table, value in ((b2, top - r2), (b1, mid - r1 - r2), (b0, bottom - r1)):
            if value:
                table[q] += value
    return BettiTables.from_counters(b0, b1, b2)


def euler_defect(m: GridModule, q: Bigrade) -> int:
    """beta0 - beta1 + beta2 minus the alternating sum of term dimensions; always zero."""
    (top, mid, bottom), r2, r1 = koszul_ranks(m, q)
    betti_sum = (bottom - r1) - (mid - r1 - r2) + (top - r2)
    return betti_sum - (bottom - mid + top)


# ─────────────────────────────────────────────────────────────────────────────
# 3.  SQUARE ANALYSIS
# ─────────────────────────────────────────────────────────────────────────────

# offsets from l: BL = l-(1,1), BR = l-(0,1), TL = l-(1,0), TR = l
_BL, _BR, _TL, _TR = (1, 1), (0, 1), (1, 0), (0, 0)
_SUPPORT_TYPES: Dict[FrozenSet, str] = {
    frozenset({_BL}): "a",
    frozenset({_BR}): "b",
    frozenset({_TL}): "c",
    frozenset({_TR}): "d",
    frozenset({_BL, _TL}): "e",
    frozenset({_BL, _BR}): "f",
    frozenset({_TL, _TR}): "g",
    frozenset({_BR, _TR}): "h",
    frozenset({_BL, _TL, _BR}): "i",
    frozenset({_TL, _TR, _BR}): "j",
    frozenset({_BL, _BR, _TL, _TR}): "k",
}


class SquareCounts(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: Bigrade
    counts: Dict[str, int]

    def __getitem__(self, kind: str) -> int:
        return self.counts[kind]


def square_formulas(m: GridModule, ell: Sequence[int]) -> Dict[str, int]:
    """Closed formulas for M^a, M^b, M^c, M^d, M^i, M^j read off the square at l."""
    ell = Bigrade(*ell)
    p = m.p
    bl, br, tl = ell.minus(E12), ell.minus(E2), ell.minus(E1)
    out = {}
    out["a"] = la.kernel_basis(np.vstack([m.xmap(bl), m.ymap(bl)]), p).shape[1]
    q_tl, s_tl = la.quotient_map(m.ymap(bl), m.dim(tl), p)
    q_br, s_br = la.quotient_map(m.xmap(bl), m.dim(br), p)
    out["b"] = la.rank(la.matmul(q_br, la.kernel_basis(m.ymap(br), p), p=p), p)
    out["c"] = la.rank(la.matmul(q_tl, la.kernel_basis(m.xmap(tl), p), p=p), p)
    out["d"] = m.dim(ell) - la.rank(np.hstack([m.xmap(tl), m.ymap(br)]), p)

    ker_xy = la.kernel_basis(m.xymap(bl), p)
    ker_sum = np.hstack([la.kernel_basis(m.xmap(bl), p), la.kernel_basis(m.ymap(bl), p)])
    out["i"] = ker_xy.shape[1] - la.rank(ker_sum, p)

    # pairs (w, z) in TL/yBL + BR/xBL with x w = y z modulo xy BL; this also counts b and c
    q_tr, _ = la.quotient_map(m.xymap(bl), m.dim(ell), p)
    pairing = np.hstack(
        [
            la.matmul(q_tr, m.xmap(tl), s_tl, p=p),
            (-la.matmul(q_tr, m.ymap(br), s_br, p=p)) % p,
        ]
    )
    solutions = pairing.shape[1] - la.rank(pairing, p)
    out["j"] = solutions - out["b"] - out["c"]
    return out


def square_counts(
    m: GridModule, ell: Sequence[int], seed: int = 0, budget: int = DEFAULT_BUDGET, verify: bool = True
) -> SquareCounts:
    """Multiplicities of the eleven indecomposable types in M restricted to sq(l)."""
    ell = Bigrade(*ell)
    square = [ell.minus(off) for off in (_BL, _BR, _TL, _TR)]
    rep = quiver_from_grid(m, square)
    counts = {kind: 0 for kind in SQUARE_TYPES}
    if rep.total_dim:
        for summand in decompose(rep, seed=seed, budget=budget).summands:
            if any(summand.dim(v) > 1 for v in summand.vertices):
                raise InternalInconsistencyError(f"square summand at {ell} is not thin")
            offsets = frozenset(tuple(ell.minus(v)) for v in summand.support())
            kind = _SUPPORT_TYPES.get(offsets)
            if kind is None:
                raise InternalInconsistencyError(f"square summand at {ell} has unknown support {sorted(offsets)}")
            counts[kind] += 1
    if verify:
        formulas = square_formulas(m, ell)
        for kind, value in formulas.items():
            if counts[kind] != value:
                raise InternalInconsistencyError(
                    f"type ({kind}) at {ell}: decomposition gives {counts[kind]}, formula gives {value}"
                )
    return SquareCounts(point=ell, counts=counts)


def betti_from_square_counts(sc: SquareCounts) -> Dict[int, int]:
    return {
        0: sc["d"],
        1: sc["i"] + sc["j"] + sc["b"] + sc["c"],
        2: sc["a"],
    }


# ─────────────────────────────────────────────────────────────────────────────
# 4.  CURVES TO BETTI TABLES
# ─────────────────────────────────────────────────────────────────────────────


def _tally(curves: Iterable, attr: str) -> Counter:
    out = Counter()
    for curve in curves:
        for q in getattr(corners(curve.points), attr):
            out[q] += 1
    return out


def betti_from_curves(births: CurveMultiset, deaths: CurveMultiset, corner_data: CornerData) -> BettiTables:
    """
    b0 = convex(births); b1 = inner convex(deaths) + inner concave(births) +
    top-left + bottom-right; b2 = concave(deaths). Deaths are in the grades of
    M[-1,-1], which are the grades the Koszul complex reports.
    """
    b0 = _tally(births, "convex")
    b1 = _tally(deaths, "inner_convex") + _tally(births, "inner_concave")
    b1.update(Counter(corner_data.topleft))
    b1.update(Counter(corner_data.botright))
    b2 = _tally(deaths, "concave")
    return BettiTables.from_counters(b0, b1, b2)
