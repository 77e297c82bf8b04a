"""
core/oneparam.py
──────────────────────────────────────────────────────────────────────────────
One-parameter persistence modules: bar counts, barcodes and restrictions of
two-parameter modules along monotone paths.
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core import linalg as la
from core.errors import ContractViolationError, InternalInconsistencyError
from core.gridmod import Bigrade, GridModule

logger = logging.getLogger(__name__)

Interval = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class LineModule:
    """A graded k[z]-module on the integer range [start, stop]; zmaps[i] : A_i -> A_{i+1}."""

    p: int
    start: int
    stop: int
    dims: Dict[int, int]
    zmaps: Dict[int, np.ndarray] = field(default_factory=dict)

    def dim(self, i: int) -> int:
        if i < self.start or i > self.stop:
            return 0
        return self.dims.get(i, 0)

    def zmap(self, i: int) -> np.ndarray:
        m = self.zmaps.get(i)
        if m is None or i < self.start or i >= self.stop:
            return la.zeros(self.dim(i + 1), self.dim(i))
        return m

    @property
    def total_dim(self) -> int:
        return sum(self.dim(i) for i in range(self.start, self.stop + 1))


def line_module(p: int, dims: Sequence[int], zmaps: Sequence, start: int = 0) -> LineModule:
    """Build from a dimension list and the len(dims) - 1 consecutive maps."""
    if len(zmaps) != max(len(dims) - 1, 0):
        raise ContractViolationError("need one map between each pair of consecutive degrees")
    ds = {start + i: int(d) for i, d in enumerate(dims)}
    maps = {}
    for i, m in enumerate(zmaps):
        maps[start + i] = la.as_mat(m, p, (ds[start + i + 1], ds[start + i]))
    return LineModule(p, start, start + max(len(dims) - 1, 0), ds, maps)


def interval_module(bars: Sequence[Interval], p: int = la.DEFAULT_PRIME) -> LineModule:
    """Direct sum of k_[b, d) over the given half-open bars."""
    if not bars:
        return LineModule(p, 0, 0, {})
    start = min(b for b, _ in bars)
    stop = max(d for _, d in bars)
    dims = {i: sum(1 for b, d in bars if b <= i < d) for i in range(start, stop + 1)}
    zmaps = {}
    for i in range(start, stop):
        src = [k for k, (b, d) in enumerate(bars) if b <= i < d]
        tgt = [k for k, (b, d) in enumerate(bars) if b <= i + 1 < d]
        m = la.zeros(len(tgt), len(src))
        for c, k in enumerate(src):
            if k in tgt:
                m[tgt.index(k), c] = 1
        zmaps[i] = m
    return LineModule(p, start, stop, dims, zmaps)


def bar_count(a: LineModule) -> int:
    """dim A - dim zA."""
    ranks = sum(la.rank(a.zmap(i), a.p) for i in range(a.start, a.stop))
    return a.total_dim - ranks


def barcode(a: LineModule) -> List[Interval]:
    """
    Half-open bars [b, d). Tracks a basis of each degree adapted to the
    image filtration: vectors born at b survive while their images stay
    independent of older classes (elder rule on the image chain).
    """
    p = a.p
    bars: List[Interval] = []
    # alive: list of (birth, column vector) in the current degree, ordered oldest first
    alive: List[Tuple[int, np.ndarray]] = []
    for i in range(a.start, a.stop + 1):
        d = a.dim(i)
        basis = np.stack([v for _, v in alive], axis=1) if alive else la.zeros(d, 0)
        born = la.extend_basis(basis, la.identity(d), p)[:, basis.shape[1] :]
        alive = alive + [(i, born[:, k].copy()) for k in range(born.shape[1])]
        if i == a.stop:
            break
        zm = a.zmap(i)
        # elder rule: reduce images against older survivors; the youngest dependent class dies
        nxt: List[Tuple[int, np.ndarray]] = []
        span = la.zeros(a.dim(i + 1), 0)
        for b, v in sorted(alive, key=lambda bv: bv[0]):
            w = la.matmul(zm, v.reshape(-1, 1), p=p)
            trial = np.hstack([span, w])
            if la.rank(trial, p) > span.shape[1]:
                span = trial
                nxt.append((b, w[:, 0].copy()))
            else:
                bars.append((b, i + 1))
        alive = nxt
    bars.extend((b, a.stop + 1) for b, _ in alive)
    return sorted(bars)


# ─────────────────────────────────────────────────────────────────────────────
# SLICES
# ─────────────────────────────────────────────────────────────────────────────


def check_slice_path(points: Sequence[Sequence[int]]) -> List[Bigrade]:
    pts = [Bigrade(*q) for q in points]
    for a, b in zip(pts, pts[1:]):
        if not a.leq(b) or a == b:
            raise ContractViolationError(f"slice path is not strictly increasing at {a} -> {b}")
    return pts


def diagonal_path(m: GridModule, offset: Tuple[int, int] = (0, 0)) -> List[Bigrade]:
    lo, hi = m.window.lo, m.window.hi
    start = lo.plus(offset)
    n = min(hi.x - start.x, hi.y - start.y)
    return [Bigrade(start.x + k, start.y + k) for k in range(n + 1)]


def slice_module(m: GridModule, path: Sequence[Sequence[int]]) -> LineModule:
    """Restriction of M along a monotone injective path, indexed 0..len-1."""
    pts = check_slice_path(path)
    for q in pts:
        if not m.window.contains(q):
            raise ContractViolationError(f"slice point {q} is outside the window")
    if not pts:
        return LineModule(m.p, 0, 0, {})
    dims = {i: m.dim(q) for i, q in enumerate(pts)}
    zmaps = {}
    for i, (a, b) in enumerate(zip(pts, pts[1:])):
        xy = m.structure_map(a, b)
        yx = m.structure_map_yx(a, b)
        if not np.array_equal(xy, yx):
            raise InternalInconsistencyError(f"structure map {a}->{b} depends on the path")
        zmaps[i] = xy
    return LineModule(m.p, 0, len(pts) - 1, dims, zmaps)
