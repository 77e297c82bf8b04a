"""
core/endcurves.py
──────────────────────────────────────────────────────────────────────────────
End-curves of a bigraded module: kernels / cokernels of multiplication by
x, y and xy, the corner modules, the decomposition of ephemeral modules
into spread curves and the birth / death curve multisets.

Modules:
  1.  Kernel / cokernel modules  - coker_v, ker_v for v in {x, y, xy}
  2.  Corner modules             - topleft, botright
  3.  Spread curves              - SpreadCurve, CurveMultiset, corners
  4.  Ephemeral decomposition    - decompose_ephemeral, births, deaths
  5.  Presentation algorithms    - presentation_cokerxy, presentation_kerxy
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core import linalg as la
from core.decomp import DEFAULT_BUDGET, decompose, quiver_from_grid
from core.errors import InternalInconsistencyError, InvalidSpreadError, PreconditionError
from core.gridmod import (
    E1,
    E2,
    E12,
    Bigrade,
    GridModule,
    Presentation,
    Window,
    build_module,
    dual_presentation,
    is_connected,
    is_convex,
)

logger = logging.getLogger(__name__)

# ─────────────────────────────────────────────────────────────────────────────
# 1.  KERNEL / COKERNEL MODULES
# ─────────────────────────────────────────────────────────────────────────────


def _mult(m: GridModule, v: Bigrade, q: Bigrade) -> np.ndarray:
    if v == E1:
        return m.xmap(q)
    if v == E2:
        return m.ymap(q)
    return m.xymap(q)


def coker_v(m: GridModule, v: Sequence[int]) -> GridModule:
    """M_q / v M_{q-v} on the window of M."""
    v = Bigrade(*v)
    local = {}
    for q in m.points():
        image = _mult(m, v, q.minus(v))
        local[q] = la.quotient_map(image, m.dim(q), m.p)
    dims = {q: quot.shape[0] for q, (quot, _) in local.items()}
    xmaps, ymaps = {}, {}
    for q, (_, sec) in local.items():
        for e, maps, arrow in ((E1, xmaps, m.xmap), (E2, ymaps, m.ymap)):
            tgt = q.plus(e)
            if tgt in local:
                maps[q] = la.matmul(local[tgt][0], arrow(q), sec, p=m.p)
    return build_module(m.p, m.window, dims, xmaps, ymaps)


def ker_v(m: GridModule, v: Sequence[int]) -> GridModule:
    """
    ker(v : M_{q-v} -> M_q) placed at q, i.e. as a submodule of M[-v]; the
    window moves by +v.
    """
    v = Bigrade(*v)
    window = m.window.translate(v)
    bases = {q: la.kernel_basis(_mult(m, v, q.minus(v)), m.p) for q in window.points()}
    dims = {q: b.shape[1] for q, b in bases.items()}
    xmaps, ymaps = {}, {}
    for q, basis in bases.items():
        home = q.minus(v)
        for e, maps, arrow in ((E1, xmaps, m.xmap), (E2, ymaps, m.ymap)):
            tgt = q.plus(e)
            if tgt not in bases:
                continue
            image = la.matmul(arrow(home), basis, p=m.p)
            coeff = la.solve_membership(bases[tgt], image, m.p)
            if coeff is None:
                raise InternalInconsistencyError(f"kernel of {v} is not a submodule at {q}")
            maps[q] = coeff
    return build_module(m.p, window, dims, xmaps, ymaps)


def coker_x(m: GridModule) -> GridModule:
    return coker_v(m, E1)


def coker_y(m: GridModule) -> GridModule:
    return coker_v(m, E2)


def coker_xy(m: GridModule) -> GridModule:
    return coker_v(m, E12)


def ker_x(m: GridModule) -> GridModule:
    return ker_v(m, E1)


def ker_y(m: GridModule) -> GridModule:
    return ker_v(m, E2)


def ker_xy(m: GridModule) -> GridModule:
    return ker_v(m, E12)


def xy_image(m: GridModule) -> GridModule:
    """xyM: the image of M[-1,-1] -> M, as a submodule of M."""
    bases = {q: la.column_basis(m.xymap(q.minus(E12)), m.p) for q in m.points()}
    dims = {q: b.shape[1] for q, b in bases.items()}
    xmaps, ymaps = {}, {}
    for q, basis in bases.items():
        for e, maps, arrow in ((E1, xmaps, m.xmap), (E2, ymaps, m.ymap)):
            tgt = q.plus(e)
            if tgt in bases:
                coeff = la.solve_membership(bases[tgt], la.matmul(arrow(q), basis, p=m.p), m.p)
                if coeff is None:
                    raise InternalInconsistencyError(f"xy-image is not a submodule at {q}")
                maps[q] = coeff
    return build_module(m.p, m.window, dims, xmaps, ymaps)


def is_annihilated_by(m: GridModule, v: Sequence[int]) -> bool:
    v = Bigrade(*v)
    return all(not _mult(m, v, q).any() for q in m.points())


def is_ephemeral(m: GridModule) -> bool:
    return is_annihilated_by(m, E12)


# ─────────────────────────────────────────────────────────────────────────────
# 2.  CORNER MODULES
# ─────────────────────────────────────────────────────────────────────────────


def _corner(m: GridModule, kill: Bigrade, quotient: Bigrade) -> GridModule:
    """im(ker of ``kill`` -> coker of ``quotient``) placed at q, computed inside M_{q-kill}."""
    window = m.window.translate(kill)
    dims = {}
    for q in window.points():
        home = q.minus(kill)
        ker = la.kernel_basis(_mult(m, kill, home), m.p)
        quot, _ = la.quotient_map(_mult(m, quotient, home.minus(quotient)), m.dim(home), m.p)
        dims[q] = la.rank(la.matmul(quot, ker, p=m.p), m.p) if ker.shape[1] else 0
    return build_module(m.p, window, dims, {}, {})


def topleft(m: GridModule) -> GridModule:
    """im(ker_y -> coker_x[0,-1]); semisimple."""
    return _corner(m, E2, E1)


def botright(m: GridModule) -> GridModule:
    """im(ker_x -> coker_y[-1,0]); semisimple."""
    return _corner(m, E1, E2)


def corner_points(m: GridModule) -> List[Bigrade]:
    """Multiset of grades, each repeated by its dimension."""
    return sorted(q for q in m.support() for _ in range(m.dim(q)))


class CornerData(NamedTuple):
    topleft: List[Bigrade]
    botright: List[Bigrade]


def corner_data(m: GridModule) -> CornerData:
    return CornerData(corner_points(topleft(m)), corner_points(botright(m)))


# ─────────────────────────────────────────────────────────────────────────────
# 3.  SPREAD CURVES
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SpreadCurve:
    """A thin spread: connected, convex, and never containing both q and q + (1,1)."""

    points: FrozenSet[Bigrade]

    def __post_init__(self):
        pts = frozenset(Bigrade(*q) for q in self.points)
        object.__setattr__(self, "points", pts)
        if not pts or not is_connected(pts) or not is_convex(pts):
            raise InvalidSpreadError(f"{sorted(pts)} is not a spread")
        for q in pts:
            if q.plus(E12) in pts:
                raise InvalidSpreadError(f"{sorted(pts)} is not thin at {q}")

    @classmethod
    def of(cls, points: Iterable[Sequence[int]]) -> "SpreadCurve":
        return cls(frozenset(Bigrade(*q) for q in points))

    def sorted_points(self) -> List[Bigrade]:
        return sorted(self.points)

    def shifted(self, v: Sequence[int]) -> "SpreadCurve":
        return SpreadCurve(frozenset(q.plus(v) for q in self.points))

    def __lt__(self, other: "SpreadCurve") -> bool:
        return (len(self.points), self.sorted_points()) < (len(other.points), other.sorted_points())


CurveMultiset = Tuple[SpreadCurve, ...]


def curve_multiset(curves: Iterable[SpreadCurve]) -> CurveMultiset:
    return tuple(sorted(curves))


class Corners(NamedTuple):
    convex: FrozenSet[Bigrade]
    inner_convex: FrozenSet[Bigrade]
    concave: FrozenSet[Bigrade]
    inner_concave: FrozenSet[Bigrade]


def corners(points: Iterable[Sequence[int]]) -> Corners:
    """Convex / concave corners and their inner versions, all taken inside the set."""
    pts = frozenset(Bigrade(*q) for q in points)
    return Corners(
        frozenset(i for i in pts if i.minus(E1) not in pts and i.minus(E2) not in pts),
        frozenset(i for i in pts if i.plus(E1) in pts and i.plus(E2) in pts),
        frozenset(i for i in pts if i.plus(E1) not in pts and i.plus(E2) not in pts),
        frozenset(i for i in pts if i.minus(E1) in pts and i.minus(E2) in pts),
    )


# ─────────────────────────────────────────────────────────────────────────────
# 4.  EPHEMERAL DECOMPOSITION
# ─────────────────────────────────────────────────────────────────────────────


def decompose_ephemeral(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> CurveMultiset:
    if not is_ephemeral(m):
        raise PreconditionError("module is not ephemeral: xy acts nontrivially")
    if m.is_zero():
        return ()
    dec = decompose(quiver_from_grid(m), seed=seed, budget=budget)
    curves = []
    for summand in dec.summands:
        if any(summand.dim(v) > 1 for v in summand.vertices):
            raise InternalInconsistencyError("indecomposable ephemeral summand is not thin")
        try:
            curves.append(SpreadCurve.of(summand.support()))
        except InvalidSpreadError as exc:
            raise InternalInconsistencyError(f"summand support is not a spread curve: {exc}") from exc
    return curve_multiset(curves)


def births(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> CurveMultiset:
    return decompose_ephemeral(coker_xy(m), seed, budget)


def deaths(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET, closed: bool = False) -> CurveMultiset:
    """Death curves in the grades of M[-1,-1] (open); ``closed`` moves them back by (1,1)."""
    curves = decompose_ephemeral(ker_xy(m), seed, budget)
    if closed:
        curves = curve_multiset(c.shifted((-1, -1)) for c in curves)
    return curves


def spread_cokerxy_set(points: Iterable[Sequence[int]]) -> FrozenSet[Bigrade]:
    """{a in I : a - (1,1) not in I}."""
    pts = frozenset(Bigrade(*q) for q in points)
    return frozenset(a for a in pts if a.minus(E12) not in pts)


def spread_kerxy_set(points: Iterable[Sequence[int]]) -> FrozenSet[Bigrade]:
    """{a not in I : a - (1,1) in I}."""
    pts = frozenset(Bigrade(*q) for q in points)
    return frozenset(a.plus(E12) for a in pts if a.plus(E12) not in pts)


def curves_summary(curves: CurveMultiset) -> List[List[List[int]]]:
    return [[[q.x, q.y] for q in c.sorted_points()] for c in curves]


# ─────────────────────────────────────────────────────────────────────────────
# 5.  PRESENTATION ALGORITHMS
# ─────────────────────────────────────────────────────────────────────────────


def presentation_cokerxy(pr: Presentation) -> Presentation:
    """P <- Q + P[-1,-1]: one extra relation xy * e_g at g + (1,1) per generator."""
    extra = tuple(g.plus(E12) for g in pr.gen_grades)
    mat = np.hstack([pr.mat, la.identity(pr.ngens)]) if pr.ngens else la.zeros(0, pr.nrels)
    return Presentation(pr.p, pr.gen_grades, pr.rel_grades + extra, mat)


def presentation_kerxy(pr: Presentation, window: Optional[Window] = None) -> Presentation:
    """
    Presentation of ker_xy of the module on ``window``, valid on window + (1,1):
    ker_xy M = D coker_xy((D M)[-1,-1]) with the duals taken on the matching windows.
    """
    window = window or pr.default_window()
    dual = dual_presentation(pr, window)
    lifted = presentation_cokerxy(dual).shifted((-1, -1))
    return dual_presentation(lifted, window.translate(E12))
