"""
core/gridmod.py
──────────────────────────────────────────────────────────────────────────────
Data model for bigraded k[x,y]-modules restricted to finite grid windows.

Modules:
  1.  Bigrade / Window           - points of Z² and finite segments [lo, hi]
  2.  Spread checks              - poset connectivity and convexity (any rank)
  3.  GridModule                 - dense zero-padded modules + spread modules
  4.  Presentation               - free presentations Q -> P, evaluation
  5.  Module algebra             - shift, direct sum, duality
  6.  Dual presentation          - syzygy completion and transpose
  7.  Generators                 - seeded random presentations
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core import linalg as la
from core.errors import (
    ContractViolationError,
    FieldMismatchError,
    InternalInconsistencyError,
    InvalidPresentationError,
    InvalidSpreadError,
)

logger = logging.getLogger(__name__)

# ─────────────────────────────────────────────────────────────────────────────
# 1.  BIGRADES AND WINDOWS
# ─────────────────────────────────────────────────────────────────────────────


class Bigrade(NamedTuple):
    x: int
    y: int

    def plus(self, other: Sequence[int]) -> "Bigrade":
        return Bigrade(self.x + other[0], self.y + other[1])

    def minus(self, other: Sequence[int]) -> "Bigrade":
        return Bigrade(self.x - other[0], self.y - other[1])

    def leq(self, other: Sequence[int]) -> bool:
        return self.x <= other[0] and self.y <= other[1]


E1 = Bigrade(1, 0)
E2 = Bigrade(0, 1)
E12 = Bigrade(1, 1)
ORIGIN = Bigrade(0, 0)


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(ai <= bi for ai, bi in zip(a, b))


def join(a: Sequence[int], b: Sequence[int]) -> Bigrade:
    return Bigrade(max(a[0], b[0]), max(a[1], b[1]))


@dataclass(frozen=True)
class Window:
    """The segment [lo, hi] of Z²."""

    lo: Bigrade
    hi: Bigrade

    def __post_init__(self):
        object.__setattr__(self, "lo", Bigrade(*self.lo))
        object.__setattr__(self, "hi", Bigrade(*self.hi))
        if not self.lo.leq(self.hi):
            raise ContractViolationError(f"window lower corner {self.lo} is not below {self.hi}")

    @classmethod
    def square(cls, n: int) -> "Window":
        """The n×n grid [0, n-1]²."""
        return cls(ORIGIN, Bigrade(n - 1, n - 1))

    @classmethod
    def hull(cls, points: Iterable[Sequence[int]]) -> "Window":
        pts = list(points)
        if not pts:
            return cls(ORIGIN, ORIGIN)
        return cls(
            Bigrade(min(q[0] for q in pts), min(q[1] for q in pts)),
            Bigrade(max(q[0] for q in pts), max(q[1] for q in pts)),
        )

    def points(self) -> List[Bigrade]:
        return [
            Bigrade(x, y)
            for x in range(self.lo.x, self.hi.x + 1)
            for y in range(self.lo.y, self.hi.y + 1)
        ]

    @property
    def size(self) -> int:
        return (self.hi.x - self.lo.x + 1) * (self.hi.y - self.lo.y + 1)

    def contains(self, q: Sequence[int]) -> bool:
        return self.lo.leq(q) and Bigrade(*q).leq(self.hi)

    def union(self, other: "Window") -> "Window":
        return Window(
            Bigrade(min(self.lo.x, other.lo.x), min(self.lo.y, other.lo.y)),
            join(self.hi, other.hi),
        )

    def translate(self, v: Sequence[int]) -> "Window":
        return Window(self.lo.plus(v), self.hi.plus(v))

    def reflect(self, q: Sequence[int]) -> Bigrade:
        """The order-reversing involution q -> lo + hi - q."""
        return Bigrade(self.lo.x + self.hi.x - q[0], self.lo.y + self.hi.y - q[1])


# ─────────────────────────────────────────────────────────────────────────────
# 2.  SPREAD CHECKS
# ─────────────────────────────────────────────────────────────────────────────


def unit_vectors(n: int) -> List[Tuple[int, ...]]:
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def _step(q: Sequence[int], e: Sequence[int], sign: int = 1) -> Tuple[int, ...]:
    return tuple(a + sign * b for a, b in zip(q, e))


def is_connected(points: FrozenSet[Tuple[int, ...]]) -> bool:
    """Connectivity of the Hasse diagram restricted to the set."""
    pts = set(points)
    if not pts:
        return False
    n = len(next(iter(pts)))
    units = unit_vectors(n)
    start = next(iter(pts))
    seen = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for e in units:
            for sign in (1, -1):
                nb = _step(q, e, sign)
                if nb in pts and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
    return len(seen) == len(pts)


def is_convex(points: FrozenSet[Tuple[int, ...]]) -> bool:
    """Every lattice point between two comparable members is a member."""
    pts = set(points)
    for a in pts:
        for b in pts:
            if a != b and leq(a, b):
                ranges = [range(lo, hi + 1) for lo, hi in zip(a, b)]
                for c in product(*ranges):
                    if c not in pts:
                        return False
    return True


def validate_spread(points: Iterable[Sequence[int]]) -> FrozenSet[Bigrade]:
    pts = frozenset(Bigrade(*q) for q in points)
    if not pts:
        raise InvalidSpreadError("a spread must be nonempty")
    if not is_convex(pts):
        raise InvalidSpreadError(f"{sorted(pts)} is not convex")
    if not is_connected(pts):
        raise InvalidSpreadError(f"{sorted(pts)} is not connected")
    return pts


# ─────────────────────────────────────────────────────────────────────────────
# 3.  GRID MODULES
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class GridModule:
    """
    A pointwise finite-dimensional module on a window, zero-padded outside it.
    xmaps[q] : M_q -> M_{q+(1,0)} and ymaps[q] : M_q -> M_{q+(0,1)}; any map
    leaving the window is the zero map.
    """

    p: int
    window: Window
    dims: Dict[Bigrade, int]
    xmaps: Dict[Bigrade, np.ndarray] = field(default_factory=dict)
    ymaps: Dict[Bigrade, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zero(cls, window: Window, p: int = la.DEFAULT_PRIME) -> "GridModule":
        return cls(p, window, {})

    def dim(self, q: Sequence[int]) -> int:
        q = Bigrade(*q)
        if not self.window.contains(q):
            return 0
        return self.dims.get(q, 0)

    def _arrow(self, maps: Dict[Bigrade, np.ndarray], q: Bigrade, e: Bigrade) -> np.ndarray:
        tgt = q.plus(e)
        m = maps.get(q)
        if m is None or not self.window.contains(q) or not self.window.contains(tgt):
            return la.zeros(self.dim(tgt), self.dim(q))
        return m

    def xmap(self, q: Sequence[int]) -> np.ndarray:
        return self._arrow(self.xmaps, Bigrade(*q), E1)

    def ymap(self, q: Sequence[int]) -> np.ndarray:
        return self._arrow(self.ymaps, Bigrade(*q), E2)

    def xymap(self, q: Sequence[int]) -> np.ndarray:
        q = Bigrade(*q)
        return la.matmul(self.ymap(q.plus(E1)), self.xmap(q), p=self.p)

    def structure_map(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """phi_{a,b} along the path that moves in x first, then in y."""
        a, b = Bigrade(*a), Bigrade(*b)
        if not a.leq(b):
            raise ContractViolationError(f"{a} is not below {b}")
        out = la.identity(self.dim(a))
        q = a
        while q.x < b.x:
            out = la.matmul(self.xmap(q), out, p=self.p)
            q = q.plus(E1)
        while q.y < b.y:
            out = la.matmul(self.ymap(q), out, p=self.p)
            q = q.plus(E2)
        return out

    def structure_map_yx(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """phi_{a,b} along the path that moves in y first."""
        a, b = Bigrade(*a), Bigrade(*b)
        out = la.identity(self.dim(a))
        q = a
        while q.y < b.y:
            out = la.matmul(self.ymap(q), out, p=self.p)
            q = q.plus(E2)
        while q.x < b.x:
            out = la.matmul(self.xmap(q), out, p=self.p)
            q = q.plus(E1)
        return out

    def points(self) -> List[Bigrade]:
        return self.window.points()

    def support(self) -> FrozenSet[Bigrade]:
        return frozenset(q for q, d in self.dims.items() if d > 0 and self.window.contains(q))

    @property
    def total_dim(self) -> int:
        return sum(self.dim(q) for q in self.points())

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def check(self) -> "GridModule":
        """Validate map shapes and commutativity of every square inside the window."""
        for q in self.points():
            for maps, e in ((self.xmaps, E1), (self.ymaps, E2)):
                m = self._arrow(maps, q, e)
                if m.shape != (self.dim(q.plus(e)), self.dim(q)):
                    raise ContractViolationError(f"map at {q} has shape {m.shape}")
            if self.window.contains(q.plus(E12)):
                lhs = la.matmul(self.ymap(q.plus(E1)), self.xmap(q), p=self.p)
                rhs = la.matmul(self.xmap(q.plus(E2)), self.ymap(q), p=self.p)
                if not np.array_equal(lhs, rhs):
                    raise InternalInconsistencyError(f"square at {q} does not commute")
        return self


def build_module(
    p: int,
    window: Window,
    dims: Dict[Bigrade, int],
    xmaps: Dict[Bigrade, np.ndarray],
    ymaps: Dict[Bigrade, np.ndarray],
) -> GridModule:
    """Normalize keys / entries, drop maps touching zero spaces, and validate."""
    dims = {Bigrade(*q): int(d) for q, d in dims.items() if d > 0 and window.contains(q)}

    def _clean(maps, e):
        out = {}
        for q, m in maps.items():
            q = Bigrade(*q)
            tgt = q.plus(e)
            if not (window.contains(q) and window.contains(tgt)):
                continue
            rows, cols = dims.get(tgt, 0), dims.get(q, 0)
            if rows == 0 or cols == 0:
                continue
            out[q] = la.as_mat(m, p, (rows, cols))
        return out

    return GridModule(p, window, dims, _clean(xmaps, E1), _clean(ymaps, E2)).check()


def spread_module(
    points: Iterable[Sequence[int]],
    window: Optional[Window] = None,
    p: int = la.DEFAULT_PRIME,
) -> GridModule:
    """The indicator module k_I: one dimension on I, identities inside I."""
    pts = validate_spread(points)
    window = window or Window.hull(pts)
    if not all(window.contains(q) for q in pts):
        raise ContractViolationError("spread does not fit in the window")
    dims = {q: 1 for q in pts}
    one = np.ones((1, 1), dtype=np.int64)
    xmaps = {q: one for q in pts if q.plus(E1) in pts}
    ymaps = {q: one for q in pts if q.plus(E2) in pts}
    return build_module(p, window, dims, xmaps, ymaps)


def rank_profile(m: GridModule) -> Dict[Tuple[Bigrade, Bigrade], int]:
    """Nonzero ranks of every phi_{a,b}, a <= b, including a = b (the dimensions)."""
    out = {}
    pts = sorted(m.support())
    for a in pts:
        for b in pts:
            if a.leq(b):
                r = la.rank(m.structure_map(a, b), m.p)
                if r:
                    out[(a, b)] = r
    return out


def same_rank_profile(m: GridModule, n: GridModule) -> bool:
    """Dimension functions and all structure-map ranks agree (window independent)."""
    return rank_profile(m) == rank_profile(n)


# ─────────────────────────────────────────────────────────────────────────────
# 4.  PRESENTATIONS
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Presentation:
    """
    A free presentation Q -> P -> M -> 0. Rows of ``mat`` are generators of P,
    columns are relations (generators of Q).
    """

    p: int
    gen_grades: Tuple[Bigrade, ...]
    rel_grades: Tuple[Bigrade, ...]
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gen_grades", tuple(Bigrade(*g) for g in self.gen_grades))
        object.__setattr__(self, "rel_grades", tuple(Bigrade(*r) for r in self.rel_grades))
        object.__setattr__(
            self, "mat", la.as_mat(self.mat, self.p, (len(self.gen_grades), len(self.rel_grades)))
        )
        for i, g in enumerate(self.gen_grades):
            for j, r in enumerate(self.rel_grades):
                if self.mat[i, j] and not g.leq(r):
                    raise InvalidPresentationError(
                        f"entry ({i}, {j}) is nonzero but generator grade {g} is not below relation grade {r}"
                    )

    @property
    def ngens(self) -> int:
        return len(self.gen_grades)

    @property
    def nrels(self) -> int:
        return len(self.rel_grades)

    def default_window(self) -> Window:
        grades = list(self.gen_grades) + list(self.rel_grades)
        if not grades:
            return Window(ORIGIN, ORIGIN)
        hull = Window.hull(grades)
        lo = Window.hull(self.gen_grades).lo if self.gen_grades else hull.lo
        return Window(lo, hull.hi.plus(E12))

    def shifted(self, v: Sequence[int]) -> "Presentation":
        """Presentation of M[v]: every grade moves by -v."""
        return Presentation(
            self.p,
            tuple(g.minus(v) for g in self.gen_grades),
            tuple(r.minus(v) for r in self.rel_grades),
            self.mat,
        )

    def same_as(self, other: "Presentation") -> bool:
        return (
            self.p == other.p
            and self.gen_grades == other.gen_grades
            and self.rel_grades == other.rel_grades
            and np.array_equal(self.mat, other.mat)
        )


def _pointwise_quotient(pr: Presentation, q: Bigrade):
    gens = [i for i, g in enumerate(pr.gen_grades) if g.leq(q)]
    rels = [j for j, r in enumerate(pr.rel_grades) if r.leq(q)]
    span = pr.mat[np.ix_(gens, rels)] if gens and rels else la.zeros(len(gens), len(rels))
    quot, sec = la.quotient_map(span, len(gens), pr.p)
    return gens, quot, sec


def evaluate_presentation(pr: Presentation, window: Optional[Window] = None) -> GridModule:
    """M_q = F_p^{gens <= q} / span(relations <= q), with maps induced by the identity on generators."""
    window = window or pr.default_window()
    local = {q: _pointwise_quotient(pr, q) for q in window.points()}
    dims = {q: data[1].shape[0] for q, data in local.items()}
    xmaps, ymaps = {}, {}
    for q, (gens, _, sec) in local.items():
        for e, maps in ((E1, xmaps), (E2, ymaps)):
            tgt = q.plus(e)
            if tgt not in local:
                continue
            tgens, tquot, _ = local[tgt]
            incl = la.zeros(len(tgens), len(gens))
            pos = {g: k for k, g in enumerate(tgens)}
            for k, g in enumerate(gens):
                incl[pos[g], k] = 1
            maps[q] = la.matmul(tquot, incl, sec, p=pr.p)
    return build_module(pr.p, window, dims, xmaps, ymaps)


# ─────────────────────────────────────────────────────────────────────────────
# 5.  MODULE ALGEBRA
# ─────────────────────────────────────────────────────────────────────────────


def shift(m: GridModule, v: Sequence[int]) -> GridModule:
    """(M[v])_q = M_{q+v}; the support and the window move by -v."""
    v = Bigrade(*v)
    move = lambda q: Bigrade(*q).minus(v)  # noqa: E731
    return GridModule(
        m.p,
        m.window.translate((-v.x, -v.y)),
        {move(q): d for q, d in m.dims.items()},
        {move(q): a for q, a in m.xmaps.items()},
        {move(q): a for q, a in m.ymaps.items()},
    )


def direct_sum(m: GridModule, n: GridModule) -> GridModule:
    if m.p != n.p:
        raise FieldMismatchError(f"cannot add modules over F_{m.p} and F_{n.p}")
    window = m.window.union(n.window)
    dims, xmaps, ymaps = {}, {}, {}
    for q in window.points():
        d = m.dim(q) + n.dim(q)
        if d:
            dims[q] = d
        for e, maps, getter in ((E1, xmaps, "xmap"), (E2, ymaps, "ymap")):
            tgt = q.plus(e)
            if not window.contains(tgt):
                continue
            a, b = getattr(m, getter)(q), getattr(n, getter)(q)
            block = la.zeros(m.dim(tgt) + n.dim(tgt), m.dim(q) + n.dim(q))
            block[: a.shape[0], : a.shape[1]] = a
            block[a.shape[0] :, a.shape[1] :] = b
            maps[q] = block
    return build_module(m.p, window, dims, xmaps, ymaps)


def direct_sum_all(modules: Sequence[GridModule], window: Window, p: int) -> GridModule:
    out = GridModule.zero(window, p)
    for mod in modules:
        out = direct_sum(out, mod)
    return out


def restrict_module(m: GridModule, window: Window) -> GridModule:
    """M on another window, zero-padded: spaces outside the original window are zero."""
    dims = {q: m.dim(q) for q in window.points() if m.dim(q)}
    xmaps = {q: m.xmap(q) for q in window.points() if window.contains(q.plus(E1))}
    ymaps = {q: m.ymap(q) for q in window.points() if window.contains(q.plus(E2))}
    return build_module(m.p, window, dims, xmaps, ymaps)


def dualize(m: GridModule) -> GridModule:
    """(DM)_q = (M_{s(q)})^* for the window reflection s; maps are transposes."""
    w = m.window
    dims = {w.reflect(q): d for q, d in m.dims.items()}
    xmaps, ymaps = {}, {}
    for q in w.points():
        src = w.reflect(q)
        if w.contains(q.plus(E1)):
            xmaps[q] = m.xmap(src.minus(E1)).T.copy()
        if w.contains(q.plus(E2)):
            ymaps[q] = m.ymap(src.minus(E2)).T.copy()
    return build_module(m.p, w, dims, xmaps, ymaps)


# ─────────────────────────────────────────────────────────────────────────────
# 6.  DUAL PRESENTATION
# ─────────────────────────────────────────────────────────────────────────────


def clip_presentation(pr: Presentation, window: Window) -> Presentation:
    """
    Presentation of the zero-padded restriction of coker(pr) to the window:
    generators above the window are dropped, kill relations are added just
    past the upper edges where a generator would otherwise survive.
    """
    if not all(window.lo.leq(g) for g in pr.gen_grades):
        raise ContractViolationError("every generator must lie above the window's lower corner")
    keep = [i for i, g in enumerate(pr.gen_grades) if g.leq(window.hi)]
    gens = [pr.gen_grades[i] for i in keep]
    inside = [j for j, r in enumerate(pr.rel_grades) if r.leq(window.hi)]
    rels = [pr.rel_grades[j] for j in inside]
    cols = [pr.mat[keep, j] for j in inside]

    def _span_at(q):
        idx = [j for j, r in enumerate(rels) if r.leq(q)]
        if not idx:
            return la.zeros(len(gens), 0)
        return np.stack([cols[j] for j in idx], axis=1)

    for i, g in enumerate(gens):
        unit = la.zeros(len(gens), 1)
        unit[i, 0] = 1
        for edge in (Bigrade(window.hi.x + 1, g.y), Bigrade(g.x, window.hi.y + 1)):
            if la.solve_membership(_span_at(edge), unit, pr.p) is None:
                rels.append(edge)
                cols.append(unit[:, 0].copy())
    mat = np.stack(cols, axis=1) if cols else la.zeros(len(gens), 0)
    return Presentation(pr.p, tuple(gens), tuple(rels), mat)


def syzygies(pr: Presentation) -> Tuple[Tuple[Bigrade, ...], np.ndarray]:
    """
    Minimal generators of ker(Q -> P). Candidate grades are joins of relation
    grades, scanned by (x + y, x); at each one the pointwise kernel is extended
    by whatever the earlier generators below it do not already span.
    """
    p = pr.p
    xs = sorted({r.x for r in pr.rel_grades})
    ys = sorted({r.y for r in pr.rel_grades})
    candidates = sorted((Bigrade(x, y) for x in xs for y in ys), key=lambda c: (c.x + c.y, c.x))
    grades: List[Bigrade] = []
    vectors: List[np.ndarray] = []
    for c in candidates:
        active = [j for j, r in enumerate(pr.rel_grades) if r.leq(c)]
        if not active:
            continue
        ker = la.kernel_basis(pr.mat[:, active], p)
        if ker.shape[1] == 0:
            continue
        full = la.zeros(pr.nrels, ker.shape[1])
        full[active] = ker
        earlier = [v for g, v in zip(grades, vectors) if g.leq(c)]
        base = np.stack(earlier, axis=1) if earlier else la.zeros(pr.nrels, 0)
        extended = la.extend_basis(base, full, p)
        for k in range(base.shape[1], extended.shape[1]):
            grades.append(c)
            vectors.append(extended[:, k].copy())
    mat = np.stack(vectors, axis=1) if vectors else la.zeros(pr.nrels, 0)
    return tuple(grades), mat


def dual_presentation(pr: Presentation, window: Optional[Window] = None) -> Presentation:
    """
    Presentation of D(coker pr) on the window: complete to 0 -> R -> Q -> P,
    transpose R -> Q and reflect grades through c = lo + hi + (1,1).
    """
    window = window or pr.default_window()
    clipped = clip_presentation(pr, window)
    syz_grades, syz_mat = syzygies(clipped)
    if len(syz_grades) > clipped.nrels:
        raise InternalInconsistencyError("second syzygy has more generators than the relations")
    c = window.lo.plus(window.hi).plus(E12)
    logger.debug(f"[DUAL] |P|={clipped.ngens} |Q|={clipped.nrels} |R|={len(syz_grades)}")
    return Presentation(
        pr.p,
        tuple(c.minus(r) for r in syz_grades),
        tuple(c.minus(q) for q in clipped.rel_grades),
        syz_mat.T.copy(),
    )


# ─────────────────────────────────────────────────────────────────────────────
# 7.  GENERATORS
# ─────────────────────────────────────────────────────────────────────────────


def random_presentation(
    ngens: int,
    nrels: int,
    window: Window,
    seed: int,
    p: int = la.DEFAULT_PRIME,
    finite_support: bool = False,
) -> Presentation:
    """Seeded presentation with grades uniform in the window; grade-compatible by construction."""
    rng = np.random.default_rng(seed)
    pts = window.points()
    gens = [pts[int(k)] for k in rng.integers(0, len(pts), size=ngens)]
    rels: List[Bigrade] = []
    cols: List[np.ndarray] = []
    for _ in range(nrels if ngens else 0):
        r = pts[int(rng.integers(0, len(pts)))]
        col = rng.integers(0, p, size=ngens, dtype=np.int64)
        for i, g in enumerate(gens):
            if not g.leq(r):
                col[i] = 0
        rels.append(r)
        cols.append(col)
    if finite_support:
        for i, g in enumerate(gens):
            for edge in (Bigrade(window.hi.x, g.y), Bigrade(g.x, window.hi.y)):
                col = np.zeros(ngens, dtype=np.int64)
                col[i] = 1
                rels.append(edge)
                cols.append(col)
    mat = np.stack(cols, axis=1) if cols else la.zeros(ngens, 0)
    return Presentation(p, tuple(gens), tuple(rels), mat)


def random_module(
    window: Window,
    seed: int,
    p: int = la.DEFAULT_PRIME,
    max_gens: int = 3,
    max_rels: int = 4,
) -> GridModule:
    """Evaluation of a random presentation on the window (so finitely supported there)."""
    rng = np.random.default_rng(seed)
    ngens = int(rng.integers(1, max_gens + 1))
    nrels = int(rng.integers(0, max_rels + 1))
    pr = random_presentation(ngens, nrels, window, seed=int(rng.integers(0, 2**31)), p=p)
    return evaluate_presentation(pr, window)
