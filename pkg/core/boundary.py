"""
core/boundary.py
──────────────────────────────────────────────────────────────────────────────
The boundary of a bigraded module as a representation of the six-vertex-per-
grade string quiver, its decomposition into bands and the extraction of
boundary components (closed plane curve + monodromy).

Vertices are triples (kind, x, y) with kind in {r, ur, u, l, dl, d}:
    dl_i = M_i / xy M        l_i = M_i / x M        d_i = M_i / y M
    ur_i = ker(xy on M_i)    u_i = ker(y on M_i)    r_i = ker(x on M_i)

Modules:
  1.  Construction               - build_boundary with zero-composite checks
  2.  Closed curves              - grouping rule, canonical rotation
  3.  Band traversal             - band certificate, relation cores, walks, components
  4.  Spread oracle              - components of k_I from set formulas
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from functools import reduce
from math import gcd
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from core import linalg as la
from core.decomp import DEFAULT_BUDGET, QuiverRep, decompose
from core.endcurves import spread_cokerxy_set
from core.errors import InternalInconsistencyError, SizeLimitError
from core.gridmod import E1, E2, E12, Bigrade, GridModule, validate_spread

logger = logging.getLogger(__name__)

Vertex = Tuple[str, int, int]
KINDS = ("dl", "l", "d", "ur", "u", "r")

# (source kind, target kind) -> True when the S graph keeps the quiver orientation
_KEEPS_ORIENTATION: Dict[Tuple[str, str], bool] = {
    ("u", "ur"): False,
    ("r", "ur"): True,
    ("ur", "u"): False,
    ("ur", "r"): True,
    ("dl", "l"): False,
    ("dl", "d"): True,
    ("l", "dl"): False,
    ("d", "dl"): True,
    ("u", "l"): True,
    ("r", "d"): False,
}

# ─────────────────────────────────────────────────────────────────────────────
# 1.  CONSTRUCTION
# ─────────────────────────────────────────────────────────────────────────────


def _vertex(kind: str, q: Sequence[int]) -> Vertex:
    return (kind, int(q[0]), int(q[1]))


def _grade(v: Vertex) -> Bigrade:
    return Bigrade(v[1], v[2])


def build_boundary(m: GridModule) -> QuiverRep:
    """The boundary diagram of M, materialized on the vertices with nonzero spaces."""
    p = m.p
    pts = [q for q in m.points() if m.dim(q)]
    quot: Dict[Vertex, Tuple[np.ndarray, np.ndarray]] = {}
    sub: Dict[Vertex, np.ndarray] = {}
    for q in pts:
        n = m.dim(q)
        quot[_vertex("dl", q)] = la.quotient_map(m.xymap(q.minus(E12)), n, p)
        quot[_vertex("l", q)] = la.quotient_map(m.xmap(q.minus(E1)), n, p)
        quot[_vertex("d", q)] = la.quotient_map(m.ymap(q.minus(E2)), n, p)
        sub[_vertex("ur", q)] = la.kernel_basis(m.xymap(q), p)
        sub[_vertex("u", q)] = la.kernel_basis(m.ymap(q), p)
        sub[_vertex("r", q)] = la.kernel_basis(m.xmap(q), p)

    dims = {v: qs[0].shape[0] for v, qs in quot.items()}
    dims.update({v: b.shape[1] for v, b in sub.items()})
    vertices = sorted((v for v, d in dims.items() if d), key=lambda v: (v[1], v[2], KINDS.index(v[0])))
    present = set(vertices)

    arrows: List[Tuple[Vertex, Vertex]] = []
    maps: List[np.ndarray] = []

    def _add(src: Vertex, tgt: Vertex, mat: Optional[np.ndarray]):
        if src in present and tgt in present and mat is not None:
            arrows.append((src, tgt))
            maps.append(mat % p)

    def _restrict(tgt: Vertex, image: np.ndarray) -> Optional[np.ndarray]:
        if tgt not in present:
            return None
        coeff = la.solve_membership(sub[tgt], image, p)
        if coeff is None:
            raise InternalInconsistencyError(f"image does not land in the subspace at {tgt}")
        return coeff

    for q in pts:
        ur, u, r = _vertex("ur", q), _vertex("u", q), _vertex("r", q)
        dl, l, d = _vertex("dl", q), _vertex("l", q), _vertex("d", q)
        if ur in present:
            _add(u, ur, _restrict(ur, sub[u]) if u in present else None)
            _add(r, ur, _restrict(ur, sub[r]) if r in present else None)
            qx, qy = q.plus(E1), q.plus(E2)
            _add(ur, _vertex("u", qx), _restrict(_vertex("u", qx), la.matmul(m.xmap(q), sub[ur], p=p)))
            _add(ur, _vertex("r", qy), _restrict(_vertex("r", qy), la.matmul(m.ymap(q), sub[ur], p=p)))
        if dl in present:
            sec = quot[dl][1]
            _add(dl, l, la.matmul(quot[l][0], sec, p=p) if l in present else None)
            _add(dl, d, la.matmul(quot[d][0], sec, p=p) if d in present else None)
        if l in present:
            tgt = _vertex("dl", q.plus(E2))
            if tgt in present:
                _add(l, tgt, la.matmul(quot[tgt][0], m.ymap(q), quot[l][1], p=p))
        if d in present:
            tgt = _vertex("dl", q.plus(E1))
            if tgt in present:
                _add(d, tgt, la.matmul(quot[tgt][0], m.xmap(q), quot[d][1], p=p))
        if u in present and l in present:
            _add(u, l, la.matmul(quot[l][0], sub[u], p=p))
        if r in present and d in present:
            _add(r, d, la.matmul(quot[d][0], sub[r], p=p))

    rep = QuiverRep(p, vertices, arrows, {v: dims[v] for v in vertices}, maps)
    check_zero_composites(rep)
    logger.debug(f"[BOUNDARY] {len(vertices)} vertices, {len(arrows)} arrows, total dim {rep.total_dim}")
    return rep


def _arrow_lookup(rep: QuiverRep) -> Dict[Tuple[Vertex, Vertex], np.ndarray]:
    return {a: mat for a, mat in zip(rep.arrows, rep.maps)}


def check_zero_composites(rep: QuiverRep) -> None:
    """The six length-two paths forced to vanish by the construction."""
    lookup = _arrow_lookup(rep)
    for v in rep.vertices:
        kind, q = v[0], _grade(v)
        paths = []
        if kind == "u":
            paths.append((v, _vertex("ur", q), _vertex("r", q.plus(E2))))
        elif kind == "r":
            paths.append((v, _vertex("ur", q), _vertex("u", q.plus(E1))))
        elif kind == "d":
            paths.append((v, _vertex("dl", q.plus(E1)), _vertex("l", q.plus(E1))))
        elif kind == "l":
            paths.append((v, _vertex("dl", q.plus(E2)), _vertex("d", q.plus(E2))))
        elif kind == "ur":
            paths.append((v, _vertex("u", q.plus(E1)), _vertex("l", q.plus(E1))))
            paths.append((v, _vertex("r", q.plus(E2)), _vertex("d", q.plus(E2))))
        for a, b, c in paths:
            first, second = lookup.get((a, b)), lookup.get((b, c))
            if first is None or second is None:
                continue
            if la.matmul(second, first, p=rep.p).any():
                raise InternalInconsistencyError(f"composite {a} -> {b} -> {c} does not vanish")


# ─────────────────────────────────────────────────────────────────────────────
# 2.  CLOSED CURVES
# ─────────────────────────────────────────────────────────────────────────────


def canonical_rotation(curve: Sequence[Bigrade]) -> Tuple[Bigrade, ...]:
    pts = [Bigrade(*q) for q in curve]
    if not pts:
        return ()
    return min(tuple(pts[k:] + pts[:k]) for k in range(len(pts)))


def is_irreducible(curve: Sequence[Bigrade]) -> bool:
    n = len(curve)
    for period in range(1, n):
        if n % period == 0 and all(curve[i] == curve[i % period] for i in range(n)):
            return False
    return True


def is_closed_curve(curve: Sequence[Bigrade]) -> bool:
    n = len(curve)
    return all(
        abs(curve[(i + 1) % n][0] - curve[i][0]) + abs(curve[(i + 1) % n][1] - curve[i][1]) <= 1
        for i in range(n)
    )


def curve_from_visits(grades: Sequence[Bigrade]) -> Tuple[Bigrade, ...]:
    """
    Closed curve from the cyclic sequence of diagonal-vertex grades: each run
    of r equal grades contributes 1 + (r - 1) // 2 copies (one per full turn).
    """
    grades = [Bigrade(*g) for g in grades]
    if not grades:
        return ()
    if all(g == grades[0] for g in grades):
        return canonical_rotation([grades[0]] * max(len(grades) // 2, 1))
    start = next(k for k in range(len(grades)) if grades[k] != grades[k - 1])
    rotated = grades[start:] + grades[:start]
    curve: List[Bigrade] = []
    k = 0
    while k < len(rotated):
        run = 1
        while k + run < len(rotated) and rotated[k + run] == rotated[k]:
            run += 1
        curve.extend([rotated[k]] * (1 + (run - 1) // 2))
        k += run
    return canonical_rotation(curve)


class BoundaryComponent(BaseModel):
    """(gamma, T): a canonical closed curve and the invariant factors of the monodromy."""

    model_config = ConfigDict(frozen=True)

    curve: Tuple[Bigrade, ...]
    monodromy: List[List[int]]
    p: int
    transfer: Optional[List[List[int]]] = None

    def key(self):
        return (len(self.curve), self.curve, self.monodromy)

    def as_dict(self) -> dict:
        out = {
            "curve": [[q[0], q[1]] for q in self.curve],
            "monodromy": self.monodromy,
        }
        if self.transfer is not None:
            out["transfer"] = self.transfer
        return out


def components_equal(a: BoundaryComponent, b: BoundaryComponent) -> bool:
    return (
        a.p == b.p
        and canonical_rotation(a.curve) == canonical_rotation(b.curve)
        and a.monodromy == b.monodromy
    )


# ─────────────────────────────────────────────────────────────────────────────
# 3.  BAND TRAVERSAL
# ─────────────────────────────────────────────────────────────────────────────


class _Step(NamedTuple):
    """One nonzero arrow read in the direction the curve runs through it."""

    src: Vertex
    tgt: Vertex
    rank: int
    rel: Tuple[np.ndarray, np.ndarray]


def _nonzero_arrows(rep: QuiverRep):
    return [(s, t, mat) for (s, t), mat in zip(rep.arrows, rep.maps) if mat.size and mat.any()]


def _steps(rep: QuiverRep) -> List[_Step]:
    """
    Arrows with the same orientation as the curve contribute the graph of
    the map, reversed arrows the graph of its inverse relation.
    """
    p = rep.p
    out = []
    for s, t, mat in _nonzero_arrows(rep):
        r = la.rank(mat, p)
        if _KEEPS_ORIENTATION[(s[0], t[0])]:
            out.append(_Step(s, t, r, (la.identity(rep.dim(s)), mat % p)))
        else:
            out.append(_Step(t, s, r, (mat % p, la.identity(rep.dim(s)))))
    return out


# Linear relations on F_p spaces are pairs (left, right) of matrices with the
# same number of columns; column j is the pair (left[:, j], right[:, j]).


def _kernel(m: np.ndarray, p: int) -> np.ndarray:
    if m.shape[1] == 0:
        return la.zeros(0, 0)
    return la.kernel_basis(m, p)


def _basis(m: np.ndarray, p: int) -> np.ndarray:
    return la.column_basis(m % p, p)


def _intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[1] == 0:
        return la.zeros(a.shape[0], 0)
    k = _kernel(np.hstack([a, (-b) % p]), p)
    return _basis(la.matmul(a, k[: a.shape[1]], p=p), p)


def _add(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return _basis(np.hstack([a, b]), p)


def _compose(first, second, p: int):
    (a, b), (c, d) = first, second
    k = _kernel(np.hstack([b, (-c) % p]), p)
    left = la.matmul(a, k[: a.shape[1]], p=p)
    right = la.matmul(d, k[a.shape[1]:], p=p)
    stacked = _basis(np.vstack([left, right]), p)
    return stacked[: a.shape[0]], stacked[a.shape[0]:]


def _image(rel, sub: np.ndarray, p: int) -> np.ndarray:
    left, right = rel
    if left.shape[1] == 0:
        return la.zeros(right.shape[0], 0)
    k = _kernel(np.hstack([left, (-sub) % p]), p)
    return _basis(la.matmul(right, k[: left.shape[1]], p=p), p)


def _stable(rel, start: np.ndarray, p: int) -> np.ndarray:
    current = start
    while True:
        nxt = _image(rel, current, p)
        if nxt.shape[1] == current.shape[1] and _basis(np.hstack([nxt, current]), p).shape[1] == nxt.shape[1]:
            return nxt
        current = nxt


def relation_core(rel, p: int) -> Optional[np.ndarray]:
    """
    The automorphism a linear relation C on V induces on its core
    (C^inf V ∩ C^-inf V) / ((C^inf V ∩ C^-inf 0) + (C^inf 0 ∩ C^-inf V)),
    as a matrix on a basis of the core. None when the core is zero.
    """
    left, right = rel
    n = left.shape[0]
    reverse = (right, left)
    top_fwd = _stable(rel, la.identity(n), p)
    top_bwd = _stable(reverse, la.identity(n), p)
    zero_fwd = _stable(rel, la.zeros(n, 0), p)
    zero_bwd = _stable(reverse, la.zeros(n, 0), p)
    sharp = _intersect(top_fwd, top_bwd, p)
    flat = _add(_intersect(top_fwd, zero_bwd, p), _intersect(zero_fwd, top_bwd, p), p)
    if sharp.shape[1] == flat.shape[1]:
        return None
    lifted = la.extend_basis(flat, sharp, p)
    core = lifted[:, flat.shape[1]:]

    k = _kernel(np.hstack([right, (-sharp) % p]), p)
    src, tgt = la.matmul(left, k[: right.shape[1]], p=p), la.matmul(right, k[: right.shape[1]], p=p)
    x = la.solve_membership(src, core, p)
    if x is None:
        raise InternalInconsistencyError("relation core is not mapped into itself")
    coeff = la.solve_membership(lifted, la.matmul(tgt, x, p=p), p)
    if coeff is None:
        raise InternalInconsistencyError("relation core image leaves the stable part")
    return coeff[flat.shape[1]:] % p


def check_band(rep: QuiverRep) -> int:
    """
    Band certificate: every vertex is entered and left as often as its
    dimension allows (ranks of incoming and outgoing steps both sum to the
    dimension) and the support is connected. A vertex visited k times has
    dimension k * ell. Returns the gcd of the step ranks, a multiple of ell.
    """
    support = rep.support()
    if not support:
        raise InternalInconsistencyError("empty boundary summand")
    steps = _steps(rep)
    entering = {v: 0 for v in support}
    leaving = {v: 0 for v in support}
    neighbours: Dict[Vertex, List[Vertex]] = {v: [] for v in support}
    for step in steps:
        leaving[step.src] += step.rank
        entering[step.tgt] += step.rank
        neighbours[step.src].append(step.tgt)
        neighbours[step.tgt].append(step.src)
    bad = [v for v in support if not entering[v] == leaving[v] == rep.dim(v)]
    if bad:
        raise InternalInconsistencyError(
            f"vertices {bad[:3]} are not entered and left once per visit "
            f"(dims {[rep.dim(v) for v in bad[:3]]})"
        )
    seen, stack = {support[0]}, [support[0]]
    while stack:
        v = stack.pop()
        for w in neighbours[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(support):
        raise InternalInconsistencyError("boundary summand support is disconnected")
    return reduce(gcd, (step.rank for step in steps), 0)


def decompose_boundary(
    rep: QuiverRep, seed: int = 0, budget: int = DEFAULT_BUDGET, max_total_dim: Optional[int] = None
) -> List[QuiverRep]:
    if rep.total_dim == 0:
        return []
    summands = decompose(rep, seed=seed, budget=budget, max_total_dim=max_total_dim).summands
    for summand in summands:
        check_band(summand)
    return summands


MAX_BAND_WALKS = 20000


def _band_walk(band: QuiverRep, start: Vertex, steps: List[_Step], bound: int):
    """
    Closed walk from `start` using every step rank / ell times whose composite
    relation has a core of dimension ell, for the first fiber dimension ell
    dividing `bound` that admits one. Returns the visited vertices and the
    automorphism of the core.
    """
    p = band.p
    leaving: Dict[Vertex, List[int]] = {}
    for k, step in enumerate(steps):
        leaving.setdefault(step.src, []).append(k)
    n0 = band.dim(start)
    explored = 0

    for ell in (d for d in range(1, bound + 1) if bound % d == 0):
        if band.total_dim % ell:
            continue
        remaining = [step.rank // ell for step in steps]
        length = band.total_dim // ell
        walk = [start]

        def search(current: Vertex, rel, taken: int) -> Optional[np.ndarray]:
            nonlocal explored
            if taken == length:
                explored += 1
                if explored > MAX_BAND_WALKS:
                    raise SizeLimitError(f"band walk search exceeded {MAX_BAND_WALKS} closed walks")
                if current != start:
                    return None
                core = relation_core(rel, p)
                return core if core is not None and core.shape[0] == ell else None
            for k in leaving.get(current, []):
                if not remaining[k]:
                    continue
                nxt = _compose(rel, steps[k].rel, p)
                if not nxt[1].any():
                    continue
                remaining[k] -= 1
                walk.append(steps[k].tgt)
                found = search(steps[k].tgt, nxt, taken + 1)
                if found is not None:
                    return found
                walk.pop()
                remaining[k] += 1
            return None

        core = search(start, (la.identity(n0), la.identity(n0)), 0)
        if core is not None:
            return walk[:-1], core
    raise InternalInconsistencyError(f"no closed walk through the band starting at {start}")


def extract_component(band: QuiverRep, keep_transfer: bool = False) -> BoundaryComponent:
    """
    Read off (gamma, T): gamma from the diagonal vertices along the band's
    closed walk (a vertex reappears once per visit), T from the automorphism
    the walk's composite relation induces on its core.
    """
    p = band.p
    bound = check_band(band)
    diagonal = [v for v in band.support() if v[0] in ("dl", "ur")]
    if not diagonal:
        raise InternalInconsistencyError("band visits no diagonal vertex")
    start = min(diagonal, key=lambda v: (v[1], v[2], 0 if v[0] == "dl" else 1))
    walk, transfer = _band_walk(band, start, _steps(band), bound)
    logger.debug(f"[BOUNDARY] band of length {len(walk)} with fiber {transfer.shape[0]} from {start}")

    curve = curve_from_visits([_grade(v) for v in walk if v[0] in ("dl", "ur")])
    if not is_closed_curve(curve) or not is_irreducible(curve):
        raise InternalInconsistencyError(f"extracted curve {curve} is not an irreducible closed curve")
    factors = la.invariant_factors(transfer, p)
    if len(factors) != 1 or factors[0][-1] % p == 0 or len(la.factor_mod(factors[0], p)) != 1:
        raise InternalInconsistencyError(f"monodromy {factors} is not an indecomposable automorphism")
    return BoundaryComponent(
        curve=curve,
        monodromy=factors,
        p=p,
        transfer=transfer.tolist() if keep_transfer else None,
    )


def boundary_components(
    m: GridModule,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    keep_transfer: bool = False,
    max_total_dim: Optional[int] = None,
) -> List[BoundaryComponent]:
    bands = decompose_boundary(build_boundary(m), seed=seed, budget=budget, max_total_dim=max_total_dim)
    return sorted((extract_component(b, keep_transfer) for b in bands), key=BoundaryComponent.key)


def component_multisets_equal(a: Sequence[BoundaryComponent], b: Sequence[BoundaryComponent]) -> bool:
    if len(a) != len(b):
        return False
    remaining = list(b)
    for comp in a:
        match = next((k for k, other in enumerate(remaining) if components_equal(comp, other)), None)
        if match is None:
            return False
        remaining.pop(match)
    return True


# ─────────────────────────────────────────────────────────────────────────────
# 4.  SPREAD ORACLE
# ─────────────────────────────────────────────────────────────────────────────


def spread_boundary_oracle(points, p: int = la.DEFAULT_PRIME) -> BoundaryComponent:
    """
    The single component of the boundary of k_I: along the birth curve from
    its top-left end to its bottom-right end, then back along the closed
    death curve.
    """
    pts = validate_spread(points)
    born = sorted(spread_cokerxy_set(pts), key=lambda q: q.x - q.y)
    dying = sorted((a for a in pts if a.plus(E12) not in pts), key=lambda q: q.y - q.x)
    curve = curve_from_visits(born + dying)
    return BoundaryComponent(curve=curve, monodromy=[[1, (p - 1) % p]], p=p)
