"""
ingest/bifiltration.py
──────────────────────────────────────────────────────────────────────────────
Bifiltered simplicial complexes and their homology modules.

    field p=2
    simplex 0 @ 0 0
    simplex 1 @ 1 0
    simplex 0 1 @ 1 1

Modules:
  1.  Bifiltration               - validated complex with monotone grades
  2.  Parsing / generation       - parse_bifiltration, random_bifiltration
  3.  Homology                   - H_i at every grade, induced maps
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from core import linalg as la
from core.errors import InternalInconsistencyError, InvalidBifiltrationError, ParseError
from core.gridmod import E1, E2, Bigrade, GridModule, Window, build_module, join
from ingest.formats import _field_header, _grade, _ints, _lines

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

# ─────────────────────────────────────────────────────────────────────────────
# 1.  BIFILTRATION
# ─────────────────────────────────────────────────────────────────────────────


class Bifiltration(BaseModel):
    """A finite simplicial complex with a grade per simplex, monotone under faces."""

    model_config = ConfigDict(frozen=True)

    simplices: Tuple[Simplex, ...]
    grades: Tuple[Bigrade, ...]
    p: Optional[int] = None

    @classmethod
    def of(cls, simplices, grades, p: Optional[int] = None) -> "Bifiltration":
        """Validated constructor: faces present, grades monotone."""
        bf = cls(simplices=tuple(tuple(s) for s in simplices), grades=tuple(Bigrade(*g) for g in grades), p=p)
        bf.check()
        return bf

    def check(self) -> "Bifiltration":
        if len(self.simplices) != len(self.grades):
            raise InvalidBifiltrationError("every simplex needs exactly one grade")
        index: Dict[Simplex, Bigrade] = {}
        for s, g in zip(self.simplices, self.grades):
            if not s or list(s) != sorted(set(s)):
                raise InvalidBifiltrationError(f"simplex {s} must list distinct vertices in increasing order")
            if s in index:
                raise InvalidBifiltrationError(f"simplex {s} is listed twice")
            index[s] = Bigrade(*g)
        for s, g in index.items():
            for face in combinations(s, len(s) - 1):
                if not face:
                    continue
                if face not in index:
                    raise InvalidBifiltrationError(f"face {face} of {s} is missing")
                if not index[face].leq(g):
                    raise InvalidBifiltrationError(
                        f"face {face} enters at {tuple(index[face])}, after its coface {s} at {tuple(g)}"
                    )
        return self

    def grade_of(self) -> Dict[Simplex, Bigrade]:
        return {s: Bigrade(*g) for s, g in zip(self.simplices, self.grades)}

    def of_dim(self, k: int) -> List[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def count(self, k: int) -> int:
        return len(self.of_dim(k))

    def hull(self) -> Window:
        return Window.hull(self.grades)


# ─────────────────────────────────────────────────────────────────────────────
# 2.  PARSING / GENERATION
# ─────────────────────────────────────────────────────────────────────────────


def parse_bifiltration(text: str) -> Bifiltration:
    declared = None
    simplices: List[Simplex] = []
    grades: List[Bigrade] = []
    for line, tokens in _lines(text):
        head = tokens[0]
        if head == "field":
            declared = _field_header(tokens, line)
            continue
        if head != "simplex":
            raise ParseError(f"expected 'simplex v1 .. vk @ x y', got {head!r}", line)
        if "@" not in tokens:
            raise ParseError("simplex line is missing '@ x y'", line)
        split = tokens.index("@")
        vertices = _ints(tokens[1:split], line, "simplex vertices")
        if not vertices:
            raise ParseError("simplex has no vertices", line)
        simplices.append(tuple(sorted(vertices)))
        grades.append(_grade(tokens[split + 1 :], line))
    bf = Bifiltration.of(simplices, grades, p=declared)
    logger.debug(f"[INGEST] bifiltration with {len(simplices)} simplices")
    return bf


def serialize_bifiltration(bf: Bifiltration) -> str:
    out = [f"field p={bf.p}"] if bf.p else []
    for s, g in sorted(zip(bf.simplices, bf.grades), key=lambda sg: (len(sg[0]), sg[0])):
        out.append(f"simplex {' '.join(map(str, s))} @ {g[0]} {g[1]}")
    return "\n".join(out) + "\n"


def random_bifiltration(
    nvertices: int, window: Window, seed: int, edge_prob: float = 0.6, max_dim: int = 2
) -> Bifiltration:
    """Seeded flag-like complex: each simplex enters at the join of its facets plus a random step."""
    rng = np.random.default_rng(seed)
    span = window.hi.minus(window.lo)
    grade: Dict[Simplex, Bigrade] = {}
    for v in range(nvertices):
        grade[(v,)] = window.lo.plus((int(rng.integers(0, span.x + 1)), int(rng.integers(0, span.y + 1))))
    for k in range(1, max_dim + 1):
        for s in combinations(range(nvertices), k + 1):
            facets = list(combinations(s, k))
            if not all(f in grade for f in facets) or rng.random() > edge_prob:
                continue
            g = grade[facets[0]]
            for f in facets[1:]:
                g = join(g, grade[f])
            step = (int(rng.integers(0, 2)), int(rng.integers(0, 2)))
            grade[s] = Bigrade(min(g.x + step[0], window.hi.x), min(g.y + step[1], window.hi.y))
    simplices = tuple(sorted(grade, key=lambda s: (len(s), s)))
    return Bifiltration.of(simplices, [grade[s] for s in simplices])


# ─────────────────────────────────────────────────────────────────────────────
# 3.  HOMOLOGY
# ─────────────────────────────────────────────────────────────────────────────


def boundary_matrix(bf: Bifiltration, k: int, p: int) -> np.ndarray:
    """d_k : C_k -> C_{k-1} in the sorted simplex bases; d_0 is the zero map to C_{-1} = 0."""
    cols = bf.of_dim(k)
    if k == 0:
        return la.zeros(0, len(cols))
    rows = {s: i for i, s in enumerate(bf.of_dim(k - 1))}
    mat = la.zeros(len(rows), len(cols))
    for j, s in enumerate(cols):
        for drop in range(len(s)):
            face = s[:drop] + s[drop + 1 :]
            mat[rows[face], j] = (-1) ** drop % p
    return mat


class _LocalHomology:
    """Cycle basis Z (full chain coordinates), quotient map onto H and class representatives."""

    def __init__(self, cycles: np.ndarray, quot: np.ndarray, reps: np.ndarray):
        self.cycles = cycles
        self.quot = quot
        self.reps = reps

    @property
    def dim(self) -> int:
        return self.quot.shape[0]


def _local_homology(
    q: Bigrade, degree: int, d_k: np.ndarray, d_up: np.ndarray, active_k: List[int], active_up: List[int], p: int
) -> _LocalHomology:
    n = d_k.shape[1]
    local = la.kernel_basis(d_k[:, active_k], p) if active_k else la.zeros(0, 0)
    cycles = la.zeros(n, local.shape[1])
    if active_k:
        cycles[active_k] = local
    bounds = la.column_basis(d_up[:, active_up], p) if active_up else la.zeros(n, 0)
    coords = la.solve_membership(cycles, bounds, p)
    if coords is None:
        raise InternalInconsistencyError(f"boundaries are not cycles at {tuple(q)} in degree {degree}")
    quot, sec = la.quotient_map(coords, cycles.shape[1], p)
    return _LocalHomology(cycles, quot, la.matmul(cycles, sec, p=p))


def homology_module(
    bf: Bifiltration,
    degree: int,
    window: Optional[Window] = None,
    p: int = la.DEFAULT_PRIME,
    workers: int = 1,
) -> GridModule:
    """H_degree of the sublevel complexes {s : grade(s) <= q} for q in the window."""
    if degree < 0:
        raise InvalidBifiltrationError("homological degree must be nonnegative")
    bf.check()
    window = window or bf.hull()
    grade = bf.grade_of()
    cells, ups = bf.of_dim(degree), bf.of_dim(degree + 1)
    d_k = boundary_matrix(bf, degree, p)
    d_up = boundary_matrix(bf, degree + 1, p) if ups else la.zeros(len(cells), 0)

    def _at(q: Bigrade) -> _LocalHomology:
        active_k = [i for i, s in enumerate(cells) if grade[s].leq(q)]
        active_up = [j for j, s in enumerate(ups) if grade[s].leq(q)]
        return _local_homology(q, degree, d_k, d_up, active_k, active_up, p)

    points = window.points()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            local = dict(zip(points, pool.map(_at, points)))
    else:
        local = {q: _at(q) for q in points}

    xmaps, ymaps = {}, {}
    for q, here in local.items():
        for e, maps in ((E1, xmaps), (E2, ymaps)):
            tgt = q.plus(e)
            if tgt not in local or not here.dim or not local[tgt].dim:
                continue
            there = local[tgt]
            coords = la.solve_membership(there.cycles, here.reps, p)
            if coords is None:
                raise InternalInconsistencyError(f"cycles at {tuple(q)} are not cycles at {tuple(tgt)}")
            maps[q] = la.matmul(there.quot, coords, p=p)
    dims = {q: h.dim for q, h in local.items()}
    logger.debug(f"[HOMOLOGY] H_{degree} on {window.size} grades, total dim {sum(dims.values())}")
    return build_module(p, window, dims, xmaps, ymaps)


def generator_bound(bf: Bifiltration, degree: int) -> int:
    return bf.count(degree)
