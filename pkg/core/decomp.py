"""
core/decomp.py
──────────────────────────────────────────────────────────────────────────────
Decomposition of finite-dimensional quiver / grid representations into
indecomposables through their endomorphism algebras.

Modules:
  1.  QuiverRep                  - vertices, arrows, spaces and maps
  2.  Hom spaces                 - hom_basis / endomorphism_basis
  3.  Fitting splitting          - ker(eta^N) + im(eta^N)
  4.  Local certificates         - trace-form radical, residue field test
  5.  decompose                  - recursive splitting with seeded draws
  6.  Grid helpers               - grid <-> quiver, spread decomposability
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from core import linalg as la
from core.errors import (
    ContractViolationError,
    DecompositionIncompleteError,
    FieldTooSmallError,
    InternalInconsistencyError,
    SizeLimitError,
)
from core.gridmod import E1, E2, Bigrade, GridModule, build_module, validate_spread

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 64
DEFAULT_MAX_TOTAL_DIM = 96

_size_cap = DEFAULT_MAX_TOTAL_DIM

Vertex = Hashable
Endo = Dict[Vertex, np.ndarray]

# ─────────────────────────────────────────────────────────────────────────────
# 1.  QUIVER REPRESENTATIONS
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(eq=False)
class QuiverRep:
    """
    A representation of a finite quiver. ``maps[k]`` is the matrix of arrow
    ``arrows[k] = (source, target)``; relations are properties of the data.
    """

    p: int
    vertices: List[Vertex]
    arrows: List[Tuple[Vertex, Vertex]]
    dims: Dict[Vertex, int]
    maps: List[np.ndarray]

    def __post_init__(self):
        if len(self.arrows) != len(self.maps):
            raise ContractViolationError("every arrow needs exactly one matrix")
        for (s, t), m in zip(self.arrows, self.maps):
            if m.shape != (self.dim(t), self.dim(s)):
                raise ContractViolationError(f"arrow {s}->{t} has shape {m.shape}")

    def dim(self, v: Vertex) -> int:
        return self.dims.get(v, 0)

    @property
    def total_dim(self) -> int:
        return sum(self.dim(v) for v in self.vertices)

    def support(self) -> List[Vertex]:
        return [v for v in self.vertices if self.dim(v) > 0]

    def dim_vector(self) -> Tuple[int, ...]:
        return tuple(self.dim(v) for v in self.vertices)

    def restrict(self, bases: Dict[Vertex, np.ndarray]) -> "QuiverRep":
        """
        Subrepresentation spanned by the given per-vertex column bases.
        Raises if some arrow does not map a basis into the next one.
        """
        maps = []
        for (s, t), m in zip(self.arrows, self.maps):
            image = la.matmul(m, bases[s], p=self.p)
            coeff = la.solve_membership(bases[t], image, self.p)
            if coeff is None:
                raise InternalInconsistencyError(f"subspace is not stable under arrow {s}->{t}")
            maps.append(coeff)
        dims = {v: bases[v].shape[1] for v in self.vertices}
        return QuiverRep(self.p, list(self.vertices), list(self.arrows), dims, maps)


@dataclass
class Decomposition:
    """Summands plus, per summand, the basis of its image in each ambient space."""

    ambient: QuiverRep
    summands: List[QuiverRep] = field(default_factory=list)
    embeddings: List[Dict[Vertex, np.ndarray]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.summands)

    def dim_vectors(self) -> List[Tuple[int, ...]]:
        return sorted(s.dim_vector() for s in self.summands)

    def verify(self) -> "Decomposition":
        """Base change per vertex is invertible and every arrow is block-diagonal."""
        amb, p = self.ambient, self.ambient.p
        change = {}
        for v in amb.vertices:
            cols = [e[v] for e in self.embeddings if e[v].shape[1]]
            base = np.hstack(cols) if cols else la.zeros(amb.dim(v), 0)
            if base.shape != (amb.dim(v), amb.dim(v)) or la.rank(base, p) != amb.dim(v):
                raise InternalInconsistencyError(f"summand bases do not span the space at {v}")
            change[v] = base
        for k, ((s, t), m) in enumerate(zip(amb.arrows, amb.maps)):
            local = la.matmul(la.inverse(change[t], p), m, change[s], p=p)
            expected = la.zeros(amb.dim(t), amb.dim(s))
            r = c = 0
            for summand in self.summands:
                block = summand.maps[k]
                expected[r : r + block.shape[0], c : c + block.shape[1]] = block
                r += block.shape[0]
                c += block.shape[1]
            if not np.array_equal(local, expected):
                raise InternalInconsistencyError(f"arrow {s}->{t} is not block-diagonal")
        return self


# ─────────────────────────────────────────────────────────────────────────────
# 2.  HOM SPACES
# ─────────────────────────────────────────────────────────────────────────────


def set_size_cap(cap: int) -> None:
    """Process-wide cap on the total dimension of anything we take Hom spaces of."""
    global _size_cap
    if cap <= 0:
        raise ContractViolationError(f"size cap must be positive, got {cap}")
    _size_cap = cap


def size_cap() -> int:
    return _size_cap


def hom_basis(x: QuiverRep, y: QuiverRep, max_total_dim: Optional[int] = None) -> List[Endo]:
    """Basis of Hom(X, Y): families phi_v with Y_a phi_s = phi_t X_a for every arrow."""
    max_total_dim = max_total_dim or _size_cap
    if x.p != y.p:
        raise ContractViolationError("representations live over different fields")
    if max(x.total_dim, y.total_dim) > max_total_dim:
        raise SizeLimitError(f"total dimension exceeds the cap of {max_total_dim}")
    p = x.p
    offsets, n = {}, 0
    for v in x.vertices:
        offsets[v] = n
        n += y.dim(v) * x.dim(v)
    if n == 0:
        return []
    blocks = []
    for (s, t), xa, ya in zip(x.arrows, x.maps, y.maps):
        rows = y.dim(t) * x.dim(s)
        if rows == 0:
            continue
        eq = la.zeros(rows, n)
        if y.dim(s) * x.dim(s):
            eq[:, offsets[s] : offsets[s] + y.dim(s) * x.dim(s)] += np.kron(ya, la.identity(x.dim(s)))
        if y.dim(t) * x.dim(t):
            eq[:, offsets[t] : offsets[t] + y.dim(t) * x.dim(t)] -= np.kron(la.identity(y.dim(t)), xa.T)
        blocks.append(eq % p)
    system = np.vstack(blocks) if blocks else la.zeros(0, n)
    ker = la.kernel_basis(system, p)
    out = []
    for j in range(ker.shape[1]):
        phi = {}
        for v in x.vertices:
            size = y.dim(v) * x.dim(v)
            phi[v] = ker[offsets[v] : offsets[v] + size, j].reshape(y.dim(v), x.dim(v)).copy()
        out.append(phi)
    return out


def endomorphism_basis(x: QuiverRep, max_total_dim: Optional[int] = None) -> List[Endo]:
    return hom_basis(x, x, max_total_dim)


def compose(a: Endo, b: Endo, p: int) -> Endo:
    return {v: la.matmul(a[v], b[v], p=p) for v in a}


def combine(basis: Sequence[Endo], coeffs: Sequence[int], x: QuiverRep) -> Endo:
    out = {v: la.zeros(x.dim(v), x.dim(v)) for v in x.vertices}
    for c, phi in zip(coeffs, basis):
        for v in x.vertices:
            out[v] = (out[v] + int(c) * phi[v]) % x.p
    return out


def block_matrix(x: QuiverRep, eta: Endo) -> np.ndarray:
    """The endomorphism as one square matrix on the total space."""
    out = la.zeros(x.total_dim, x.total_dim)
    k = 0
    for v in x.vertices:
        d = x.dim(v)
        out[k : k + d, k : k + d] = eta[v]
        k += d
    return out


# ─────────────────────────────────────────────────────────────────────────────
# 3.  FITTING SPLITTING
# ─────────────────────────────────────────────────────────────────────────────


def fitting_split(
    x: QuiverRep, eta: Endo
) -> Optional[Tuple[Tuple[QuiverRep, Dict[Vertex, np.ndarray]], Tuple[QuiverRep, Dict[Vertex, np.ndarray]]]]:
    """
    X = ker(eta^N) + im(eta^N) for N = total dim. Returns both factors with
    their embeddings, or None when eta is nilpotent or invertible.
    """
    n = max(x.total_dim, 1)
    power = {v: la.matrix_power(eta[v], n, x.p) for v in x.vertices}
    ker = {v: la.kernel_basis(power[v], x.p) for v in x.vertices}
    img = {v: la.column_basis(power[v], x.p) for v in x.vertices}
    if all(ker[v].shape[1] == 0 for v in x.vertices):
        return None
    if all(img[v].shape[1] == 0 for v in x.vertices):
        return None
    return (x.restrict(ker), ker), (x.restrict(img), img)


# ─────────────────────────────────────────────────────────────────────────────
# 4.  LOCAL CERTIFICATES
# ─────────────────────────────────────────────────────────────────────────────


def semisimple_quotient_dim(x: QuiverRep, basis: Sequence[Endo]) -> int:
    """
    dim E / rad E via the trace form (a, b) -> tr_X(a b); its kernel is the
    radical once p exceeds the total dimension.
    """
    k = len(basis)
    gram = la.zeros(k, k)
    for i in range(k):
        for j in range(k):
            prod = compose(basis[i], basis[j], x.p)
            gram[i, j] = sum(int(np.trace(prod[v])) for v in x.vertices) % x.p
    return la.rank(gram, x.p)


def _residue_field_certificate(
    x: QuiverRep, basis: Sequence[Endo], quotient_dim: int, rng: np.random.Generator, budget: int
) -> bool:
    """E / rad E is a field iff some element has characteristic polynomial f^m, f irreducible of full degree."""
    for _ in range(budget):
        eta = combine(basis, la.random_matrix(rng, 1, len(basis), x.p)[0], x)
        factors = la.factor_mod(la.charpoly(block_matrix(x, eta), x.p), x.p)
        if len(factors) == 1 and len(factors[0][0]) - 1 == quotient_dim:
            return True
    return False


def _try_split(x: QuiverRep, basis: Sequence[Endo], rng: np.random.Generator, budget: int):
    for eta in basis:
        split = fitting_split(x, eta)
        if split is not None:
            return split
    for _ in range(budget):
        eta = combine(basis, la.random_matrix(rng, 1, len(basis), x.p)[0], x)
        factors = la.factor_mod(la.charpoly(block_matrix(x, eta), x.p), x.p)
        if len(factors) < 2:
            continue
        poly, mult = factors[0]
        psi = {v: la.matrix_power(la.poly_of_matrix(poly, eta[v], x.p), mult, x.p) for v in x.vertices}
        split = fitting_split(x, psi)
        if split is not None:
            return split
    return None


# ─────────────────────────────────────────────────────────────────────────────
# 5.  DECOMPOSE
# ─────────────────────────────────────────────────────────────────────────────


def _decompose(x: QuiverRep, rng: np.random.Generator, budget: int, max_total_dim: Optional[int]):
    if x.total_dim == 0:
        return []
    ident = {v: la.identity(x.dim(v)) for v in x.vertices}
    basis = endomorphism_basis(x, max_total_dim)
    if len(basis) == 1:
        return [(x, ident)]
    quotient_dim = semisimple_quotient_dim(x, basis)
    if quotient_dim == 1:
        return [(x, ident)]
    split = _try_split(x, basis, rng, budget)
    if split is None:
        if _residue_field_certificate(x, basis, quotient_dim, rng, budget):
            return [(x, ident)]
        raise DecompositionIncompleteError(
            f"no splitting endomorphism and no local certificate after {budget} draws "
            f"(dim End = {len(basis)}, dim End/rad = {quotient_dim})"
        )
    logger.debug(f"[DECOMP] split total dim {x.total_dim} into {[part.total_dim for part, _ in split]}")
    out = []
    for part, emb in split:
        for summand, sub in _decompose(part, rng, budget, max_total_dim):
            out.append((summand, {v: la.matmul(emb[v], sub[v], p=x.p) for v in x.vertices}))
    return out


def decompose(
    x: QuiverRep,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    max_total_dim: Optional[int] = None,
) -> Decomposition:
    """
    Split X into indecomposables. Each summand comes with a local-endomorphism
    certificate; failure to find one raises instead of guessing.
    """
    if x.p <= x.total_dim:
        raise FieldTooSmallError(x.p, x.total_dim)
    rng = np.random.default_rng(seed)
    parts = _decompose(x, rng, budget, max_total_dim)
    index = {v: k for k, v in enumerate(x.vertices)}
    parts.sort(key=lambda se: (se[0].total_dim, [index[v] for v in se[0].support()], se[0].dim_vector()))
    result = Decomposition(x, [s for s, _ in parts], [e for _, e in parts]).verify()
    logger.debug(f"[DECOMP] total dim {x.total_dim} -> {len(result)} summands")
    return result


def is_indecomposable(x: QuiverRep, seed: int = 0, budget: int = DEFAULT_BUDGET) -> bool:
    return x.total_dim > 0 and len(decompose(x, seed, budget)) == 1


# ─────────────────────────────────────────────────────────────────────────────
# 6.  GRID HELPERS
# ─────────────────────────────────────────────────────────────────────────────


def quiver_from_grid(m: GridModule, points: Optional[Sequence[Bigrade]] = None) -> QuiverRep:
    """The grid module as a representation of the grid quiver on its support (or given points)."""
    pts = sorted(points) if points is not None else sorted(m.support())
    inside = set(pts)
    arrows, maps = [], []
    for q in pts:
        for e, getter in ((E1, m.xmap), (E2, m.ymap)):
            tgt = q.plus(e)
            if tgt in inside:
                arrows.append((q, tgt))
                maps.append(getter(q))
    return QuiverRep(m.p, list(pts), arrows, {q: m.dim(q) for q in pts}, maps)


def grid_from_quiver(x: QuiverRep, like: GridModule) -> GridModule:
    """Inverse of quiver_from_grid on the window of ``like``."""
    xmaps, ymaps = {}, {}
    for (s, t), mat in zip(x.arrows, x.maps):
        if Bigrade(*t) == Bigrade(*s).plus(E1):
            xmaps[s] = mat
        else:
            ymaps[s] = mat
    return build_module(x.p, like.window, dict(x.dims), xmaps, ymaps)


def decompose_grid(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET) -> List[GridModule]:
    dec = decompose(quiver_from_grid(m), seed, budget)
    return [grid_from_quiver(s, m) for s in dec.summands]


def is_spread_decomposable(m: GridModule, seed: int = 0, budget: int = DEFAULT_BUDGET):
    """(flag, supports): flag holds iff every summand is thin; thin indecomposables are spreads."""
    dec = decompose(quiver_from_grid(m), seed, budget)
    supports = []
    flag = True
    for s in dec.summands:
        if any(s.dim(v) > 1 for v in s.vertices):
            flag = False
            continue
        supports.append(validate_spread(s.support()))
    return flag, supports
