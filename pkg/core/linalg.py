"""
core/linalg.py
──────────────────────────────────────────────────────────────────────────────
Exact dense linear algebra over a prime field F_p.
Matrices are numpy int64 arrays whose entries are kept reduced mod p.

Modules:
  1.  FieldSpec                  - Validated prime modulus
  2.  Row reduction              - rref / rank / kernel / membership solves
  3.  Subspaces and quotients    - column bases, canonical quotient coordinates
  4.  Polynomials of matrices    - characteristic polynomial, Fitting powers
  5.  Similarity invariants      - invariant factors over F_p[t] (sympy)
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from core.errors import ContractViolationError, FieldError

logger = logging.getLogger(__name__)

DEFAULT_PRIME = 2

# ─────────────────────────────────────────────────────────────────────────────
# 1.  FIELD SPEC
# ─────────────────────────────────────────────────────────────────────────────


class FieldSpec(BaseModel):
    """The coefficient field k = F_p."""

    model_config = ConfigDict(frozen=True)

    p: int = DEFAULT_PRIME

    @field_validator("p")
    @classmethod
    def _prime(cls, value: int) -> int:
        if value < 2 or not sympy.isprime(value):
            raise ValueError(f"{value} is not a prime")
        return value


def check_prime(p: int) -> int:
    try:
        return FieldSpec(p=p).p
    except ValidationError:
        raise FieldError(f"field modulus {p} is not a prime") from None


# ─────────────────────────────────────────────────────────────────────────────
# 2.  CONSTRUCTORS AND ROW REDUCTION
# ─────────────────────────────────────────────────────────────────────────────


def as_mat(entries, p: int, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Coerce nested lists / arrays to a reduced int64 matrix."""
    if shape is not None and (shape[0] == 0 or shape[1] == 0):
        return np.zeros(shape, dtype=np.int64)
    mat = np.array(entries, dtype=np.int64)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1) if shape is None else mat.reshape(shape)
    if shape is not None and mat.shape != tuple(shape):
        mat = mat.reshape(shape)
    return mat % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(*mats: np.ndarray, p: int) -> np.ndarray:
    """Product of a chain of matrices, reduced after every step."""
    out = mats[0] % p
    for m in mats[1:]:
        if out.shape[1] != m.shape[0]:
            raise ContractViolationError(f"cannot multiply {out.shape} by {m.shape}")
        out = (out @ m) % p
    return out


def rref(m: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form; the pivot is the first nonzero entry scanning columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of {v : m v = 0}."""
    rows, cols = m.shape
    if rows == 0:
        return identity(cols)
    red, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-red[i, f]) % p
    return basis


def solve_membership(span: np.ndarray, target: np.ndarray, p: int) -> Optional[np.ndarray]:
    """X with span @ X = target, or None when some target column is off the span."""
    if span.shape[0] != target.shape[0]:
        raise ContractViolationError(
            f"row mismatch: span has {span.shape[0]} rows, target has {target.shape[0]}"
        )
    n, k = span.shape
    t = target.shape[1]
    if n == 0:
        return zeros(k, t)
    red, pivots = rref(np.hstack([span, target]), p)
    if any(c >= k for c in pivots):
        return None
    sol = zeros(k, t)
    for i, pc in enumerate(pivots):
        sol[pc] = red[i, k:]
    return sol


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ContractViolationError(f"cannot invert a non-square {m.shape} matrix")
    if n == 0:
        return zeros(0, 0)
    red, pivots = rref(np.hstack([m, identity(n)]), p)
    if pivots[:n] != list(range(n)):
        raise ContractViolationError("matrix is singular")
    return red[:, n:].copy()


# ─────────────────────────────────────────────────────────────────────────────
# 3.  SUBSPACES AND QUOTIENTS
# ─────────────────────────────────────────────────────────────────────────────


def column_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Independent columns of m spanning its column space."""
    if m.shape[1] == 0 or m.shape[0] == 0:
        return zeros(m.shape[0], 0)
    _, pivots = rref(m, p)
    return m[:, pivots] % p


def quotient_map(span: np.ndarray, n: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Canonical coordinates on F_p^n / colspace(span).

    Returns (Q, L): Q is the projection onto the non-pivot coordinates of the
    reduced relation matrix, L the coordinate section, so Q @ L = I and Q @ span = 0.
    """
    if span.shape[1] == 0 or n == 0:
        return identity(n), identity(n)
    red, pivots = rref(span.T, p)
    red = red[: len(pivots)]
    free = [c for c in range(n) if c not in set(pivots)]
    q = zeros(len(free), n)
    for j, f in enumerate(free):
        q[j, f] = 1
    for i, pc in enumerate(pivots):
        q[:, pc] = (-red[i, free]) % p
    sec = zeros(n, len(free))
    for j, f in enumerate(free):
        sec[f, j] = 1
    return q, sec


def extend_basis(basis: np.ndarray, candidates: np.ndarray, p: int) -> np.ndarray:
    """Append the candidate columns that are independent of what is already there."""
    out = basis
    current = rank(out, p) if out.shape[1] else 0
    for j in range(candidates.shape[1]):
        trial = np.hstack([out, candidates[:, j : j + 1]])
        r = rank(trial, p)
        if r > current:
            out, current = trial, r
    return out


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


# ─────────────────────────────────────────────────────────────────────────────
# 4.  POLYNOMIALS OF MATRICES
# ─────────────────────────────────────────────────────────────────────────────


def matrix_power(m: np.ndarray, k: int, p: int) -> np.ndarray:
    result = identity(m.shape[0])
    base = m % p
    while k:
        if k & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        k >>= 1
    return result


def poly_of_matrix(coeffs: Sequence[int], m: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a polynomial (coefficients highest degree first) at m by Horner."""
    n = m.shape[0]
    out = zeros(n, n)
    for c in coeffs:
        out = (out @ m + (int(c) % p) * identity(n)) % p
    return out


def charpoly(m: np.ndarray, p: int) -> List[int]:
    """Monic characteristic polynomial, highest degree first, via Hessenberg reduction."""
    n = m.shape[0]
    h = np.array(m, dtype=np.int64) % p
    for j in range(n - 2):
        nz = np.nonzero(h[j + 1 :, j])[0]
        if nz.size == 0:
            continue
        k = j + 1 + int(nz[0])
        if k != j + 1:
            h[[k, j + 1]] = h[[j + 1, k]]
            h[:, [k, j + 1]] = h[:, [j + 1, k]]
        inv = pow(int(h[j + 1, j]), p - 2, p)
        for i in range(j + 2, n):
            f = (int(h[i, j]) * inv) % p
            if f:
                h[i] = (h[i] - f * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + f * h[:, i]) % p

    # polynomials stored lowest degree first while building
    polys: List[List[int]] = [[1]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        nxt = [0] + prev[:]
        diag = int(h[k - 1, k - 1])
        for d, c in enumerate(prev):
            nxt[d] = (nxt[d] - diag * c) % p
        sub = 1
        for i in range(k - 1, 0, -1):
            sub = (sub * int(h[i, i - 1])) % p
            coef = (int(h[i - 1, k - 1]) * sub) % p
            if coef:
                for d, c in enumerate(polys[i - 1]):
                    nxt[d] = (nxt[d] - coef * c) % p
        polys.append(nxt)
    return list(reversed(polys[n]))


def factor_mod(coeffs: Sequence[int], p: int) -> List[Tuple[List[int], int]]:
    """Monic irreducible factors over F_p with multiplicities."""
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(coeffs), t, modulus=p)
    if poly.degree() <= 0:
        return []
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        fac = fac.monic()
        out.append(([int(c) % p for c in fac.all_coeffs()], int(mult)))
    out.sort()
    return out


# ─────────────────────────────────────────────────────────────────────────────
# 5.  SIMILARITY INVARIANTS
# ─────────────────────────────────────────────────────────────────────────────


def invariant_factors(m: np.ndarray, p: int) -> List[List[int]]:
    """
    Non-unit invariant factors of tI - m over F_p[t], each monic and listed
    highest degree first, in divisibility order. Uses determinantal divisors,
    which is fine for the small monodromy blocks this is called on.
    """
    n = m.shape[0]
    if n == 0:
        return []
    t = sympy.Symbol("t")
    char = sympy.Matrix(n, n, lambda i, j: (t if i == j else 0) - int(m[i, j]))
    divisors = [sympy.Poly(1, t, modulus=p)]
    for k in range(1, n + 1):
        g = None
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                minor = sympy.Poly(char.extract(list(rows), list(cols)).det(method="berkowitz"), t, modulus=p)
                if minor.is_zero:
                    continue
                g = minor if g is None else g.gcd(minor)
            if g is not None and g.degree() == 0:
                break
        divisors.append(g.monic())
    factors = []
    for k in range(1, n + 1):
        q, r = divisors[k].div(divisors[k - 1])
        if not r.is_zero:
            raise ContractViolationError("determinantal divisors do not divide")
        if q.degree() > 0:
            factors.append([int(c) % p for c in q.monic().all_coeffs()])
    return factors
