"""Exact submodule arithmetic over QQ, GF(p) and ZZ.

Vectors are tuples of exact scalars (``int`` for ZZ and GF(p), ``Fraction``
for QQ).  A matrix ``A`` of shape ``m x n`` acts on column vectors, so it
represents a map from rank-``n`` to rank-``m`` free modules.

Submodules are stored in canonical form: reduced row echelon form over a
field and (row) Hermite normal form over ZZ.  Two submodules are equal iff
their canonical matrices agree.

>>> ZZ = Ring.integers()
>>> canonicalize([(2, 0), (0, 3), (2, 3)], ZZ).basis
((2, 0), (0, 3))
>>> contains(canonicalize([(2, 0)], ZZ), (1, 0))
False
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "Ring",
    "Submodule",
    "Solver",
    "DimensionError",
    "canonicalize",
    "contains",
    "includes",
    "submodule_sum",
    "intersect",
    "kernel_of",
    "image",
    "apply",
    "solve",
    "express_in_sum",
    "matmul",
    "inverse",
    "rank_of",
]


class DimensionError(ValueError):
    """Raised when vectors or matrices have inconsistent shapes."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Ring:
    """One of the three supported noetherian rings."""

    kind: str  # "QQ" | "GF" | "ZZ"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("QQ", "GF", "ZZ"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"GF(p) needs a prime p, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.kind} takes no characteristic")

    @classmethod
    def rationals(cls) -> "Ring":
        return cls("QQ")

    @classmethod
    def integers(cls) -> "Ring":
        return cls("ZZ")

    @classmethod
    def prime_field(cls, p: int) -> "Ring":
        return cls("GF", p)

    @classmethod
    def parse(cls, text: str) -> "Ring":
        """Parse ``"QQ"``, ``"ZZ"`` or ``"GF(p)"``."""
        t = text.strip()
        if t in ("QQ", "Q"):
            return cls.rationals()
        if t in ("ZZ", "Z"):
            return cls.integers()
        m = re.fullmatch(r"(?:GF|F)\(?(\d+)\)?", t)
        if m:
            return cls.prime_field(int(m.group(1)))
        raise ValueError(f"cannot parse ring {text!r}")

    def __str__(self) -> str:
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    @property
    def dtype(self):
        # int64 is safe while k * (p-1)**2 stays below 2**63 for k <= 2**20.
        if self.kind == "GF" and self.p < 2**20:
            return np.int64
        return object

    def coerce(self, x):
        """Convert a Python scalar (or ``"p/q"`` string) into a ring element."""
        if self.kind == "QQ":
            return Fraction(x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                if self.kind == "ZZ":
                    raise ValueError(f"{x} is not an integer")
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            x = x.numerator
        if isinstance(x, (float, np.floating)):
            if not float(x).is_integer():
                raise ValueError(f"{x} is not an exact integer")
        x = int(x)
        return x % self.p if self.kind == "GF" else x

    def array(self, rows, ncols: int) -> np.ndarray:
        if self.dtype is np.int64:
            # fast path: integer input needs only a vectorised reduction mod p
            try:
                a = np.asarray(rows)
            except ValueError:
                a = None
            if a is not None and a.ndim == 2 and a.dtype.kind in "iub":
                if a.shape[1] != ncols:
                    raise DimensionError(f"expected length {ncols}, got {a.shape[1]}")
                return np.mod(a.astype(np.int64), self.p)
        rows = [[self.coerce(x) for x in r] for r in rows]
        for r in rows:
            if len(r) != ncols:
                raise DimensionError(f"expected length {ncols}, got {len(r)}")
        if not rows:
            return np.zeros((0, ncols), dtype=self.dtype)
        return np.array(rows, dtype=self.dtype).reshape(len(rows), ncols)

    def normalize(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "GF":
            return a % self.p
        return a

    def zero_vector(self, n: int) -> tuple:
        z = Fraction(0) if self.kind == "QQ" else 0
        return (z,) * n

    def random_element(self, rng, bound: int = 3):
        if self.kind == "GF":
            return int(rng.integers(0, self.p))
        v = int(rng.integers(-bound, bound + 1))
        return Fraction(v) if self.kind == "QQ" else v


def _to_tuple(row) -> tuple:
    return tuple(row.tolist())


# ---------------------------------------------------------------------------
# elimination kernels


def _reduce(ring: Ring, A: np.ndarray, npiv: int) -> list:
    """Row-reduce ``A`` in place, choosing pivots among its first ``npiv`` columns.

    Fields: reduced row echelon form.  ZZ: Hermite normal form with positive
    pivots and entries above each pivot reduced into ``[0, pivot)``.  The
    nonzero pivot rows come first.  Returns the pivot columns.
    """
    m = A.shape[0]
    pivots = []
    r = 0
    if ring.kind == "ZZ":
        for c in range(npiv):
            if r == m:
                break
            while True:
                nz = [i for i in range(r, m) if A[i, c] != 0]
                if not nz:
                    break
                i0 = min(nz, key=lambda i: abs(A[i, c]))
                if i0 != r:
                    A[[r, i0]] = A[[i0, r]]
                piv = A[r, c]
                clean = True
                for i in range(r + 1, m):
                    if A[i, c] != 0:
                        A[i] = A[i] - (A[i, c] // piv) * A[r]
                        if A[i, c] != 0:
                            clean = False
                if clean:
                    break
            if A[r, c] == 0:
                continue
            if A[r, c] < 0:
                A[r] = -A[r]
            for i in range(r):
                q = A[i, c] // A[r, c]
                if q:
                    A[i] = A[i] - q * A[r]
            pivots.append(c)
            r += 1
        return pivots

    p = ring.p
    gf = ring.kind == "GF"
    inverses = _inverse_table(p) if gf else None
    for c in range(npiv):
        if r == m:
            break
        nz = A[r:, c].nonzero()[0]
        if nz.size == 0:
            continue
        i0 = r + int(nz[0])
        if i0 != r:
            A[[r, i0]] = A[[i0, r]]
        if gf:
            inv = inverses[int(A[r, c])]
            if inv != 1:
                A[r] = (A[r] * inv) % p
        else:
            piv = A[r, c]
            if piv != 1:
                A[r] = A[r] / piv
        col = A[:, c].copy()
        col[r] = 0
        rows = col.nonzero()[0]
        if rows.size:
            upd = A[rows] - col[rows, None] * A[r]
            A[rows] = upd % p if gf else upd
        pivots.append(c)
        r += 1
    return pivots


_INVERSES: dict = {}


def _inverse_table(p: int) -> list:
    t = _INVERSES.get(p)
    if t is None:
        t = [0] + [pow(a, p - 2, p) for a in range(1, p)] if p < 4096 else _LazyInverses(p)
        _INVERSES[p] = t
    return t


class _LazyInverses:
    def __init__(self, p):
        self.p = p

    def __getitem__(self, a):
        return pow(a, self.p - 2, self.p)


class Submodule:
    """A submodule of the free module of rank ``ambient_rank``, in canonical form."""

    __slots__ = ("ring", "ambient_rank", "rows", "pivots", "_key")

    def __init__(self, ring: Ring, ambient_rank: int, rows: np.ndarray, pivots):
        self.ring = ring
        self.ambient_rank = ambient_rank
        self.rows = rows
        self.pivots = tuple(pivots)
        self._key = None

    @classmethod
    def zero(cls, ring: Ring, n: int) -> "Submodule":
        return cls(ring, n, np.zeros((0, n), dtype=ring.dtype), ())

    @classmethod
    def full(cls, ring: Ring, n: int) -> "Submodule":
        return cls(ring, n, ring.array(np.eye(n, dtype=int).tolist(), n), range(n))

    @property
    def rank(self) -> int:
        """Number of canonical generators (dimension, or lattice rank over ZZ)."""
        return self.rows.shape[0]

    @property
    def is_zero(self) -> bool:
        return self.rows.shape[0] == 0

    @property
    def basis(self) -> tuple:
        return tuple(_to_tuple(r) for r in self.rows)

    def key(self):
        if self._key is None:
            self._key = (str(self.ring), self.ambient_rank, self.basis)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def __repr__(self):
        return f"Submodule({self.ring}, rank {self.rank}/{self.ambient_rank}, {list(self.basis)})"


def _as_rows(ring: Ring, vectors, n: Optional[int]) -> tuple[np.ndarray, int]:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        if n is not None and vectors.shape[1] != n:
            raise DimensionError(f"expected rank {n}, got {vectors.shape[1]}")
        return ring.normalize(vectors.astype(ring.dtype, copy=True)), vectors.shape[1]
    vectors = [tuple(v) for v in vectors]
    if n is None:
        if not vectors:
            raise DimensionError("ambient rank required for an empty generating set")
        n = len(vectors[0])
    return ring.array(vectors, n), n


def canonicalize(vectors: Iterable, ring: Ring, rank: Optional[int] = None) -> Submodule:
    """Canonical form of the span of ``vectors``."""
    A, n = _as_rows(ring, vectors, rank)
    if A.shape[0] == 0:
        return Submodule.zero(ring, n)
    pivots = _reduce(ring, A, n)
    return Submodule(ring, n, A[: len(pivots)].copy(), pivots)


def _check_same(M1: Submodule, M2: Submodule):
    if M1.ring != M2.ring:
        raise DimensionError(f"ring mismatch: {M1.ring} vs {M2.ring}")
    if M1.ambient_rank != M2.ambient_rank:
        raise DimensionError(f"rank mismatch: {M1.ambient_rank} vs {M2.ambient_rank}")


def _residual(M: Submodule, V: np.ndarray) -> np.ndarray:
    """Remainder of each row of ``V`` after reduction by ``M``'s canonical rows."""
    ring = M.ring
    if M.rank == 0:
        return V
    if ring.is_field:
        piv = list(M.pivots)
        return ring.normalize(V - V[:, piv].dot(M.rows))
    V = V.copy()
    for i, c in enumerate(M.pivots):
        h = M.rows[i, c]
        q = V[:, c] // h
        V = V - np.outer(q, M.rows[i])
    return V


def contains(M: Submodule, v) -> bool:
    V = M.ring.array([v], M.ambient_rank)
    return not _residual(M, V).any()


def includes(M1: Submodule, M2: Submodule) -> bool:
    """``M2`` is a submodule of ``M1``."""
    _check_same(M1, M2)
    if M2.rank == 0:
        return True
    if M2.rank > M1.rank and M1.ring.is_field:
        return False
    return not _residual(M1, M2.rows).any()


def submodule_sum(*mods: Submodule) -> Submodule:
    first = mods[0]
    for M in mods[1:]:
        _check_same(first, M)
    nonzero = [M for M in mods if M.rank]
    if not nonzero:
        return first
    if len(nonzero) == 1:
        return nonzero[0]
    return canonicalize(np.vstack([M.rows for M in nonzero]), first.ring, first.ambient_rank)


class Solver:
    """Solves ``A x = t`` for many right-hand sides ``t`` with one elimination.

    ``columns`` are the images of the standard basis vectors, i.e. the
    columns of ``A``.  The returned solution is the one produced by the
    canonical elimination order, so it is deterministic.
    """

    def __init__(self, ring: Ring, columns, m: int):
        C, _ = _as_rows(ring, columns, m) if len(columns) else (np.zeros((0, m), dtype=ring.dtype), m)
        k = C.shape[0]
        self.ring = ring
        self.m = m
        self.k = k
        eye = np.zeros((k, k), dtype=ring.dtype)
        for i in range(k):
            eye[i, i] = ring.coerce(1)
        aug = np.hstack([C, eye]) if k else np.zeros((0, m), dtype=ring.dtype)
        pivots = _reduce(ring, aug, m) if k else []
        r = len(pivots)
        self.pivots = pivots
        self.H = aug[:r, :m]
        self.U = aug[:r, m:]
        self.kernel_rows = aug[r:, m:]

    def solve(self, t) -> Optional[tuple]:
        ring = self.ring
        T = ring.array([t], self.m) if not isinstance(t, np.ndarray) else ring.normalize(t.reshape(1, -1).astype(ring.dtype))
        return self._solve_rows(T)

    def _solve_rows(self, T: np.ndarray) -> Optional[tuple]:
        ring = self.ring
        if self.k == 0:
            return () if not T.any() else None
        if ring.is_field:
            c = T[:, self.pivots] if self.pivots else np.zeros((1, 0), dtype=ring.dtype)
            res = ring.normalize(T - c.dot(self.H)) if self.pivots else T
            if res.any():
                return None
        else:
            T = T.copy()
            c = np.zeros((1, len(self.pivots)), dtype=object)
            for i, col in enumerate(self.pivots):
                h = self.H[i, col]
                q, rem = divmod(T[0, col], h)
                if rem:
                    return None
                c[0, i] = q
                if q:
                    T = T - q * self.H[i]
            if T.any():
                return None
        if not self.pivots:
            return _to_tuple(np.zeros(self.k, dtype=ring.dtype)) if ring.kind != "QQ" else ring.zero_vector(self.k)
        x = ring.normalize(c.dot(self.U))
        return _to_tuple(x[0])

    def solve_many(self, T: np.ndarray):
        """Solve for every row of ``T`` at once (fields only).

        Returns ``(X, ok)``: row ``i`` of ``X`` solves row ``i`` of ``T``
        wherever ``ok[i]`` holds.
        """
        ring = self.ring
        if not ring.is_field:
            raise ValueError("batched solving needs a field")
        T = ring.normalize(np.asarray(T, dtype=ring.dtype).reshape(-1, self.m))
        if self.k == 0 or not self.pivots:
            zero = np.zeros((T.shape[0], self.k), dtype=np.int64).astype(ring.dtype)
            if ring.kind == "QQ":
                zero = zero * Fraction(0)
            return zero, ~T.any(axis=1)
        c = T[:, self.pivots]
        ok = ~ring.normalize(T - c.dot(self.H)).any(axis=1)
        return ring.normalize(c.dot(self.U)), ok

    def kernel(self) -> Submodule:
        return canonicalize(self.kernel_rows, self.ring, self.k)


def kernel_of(A, ring: Ring, ncols: Optional[int] = None) -> Submodule:
    """Kernel of the matrix ``A`` (``m x n``) as a submodule of rank ``n``."""
    A = [tuple(r) for r in A]
    if ncols is None:
        if not A:
            raise DimensionError("column count required for an empty matrix")
        ncols = len(A[0])
    m = len(A)
    cols = [tuple(A[i][j] for i in range(m)) for j in range(ncols)]
    if m == 0:
        return Submodule.full(ring, ncols)
    return Solver(ring, cols, m).kernel()


def intersect(M1: Submodule, M2: Submodule) -> Submodule:
    """Intersection via the kernel of the stacked generator matrix."""
    _check_same(M1, M2)
    ring, n = M1.ring, M1.ambient_rank
    if M1.rank == 0 or M2.rank == 0:
        return Submodule.zero(ring, n)
    if includes(M1, M2):
        return M2
    if includes(M2, M1):
        return M1
    stacked = np.vstack([M1.rows, ring.normalize(-M2.rows)])
    K = Solver(ring, stacked, n).kernel_rows
    if K.shape[0] == 0:
        return Submodule.zero(ring, n)
    vecs = ring.normalize(K[:, : M1.rank].dot(M1.rows))
    return canonicalize(vecs, ring, n)


def _matrix(A, ring: Ring, ncols: Optional[int] = None) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A
    A = [tuple(r) for r in A]
    n = len(A[0]) if A else (ncols or 0)
    return ring.array(A, n)


def apply(A, v, ring: Ring) -> tuple:
    Am = _matrix(A, ring)
    x = ring.array([v], Am.shape[1])[0]
    return _to_tuple(ring.normalize(Am.dot(x)))


def matmul(A, B, ring: Ring) -> np.ndarray:
    return ring.normalize(_matrix(A, ring).dot(_matrix(B, ring)))


def image(A, M: Submodule) -> Submodule:
    """Image ``A(M)``; ``A`` has ``M.ambient_rank`` columns."""
    ring = M.ring
    Am = _matrix(A, ring, M.ambient_rank)
    if Am.shape[1] != M.ambient_rank:
        raise DimensionError(f"matrix has {Am.shape[1]} columns, module rank {M.ambient_rank}")
    if M.rank == 0:
        return Submodule.zero(ring, Am.shape[0])
    return canonicalize(ring.normalize(M.rows.dot(Am.T)), ring, Am.shape[0])


def solve(A, t, ring: Ring) -> Optional[tuple]:
    """One preimage of ``t`` under ``A``, or ``None`` when ``t`` is not in the image."""
    Am = _matrix(A, ring)
    m = Am.shape[0]
    if len(t) != m:
        raise DimensionError(f"target has length {len(t)}, matrix has {m} rows")
    return Solver(ring, Am.T.copy(), m).solve(t)


def express_in_sum(v, M1: Submodule, M2: Submodule) -> Optional[tuple[tuple, tuple]]:
    """Write ``v = v1 + v2`` with ``v1`` in ``M1`` and ``v2`` in ``M2``, if possible."""
    _check_same(M1, M2)
    ring, n = M1.ring, M1.ambient_rank
    if len(v) != n:
        raise DimensionError(f"vector has length {len(v)}, modules have rank {n}")
    gens = np.vstack([M1.rows, M2.rows]) if (M1.rank + M2.rank) else np.zeros((0, n), dtype=ring.dtype)
    x = Solver(ring, gens, n).solve(v)
    if x is None:
        return None
    a = np.array(x[: M1.rank], dtype=ring.dtype).reshape(1, -1)
    b = np.array(x[M1.rank:], dtype=ring.dtype).reshape(1, -1)
    v1 = ring.normalize(a.dot(M1.rows))[0] if M1.rank else np.array(ring.zero_vector(n), dtype=ring.dtype)
    v2 = ring.normalize(b.dot(M2.rows))[0] if M2.rank else np.array(ring.zero_vector(n), dtype=ring.dtype)
    return _to_tuple(v1), _to_tuple(v2)


def rank_of(A, ring: Ring) -> int:
    Am = _matrix(A, ring)
    if Am.size == 0:
        return 0
    return canonicalize(Am.T.copy(), ring, Am.shape[0]).rank


def inverse(A, ring: Ring) -> Optional[np.ndarray]:
    """Inverse of a square matrix over ``ring``, or ``None`` if it is singular."""
    Am = _matrix(A, ring)
    n = Am.shape[0]
    if Am.shape != (n, n):
        raise DimensionError("inverse needs a square matrix")
    eye = ring.array(np.eye(n, dtype=int).tolist(), n)
    aug = np.hstack([Am.astype(ring.dtype, copy=True), eye])
    pivots = _reduce(ring, aug, n)
    if pivots != list(range(n)):
        return None
    if ring.kind == "ZZ" and any(aug[i, i] != 1 for i in range(n)):
        return None
    return aug[:, n:].copy()
