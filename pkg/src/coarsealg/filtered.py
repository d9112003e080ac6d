"""Filtered modules over a finite metric space and their lean/split/insular constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .exactlinalg import (
    DimensionError,
    Ring,
    Solver,
    Submodule,
    canonicalize,
    contains,
    image,
    includes,
    intersect,
    inverse,
    submodule_sum,
)
from .metric import FiniteMetricSpace, Violation, bits

__all__ = [
    "INF",
    "Caps",
    "ConstantResult",
    "FilteredModule",
    "GeneratedFiltration",
    "StandardSubFiltration",
    "IsometryAction",
    "EquivarianceResult",
    "free_filtration",
    "property_constant",
    "lean_constant",
    "split_constant",
    "insular_constant",
    "check_equivariance",
    "generate_group",
    "local_ranks",
    "minimal_constant",
    "candidate_constants",
    "enumerate_closed",
]

INF = math.inf

MODES = ("auto", "exhaustive", "generator-reduced", "sampled")


@dataclass(frozen=True)
class Caps:
    """Exhaustive thresholds (point counts) and the sampling budget."""

    subset: int = 14
    pair: int = 10
    trials: int = 64
    seed: int = 0

    @classmethod
    def parse(cls, text: str) -> "Caps":
        kw = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            k, _, v = part.partition("=")
            if k not in ("subset", "pair", "trials", "seed"):
                raise ValueError(f"unknown cap {k!r}")
            kw[k] = int(v)
        return cls(**kw)


@dataclass
class ConstantResult:
    kind: str
    value: float  # an int, or INF
    mode: str
    witness: Optional[dict] = None
    tested: int = 0

    @property
    def finite(self) -> bool:
        return self.value != INF

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": "inf" if self.value == INF else int(self.value),
            "mode": self.mode,
            "witness": self.witness,
            "tested": self.tested,
        }


class FilteredModule:
    """A monotone assignment ``S -> F(S)`` of submodules of a free module.

    Subclasses implement ``_eval``.  Values are cached per point mask.
    """

    def __init__(self, space: FiniteMetricSpace, ring: Ring, ambient_rank: int):
        self.space = space
        self.ring = ring
        self.ambient_rank = ambient_rank
        self._cache: dict[int, Submodule] = {}

    def _eval(self, S: int) -> Submodule:
        raise NotImplementedError

    def eval(self, S: int) -> Submodule:
        if S >> self.space.n:
            raise ValueError("point set is not over this module's space")
        S = self.closure(S)
        M = self._cache.get(S)
        if M is None:
            M = Submodule.zero(self.ring, self.ambient_rank) if S == 0 else self._eval(S)
            if len(self._cache) > 200_000:
                self._cache.clear()
            self._cache[S] = M
        return M

    def __call__(self, S: int) -> Submodule:
        return self.eval(S)

    @property
    def total(self) -> Submodule:
        return self.eval(self.space.full)

    def local(self, x: int, r: int) -> Submodule:
        return self.eval(self.space.ball(x, r))

    def closure(self, S: int) -> int:
        """Smallest ``S' <= S`` with ``F(S') = F(S)`` when cheaply known; else ``S``."""
        return S

    def closed_sets(self, limit: int) -> Optional[list[int]]:
        """All closed point sets if there are at most ``limit``; ``None`` means "every subset"."""
        return None


class GeneratedFiltration(FilteredModule):
    """``F(S)`` is the span of the generators whose support lies in ``S``."""

    def __init__(self, space: FiniteMetricSpace, ring: Ring, generators: Sequence, ambient_rank: Optional[int] = None):
        gens = [(tuple(v), int(s)) for v, s in generators]
        if ambient_rank is None:
            if not gens:
                raise DimensionError("ambient rank required without generators")
            ambient_rank = len(gens[0][0])
        super().__init__(space, ring, ambient_rank)
        for i, (v, s) in enumerate(gens):
            if len(v) != ambient_rank:
                raise DimensionError(f"generator {i} has length {len(v)}, expected {ambient_rank}")
            if s == 0:
                raise ValueError(f"generator {i} has empty support")
            if s >> space.n:
                raise ValueError(f"generator {i} has support outside the space")
        self.generators = gens
        self.supports = [s for _, s in gens]
        self._rows = ring.array([v for v, _ in gens], ambient_rank)
        self._independent = None

    def _eval(self, S: int) -> Submodule:
        idx = [i for i, s in enumerate(self.supports) if not s & ~S]
        if not idx:
            return Submodule.zero(self.ring, self.ambient_rank)
        return canonicalize(self._rows[idx], self.ring, self.ambient_rank)

    def closure(self, S: int) -> int:
        c = 0
        for s in self.supports:
            if not s & ~S:
                c |= s
        return c

    def closed_sets(self, limit: int) -> Optional[list[int]]:
        sets = {0}
        for s in dict.fromkeys(self.supports):
            sets |= {x | s for x in sets}
            if len(sets) > limit:
                return None
        return sorted(sets)

    @property
    def coordinate_supports(self) -> Optional[list]:
        """Per coordinate, the supports of generators equal to that unit vector.

        ``None`` unless every generator is a unit vector, i.e. the filtration
        is a direct sum of coordinate lines.
        """
        if not hasattr(self, "_coords"):
            coords: Optional[list] = [[] for _ in range(self.ambient_rank)]
            one = self.ring.coerce(1)
            for v, s in self.generators:
                nz = [i for i, x in enumerate(v) if x]
                if len(nz) != 1 or v[nz[0]] != one:
                    coords = None
                    break
                coords[nz[0]].append(s)
            self._coords = coords
        return self._coords

    @property
    def independent(self) -> bool:
        """Generators are linearly independent (a basis of the total module)."""
        if self._independent is None:
            self._independent = self.total.rank == len(self.generators)
        return self._independent


class StandardSubFiltration(FilteredModule):
    """``K(S) = sub  ∩ parent(S)``."""

    def __init__(self, parent: FilteredModule, sub: Submodule):
        if sub.ambient_rank != parent.ambient_rank or sub.ring != parent.ring:
            raise DimensionError("submodule is not in the parent's ambient module")
        super().__init__(parent.space, parent.ring, parent.ambient_rank)
        self.parent = parent
        self.sub = sub

    def _eval(self, S: int) -> Submodule:
        coords = getattr(self.parent, "coordinate_supports", None)
        if coords is None or self.sub.rank == 0:
            return intersect(self.sub, self.parent.eval(S))
        # Coordinate parent: keep the elements of ``sub`` vanishing off the
        # coordinates available in ``S``.
        off = [j for j, ss in enumerate(coords) if not any(not s & ~S for s in ss)]
        if not off:
            return self.sub
        B = self.sub.rows
        C = B[:, off]
        combos = Solver(self.ring, C, len(off)).kernel_rows
        if combos.shape[0] == 0:
            return Submodule.zero(self.ring, self.ambient_rank)
        return canonicalize(self.ring.normalize(combos.dot(B)), self.ring, self.ambient_rank)

    def closure(self, S: int) -> int:
        return self.parent.closure(S)

    def closed_sets(self, limit: int) -> Optional[list[int]]:
        return self.parent.closed_sets(limit)


def free_filtration(space: FiniteMetricSpace, ring: Ring, ranks: Sequence[int]) -> GeneratedFiltration:
    """Direct sum of free summands ``F_x`` of the given ranks, each supported at ``x``."""
    N = sum(ranks)
    gens = []
    pos = 0
    for x, r in enumerate(ranks):
        for _ in range(r):
            v = [0] * N
            v[pos] = 1
            gens.append((tuple(v), 1 << x))
            pos += 1
    return GeneratedFiltration(space, ring, gens, N)


def local_ranks(F: FilteredModule, radius: int) -> list[int]:
    """Rank of ``F(x[radius])`` for every point ``x``: the local finiteness witness."""
    return [F.local(x, radius).rank for x in range(F.space.n)]


# ---------------------------------------------------------------------------
# constant search


def candidate_constants(space: FiniteMetricSpace, limit: Optional[int] = None) -> list[int]:
    vals = list(space.distances)
    if limit is not None:
        vals = [v for v in vals if v <= limit]
    return vals or [0]


def minimal_constant(tests: Iterable, holds: Callable, candidates: Sequence[int]):
    """Least candidate ``c`` with ``holds(t, c)`` for every test ``t``.

    ``holds`` must be monotone in ``c``.  Returns ``(value, witness_test, count)``;
    the witness is the last test that forced the value up (``INF`` if some test
    fails at every candidate).
    """
    best = 0
    witness = None
    count = 0
    top = len(candidates) - 1
    for t in tests:
        count += 1
        if holds(t, candidates[best]):
            continue
        if best == top or not holds(t, candidates[top]):
            return INF, t, count
        lo, hi = best + 1, top
        while lo < hi:
            mid = (lo + hi) // 2
            if holds(t, candidates[mid]):
                hi = mid
            else:
                lo = mid + 1
        best = lo
        witness = t
    return candidates[best], witness, count


def enumerate_closed(F: FilteredModule, cap: int) -> Optional[list[int]]:
    """Closed sets for exhaustive checks, or ``None`` if over the cap."""
    closed = F.closed_sets(1 << cap)
    if closed is not None:
        return closed
    if F.space.n <= cap:
        return list(range(1 << F.space.n))
    return None


def _random_mask(rng, n: int) -> int:
    p = rng.uniform(0.15, 0.85)
    pick = np.nonzero(rng.random(n) < p)[0]
    m = 0
    for i in pick.tolist():
        m |= 1 << i
    return m


def _partitions(W: int):
    """Ordered pairs ``(U1, U2)`` partitioning ``W``, both nonempty, lowest point in ``U1``."""
    pts = bits(W)
    if len(pts) < 2:
        return
    low, rest = pts[0], pts[1:]
    k = len(rest)
    for code in range(1 << k):
        U1 = 1 << low
        for j in range(k):
            if code >> j & 1:
                U1 |= 1 << rest[j]
        U2 = W & ~U1
        if U2:
            yield U1, U2


class _LocalSums:
    """Caches ``sum_{x in U} F(x[D])``."""

    def __init__(self, F: FilteredModule):
        self.F = F
        self.cache: dict[tuple[int, int], Submodule] = {}

    def __call__(self, U: int, D: int) -> Submodule:
        key = (U, D)
        M = self.cache.get(key)
        if M is None:
            F = self.F
            mods = {}
            for x in bits(U):
                L = F.local(x, D)
                if L.rank:
                    mods[L.key()] = L
            M = submodule_sum(*mods.values()) if mods else Submodule.zero(F.ring, F.ambient_rank)
            if len(self.cache) > 100_000:
                self.cache.clear()
            self.cache[key] = M
        return M


def _resolve_mode(F: FilteredModule, kind: str, mode: str, caps: Caps) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    generated = isinstance(F, GeneratedFiltration)
    if mode == "generator-reduced":
        if not generated:
            raise ValueError("generator-reduced mode needs a GeneratedFiltration")
        if kind == "insular" and not F.independent:
            raise ValueError("insular constants reduce to generators only for independent generators")
        return mode
    if mode != "auto":
        return mode
    if generated and (kind != "insular" or F.independent):
        return "generator-reduced"
    cap = caps.subset if kind == "lean" else caps.pair
    if enumerate_closed(F, cap) is not None:
        return "exhaustive"
    return "sampled"


def property_constant(F: FilteredModule, kind: str, mode: str = "auto", caps: Optional[Caps] = None,
                      limit: Optional[int] = None) -> ConstantResult:
    """Minimal lean / split / insular constant of ``F``.

    ``limit`` truncates the candidate constants; exceeding it yields ``INF``
    with a witness.
    """
    caps = caps or Caps()
    if kind not in ("lean", "split", "insular"):
        raise ValueError(f"unknown property {kind!r}")
    mode = _resolve_mode(F, kind, mode, caps)
    space = F.space
    cands = candidate_constants(space, limit)
    sums = _LocalSums(F)
    rng = np.random.default_rng(caps.seed)

    if kind == "lean":
        if mode == "generator-reduced":
            tests = range(len(F.generators))

            def holds(i, D):
                v, s = F.generators[i]
                return contains(sums(s, D), v)

            describe = lambda i: {"generator": i, "support": space.labels_of(F.supports[i])}
        else:
            if mode == "exhaustive":
                sets = enumerate_closed(F, caps.subset)
                if sets is None:
                    raise ValueError("too many subsets for exhaustive mode; raise caps.subset or sample")
                tests = (U for U in sets if U)
            else:
                tests = (F.closure(_random_mask(rng, space.n)) for _ in range(caps.trials))

            def holds(U, D):
                return includes(sums(U, D), F.eval(U))

            describe = lambda U: {"U": space.labels_of(U)}

    elif kind == "split":
        if mode == "generator-reduced":
            tests = [(i, A, F.supports[i] & ~A) for i in range(len(F.generators))
                     for A, _ in _partitions(F.supports[i])]

            def holds(t, delta):
                i, A, B = t
                rhs = submodule_sum(F.eval(space.enlarge(A, delta)), F.eval(space.enlarge(B, delta)))
                return contains(rhs, F.generators[i][0])

            describe = lambda t: {"generator": t[0], "U1": space.labels_of(t[1]), "U2": space.labels_of(t[2])}
        else:
            if mode == "exhaustive":
                sets = enumerate_closed(F, caps.pair)
                if sets is None:
                    raise ValueError("too many subsets for exhaustive mode; raise caps.pair or sample")
                tests = (pair for W in sets for pair in _partitions(W))
            else:
                tests = _sampled_split_tests(F, rng, caps.trials)

            def holds(t, delta):
                U1, U2 = t
                lhs = F.eval(U1 | U2)
                if lhs.is_zero:
                    return True
                rhs = submodule_sum(F.eval(space.enlarge(U1, delta)), F.eval(space.enlarge(U2, delta)))
                return includes(rhs, lhs)

            describe = lambda t: {"U1": space.labels_of(t[0]), "U2": space.labels_of(t[1])}

    else:
        if mode == "generator-reduced":
            # Independent generators: F(U1) ∩ F(U2) is spanned by the generators
            # supported in U1 ∩ U2, so the constant is 0.
            return ConstantResult(kind, 0, mode, None, len(F.generators))
        lhs_cache: dict = {}
        if mode == "exhaustive":
            sets = enumerate_closed(F, caps.pair)
            if sets is None:
                raise ValueError("too many subsets for exhaustive mode; raise caps.pair or sample")
            sets = [U for U in sets if U]

            def gen_pairs():
                for a, U1 in enumerate(sets):
                    for U2 in sets[a + 1:]:
                        if U1 & ~U2 and U2 & ~U1:
                            yield U1, U2

            tests = gen_pairs()
        else:
            tests = ((F.closure(_random_mask(rng, space.n)), F.closure(_random_mask(rng, space.n)))
                     for _ in range(caps.trials))

        def holds(t, d):
            U1, U2 = t
            lhs = lhs_cache.get(t)
            if lhs is None:
                lhs = intersect(F.eval(U1), F.eval(U2))
                lhs_cache.clear()
                lhs_cache[t] = lhs
            if lhs.is_zero:
                return True
            return includes(F.eval(space.enlarge(U1, d) & space.enlarge(U2, d)), lhs)

        describe = lambda t: {"U1": space.labels_of(t[0]), "U2": space.labels_of(t[1])}

    value, wit, count = minimal_constant(tests, holds, cands)
    mode_label = mode if mode != "sampled" else f"sampled(seed={caps.seed}, trials={caps.trials})"
    return ConstantResult(kind, value, mode_label, describe(wit) if wit is not None else None, count)


def _sampled_split_tests(F: FilteredModule, rng, trials: int):
    n = F.space.n
    full = F.space.full
    # deterministic cuts along the point order, then random partitions of random sets
    for c in range(1, n):
        U1 = (1 << c) - 1
        yield U1, full & ~U1
    for _ in range(trials):
        W = F.closure(_random_mask(rng, n)) or full
        pts = bits(W)
        flip = rng.random(len(pts)) < 0.5
        U1 = 0
        for i, f in zip(pts, flip.tolist()):
            if f:
                U1 |= 1 << i
        U2 = W & ~U1
        if U1 and U2:
            yield U1, U2


def lean_constant(F, mode="auto", caps=None, limit=None) -> ConstantResult:
    return property_constant(F, "lean", mode, caps, limit)


def split_constant(F, mode="auto", caps=None, limit=None) -> ConstantResult:
    return property_constant(F, "split", mode, caps, limit)


def insular_constant(F, mode="auto", caps=None, limit=None) -> ConstantResult:
    return property_constant(F, "insular", mode, caps, limit)


# ---------------------------------------------------------------------------
# equivariance


class IsometryAction:
    """An isometry of the space together with an invertible module map."""

    def __init__(self, space: FiniteMetricSpace, perm: Sequence[int], matrix, ring: Ring):
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(space.n)):
            raise ValueError("point map is not a permutation")
        P = np.array(perm)
        if not np.array_equal(space.dist[np.ix_(P, P)], space.dist):
            raise ValueError("point map is not an isometry")
        M = matrix if isinstance(matrix, np.ndarray) else ring.array([tuple(r) for r in matrix], len(matrix[0]) if len(matrix) else 0)
        if inverse(M, ring) is None:
            raise ValueError("module map is not invertible")
        self.space = space
        self.perm = perm
        self.matrix = M
        self.ring = ring

    def act(self, S: int) -> int:
        out = 0
        for i in bits(S):
            out |= 1 << self.perm[i]
        return out

    def compose(self, other: "IsometryAction") -> "IsometryAction":
        """``self ∘ other``."""
        perm = [self.perm[other.perm[i]] for i in range(self.space.n)]
        return IsometryAction(self.space, perm, self.ring.normalize(self.matrix.dot(other.matrix)), self.ring)

    def key(self):
        return (self.perm, tuple(map(tuple, self.matrix.tolist())))

    @classmethod
    def identity(cls, space: FiniteMetricSpace, ring: Ring, rank: int) -> "IsometryAction":
        return cls(space, range(space.n), np.eye(rank, dtype=int).tolist() if rank else np.zeros((0, 0), dtype=ring.dtype), ring)


def generate_group(actions: Sequence[IsometryAction], cap: int = 10_000) -> list[IsometryAction]:
    """All composites of the given actions (a finite group), identity first."""
    if not actions:
        return []
    a0 = actions[0]
    e = IsometryAction.identity(a0.space, a0.ring, a0.matrix.shape[0])
    seen = {e.key(): e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for a in actions:
                h = a.compose(g)
                k = h.key()
                if k not in seen:
                    seen[k] = h
                    nxt.append(h)
                    if len(seen) > cap:
                        raise ValueError("generated group exceeds the cap")
        frontier = nxt
    return list(seen.values())


@dataclass
class EquivarianceResult:
    ok: bool
    mode: str
    witness: Optional[dict] = None
    tested: int = 0


def check_equivariance(F: FilteredModule, action: IsometryAction, mode: str = "auto",
                       caps: Optional[Caps] = None) -> EquivarianceResult:
    """Verify ``matrix · F(S) = F(perm S)`` on every (or every sampled) subset."""
    caps = caps or Caps()
    space = F.space
    if action.space is not space and action.space.n != space.n:
        raise ValueError("action is over a different space")
    if action.matrix.shape != (F.ambient_rank, F.ambient_rank):
        raise DimensionError("module map does not match the ambient rank")
    if mode == "auto":
        mode = "exhaustive" if space.n <= caps.subset else "sampled"
    if mode == "exhaustive":
        tests: Iterable[int] = range(1 << space.n)
    elif mode == "sampled":
        rng = np.random.default_rng(caps.seed)
        tests = [_random_mask(rng, space.n) for _ in range(caps.trials)] + [space.ball(x, 0) for x in range(space.n)]
    else:
        raise ValueError(f"unsupported mode {mode!r} for equivariance")
    label = mode if mode != "sampled" else f"sampled(seed={caps.seed}, trials={caps.trials})"
    count = 0
    for S in tests:
        count += 1
        if image(action.matrix, F.eval(S)) != F.eval(action.act(S)):
            return EquivarianceResult(False, label, {"S": space.labels_of(S), "gS": space.labels_of(action.act(S))}, count)
    return EquivarianceResult(True, label, None, count)
