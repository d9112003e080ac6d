"""Finite metric spaces with integer distances, enlargements and Cayley balls.

Point sets are Python ``int`` bitmasks over the point indices of one ambient
space; bit ``i`` set means point ``i`` is a member.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "FiniteMetricSpace",
    "GroupSpec",
    "Violation",
    "SpaceTooLarge",
    "validate_metric",
    "enlarge",
    "is_r_disjoint",
    "disjointness_violation",
    "diameter",
    "mesh",
    "cayley_ball",
    "parse_space",
    "bits",
    "popcount",
    "DEFAULT_POINT_CAP",
]

DEFAULT_POINT_CAP = 4096


class SpaceTooLarge(ValueError):
    pass


@dataclass
class Violation:
    """A failed check, with a human-readable reason and a JSON-friendly witness."""

    reason: str
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        # A violation is never "ok"; callers test ``if violation is None``.
        return True


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def validate_metric(dist) -> Optional[Violation]:
    """Check the metric axioms; returns ``None`` when ``dist`` is a metric."""
    D = np.asarray(dist)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        return Violation("distance matrix is not square", {"shape": list(D.shape)})
    n = D.shape[0]
    if n and not np.issubdtype(D.dtype, np.integer):
        return Violation("distances must be integers", {})
    if (D < 0).any():
        i, j = map(int, np.argwhere(D < 0)[0])
        return Violation("negative distance", {"pair": [i, j]})
    diag = np.diagonal(D)
    if diag.any():
        i = int(np.nonzero(diag)[0][0])
        return Violation("nonzero self-distance", {"pair": [i, i]})
    asym = np.argwhere(D != D.T)
    if asym.size:
        i, j = map(int, asym[0])
        return Violation("distance is not symmetric", {"pair": [i, j]})
    off = D + np.eye(n, dtype=D.dtype)
    zero = np.argwhere(off == 0)
    if zero.size:
        i, j = map(int, zero[0])
        return Violation("distinct points at distance 0", {"pair": [i, j]})
    for k in range(n):
        bad = D > D[:, [k]] + D[[k], :]
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            return Violation(
                "triangle inequality fails",
                {"triple": [i, k, j], "d": [int(D[i, j]), int(D[i, k]), int(D[k, j])]},
            )
    return None


# ---------------------------------------------------------------------------
# groups


class GroupSpec:
    """A finitely generated group with normal forms and word length.

    ``kind`` is one of ``zn`` (free abelian of rank k), ``free`` (free group of
    rank k) or ``cycle`` (cyclic of order m).
    """

    def __init__(self, kind: str, k: int):
        if kind not in ("zn", "free", "cycle"):
            raise ValueError(f"unknown group family {kind!r}")
        if k < 1:
            raise ValueError("group parameter must be positive")
        self.kind = kind
        self.k = k

    def __repr__(self):
        return f"GroupSpec({self.kind!r}, {self.k})"

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and (self.kind, self.k) == (other.kind, other.k)

    @property
    def identity(self):
        if self.kind == "zn":
            return (0,) * self.k
        if self.kind == "free":
            return ()
        return 0

    @property
    def generators(self) -> list:
        if self.kind == "zn":
            out = []
            for i in range(self.k):
                for s in (1, -1):
                    e = [0] * self.k
                    e[i] = s
                    out.append(tuple(e))
            return out
        if self.kind == "free":
            return [(s * (i + 1),) for i in range(self.k) for s in (1, -1)]
        return [1, -1] if self.k > 2 else [1]

    def mul(self, x, y):
        if self.kind == "zn":
            return tuple(a + b for a, b in zip(x, y))
        if self.kind == "free":
            w = list(x)
            for a in y:
                if w and w[-1] == -a:
                    w.pop()
                else:
                    w.append(a)
            return tuple(w)
        return (x + y) % self.k

    def inv(self, x):
        if self.kind == "zn":
            return tuple(-a for a in x)
        if self.kind == "free":
            return tuple(-a for a in reversed(x))
        return (-x) % self.k

    def length(self, x) -> int:
        """Word length with respect to the standard generators."""
        if self.kind == "zn":
            return sum(abs(a) for a in x)
        if self.kind == "free":
            return len(x)
        return min(x, self.k - x)

    def sort_key(self, x):
        if self.kind == "free":
            return (len(x), tuple((abs(a), a < 0) for a in x))
        return x

    def label(self, x):
        if self.kind == "zn":
            return x[0] if self.k == 1 else list(x)
        if self.kind == "free":
            if not x:
                return "e"
            letters = "abcdefghijklmnopqrstuvwxyz"
            return "".join(letters[a - 1] if a > 0 else letters[-a - 1].upper() for a in x)
        return x


class FiniteMetricSpace:
    """Points ``0..n-1`` with an exact integer distance matrix.

    Cayley-ball spaces remember their group and element of each point in
    ``group`` and ``elements``; ``labels`` are the JSON-friendly names used in
    scenario files.
    """

    def __init__(self, dist, labels: Optional[Sequence] = None, group: Optional[GroupSpec] = None,
                 elements: Optional[Sequence] = None, radius: Optional[int] = None,
                 validate: bool = True):
        D = np.array(dist, dtype=np.int64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ValueError("distance matrix must be square")
        if validate:
            bad = validate_metric(D)
            if bad is not None:
                raise ValueError(f"not a metric: {bad.reason} {bad.witness}")
        self.dist = D
        self.n = D.shape[0]
        self.labels = list(labels) if labels is not None else list(range(self.n))
        if len(self.labels) != self.n:
            raise ValueError("label count does not match point count")
        self.group = group
        self.elements = list(elements) if elements is not None else None
        self.radius = radius
        self._index = {_hashable(l): i for i, l in enumerate(self.labels)}
        self._balls: dict[tuple[int, int], int] = {}
        self._enlarge_cache: dict[tuple[int, int], int] = {}
        self.full = (1 << self.n) - 1
        self.distances = sorted({int(x) for x in np.unique(D)})
        self.diameter = int(D.max()) if self.n else 0

    def __repr__(self):
        desc = f"{self.group.kind}({self.group.k}) ball r={self.radius}" if self.group else "matrix"
        return f"FiniteMetricSpace(n={self.n}, {desc})"

    @property
    def is_zball(self) -> bool:
        return self.group is not None and self.group.kind == "zn" and self.group.k == 1

    def index(self, label) -> int:
        try:
            return self._index[_hashable(label)]
        except KeyError:
            raise KeyError(f"no point labelled {label!r}") from None

    def mask(self, labels: Iterable) -> int:
        """Bitmask of the points with the given labels."""
        return mask_of(self.index(l) for l in labels)

    def mask_of_indices(self, indices: Iterable[int]) -> int:
        m = mask_of(indices)
        if m >> self.n:
            raise ValueError("point index out of range")
        return m

    def points(self, S: int) -> list[int]:
        return bits(S)

    def labels_of(self, S: int) -> list:
        return [self.labels[i] for i in bits(S)]

    def coordinate(self, i: int, axis: int = 0) -> int:
        if self.group is None or self.group.kind != "zn":
            raise ValueError("coordinates need a Z^k ball")
        return self.elements[i][axis]

    def ball(self, x: int, r: int) -> int:
        """Mask of the closed ball ``x[r]``."""
        key = (x, r)
        m = self._balls.get(key)
        if m is None:
            m = mask_of(np.nonzero(self.dist[x] <= r)[0].tolist())
            self._balls[key] = m
        return m

    def enlarge(self, S: int, b: int) -> int:
        if b < 0:
            raise ValueError("enlargement radius must be non-negative")
        if b == 0 or S == 0:
            return S
        if b >= self.diameter:
            return self.full
        key = (S, b)
        m = self._enlarge_cache.get(key)
        if m is None:
            m = 0
            for x in bits(S):
                m |= self.ball(x, b)
            if len(self._enlarge_cache) > 500_000:
                self._enlarge_cache.clear()
            self._enlarge_cache[key] = m
        return m

    def set_distance(self, A: int, B: int) -> Optional[int]:
        """Minimal distance between two nonempty point sets."""
        if not A or not B:
            return None
        return int(self.dist[np.ix_(bits(A), bits(B))].min())

    def set_diameter(self, S: int) -> int:
        if not S:
            raise ValueError("diameter of the empty set is undefined")
        idx = bits(S)
        return int(self.dist[np.ix_(idx, idx)].max())


def _hashable(label) -> Hashable:
    if isinstance(label, list):
        return tuple(label)
    return label


def enlarge(space: FiniteMetricSpace, S: int, b: int) -> int:
    """``S[b]``: all points within distance ``b`` of some point of ``S``."""
    return space.enlarge(S, b)


def disjointness_violation(space: FiniteMetricSpace, family: Sequence[int], R: int) -> Optional[Violation]:
    """First pair violating ``R``-disjointness of ``family``, if any."""
    fam = list(family)
    for a in range(len(fam)):
        for c in range(a + 1, len(fam)):
            if fam[a] & fam[c]:
                return Violation("members overlap", {"members": [a, c]})
    total = 0
    for m in fam:
        total |= m
    for a, A in enumerate(fam):
        others = total & ~A
        if space.enlarge(A, R) & others:
            for c, C in enumerate(fam):
                if c != a and space.enlarge(A, R) & C:
                    return Violation(
                        f"members closer than {R + 1}",
                        {"members": [a, c], "distance": space.set_distance(A, C)},
                    )
    return None


def is_r_disjoint(space: FiniteMetricSpace, family: Sequence[int], R: int) -> bool:
    return disjointness_violation(space, family, R) is None


def diameter(space: FiniteMetricSpace, S: int) -> int:
    return space.set_diameter(S)


def mesh(space: FiniteMetricSpace, family: Sequence[int]) -> int:
    fam = list(family)
    if not fam:
        raise ValueError("mesh of an empty family is undefined")
    return max(space.set_diameter(S) for S in fam)


def cayley_ball(group: GroupSpec, r: int, cap: int = DEFAULT_POINT_CAP) -> FiniteMetricSpace:
    """Ball of radius ``r`` about the identity with the true word metric.

    Distances are word lengths of ``x^-1 y`` in the whole group, not path
    lengths inside the truncated ball.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    e = group.identity
    seen = {e: 0}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        if seen[x] == r:
            continue
        for g in group.generators:
            y = group.mul(x, g)
            if y not in seen:
                seen[y] = seen[x] + 1
                if len(seen) > cap:
                    raise SpaceTooLarge(f"ball exceeds the point cap {cap}")
                queue.append(y)
    elems = sorted(seen, key=group.sort_key)
    n = len(elems)
    D = np.zeros((n, n), dtype=np.int64)
    for i, x in enumerate(elems):
        xi = group.inv(x)
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = group.length(group.mul(xi, elems[j]))
    return FiniteMetricSpace(D, labels=[group.label(x) for x in elems], group=group,
                             elements=elems, radius=r, validate=False)


def parse_space(expr: str, cap: int = DEFAULT_POINT_CAP) -> FiniteMetricSpace:
    """Build a space from ``"zball:4"``, ``"z2ball:8"``, ``"zn:3:2"``, ``"free:2:2"``, ``"cycle:6"``."""
    parts = expr.strip().split(":")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValueError(f"bad space expression {expr!r}") from None
    head = parts[0]
    m = re.fullmatch(r"z(\d*)ball", head)
    if m and len(nums) == 1:
        return cayley_ball(GroupSpec("zn", int(m.group(1) or 1)), nums[0], cap)
    if head == "zn" and len(nums) == 2:
        return cayley_ball(GroupSpec("zn", nums[0]), nums[1], cap)
    if head == "free" and len(nums) == 2:
        return cayley_ball(GroupSpec("free", nums[0]), nums[1], cap)
    if head == "cycle" and len(nums) in (1, 2):
        mm = nums[0]
        return cayley_ball(GroupSpec("cycle", mm), nums[1] if len(nums) == 2 else mm // 2, cap)
    raise ValueError(f"bad space expression {expr!r}")
