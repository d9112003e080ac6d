"""Controlled and bicontrolled maps, kernels, and the constructive kernel bounds.

The splitting, disjoint-family distribution and chain-driven lean
decomposition below execute the arguments that bound the constants of a
kernel ``K = ker(f) ∩ F`` with its standard filtration, checking every
intermediate membership exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .decomp import DecompositionChain
from .exactlinalg import (
    DimensionError,
    _residual,
    Solver,
    Submodule,
    contains,
    image,
    includes,
    intersect,
    kernel_of,
)
from .filtered import (
    INF,
    Caps,
    ConstantResult,
    FilteredModule,
    GeneratedFiltration,
    IsometryAction,
    StandardSubFiltration,
    _random_mask,
    candidate_constants,
    check_equivariance,
    enumerate_closed,
    insular_constant,
    lean_constant,
    minimal_constant,
    split_constant,
)
from .metric import bits, disjointness_violation

__all__ = [
    "FilteredMap",
    "ControlReport",
    "KernelModule",
    "HypothesisViolation",
    "KernelSplitter",
    "SplitResult",
    "Summand",
    "LeanDecomposition",
    "Fact",
    "control_constant",
    "image_containment_constant",
    "bicontrol_constant",
    "control_report",
    "kernel",
    "split_kernel_element",
    "decompose_kernel_over_disjoint_family",
    "lean_decompose_kernel",
    "classical_facts",
]


class HypothesisViolation(RuntimeError):
    """An inner step failed, so some hypothesis of the argument is false."""

    def __init__(self, step: str, detail: str, level: Optional[int] = None):
        where = f"level {level}, " if level is not None else ""
        super().__init__(f"{where}step '{step}': {detail}")
        self.step = step
        self.detail = detail
        self.level = level


class FilteredMap:
    """An R-linear map ``source -> target`` given by a matrix acting on columns."""

    def __init__(self, source: FilteredModule, target: FilteredModule, matrix):
        if source.space is not target.space:
            raise ValueError("source and target live over different spaces")
        if source.ring != target.ring:
            raise ValueError("source and target use different rings")
        ring = source.ring
        if isinstance(matrix, np.ndarray):
            A = ring.normalize(matrix.astype(ring.dtype, copy=True))
        else:
            A = ring.array([tuple(r) for r in matrix], source.ambient_rank)
        if A.shape != (target.ambient_rank, source.ambient_rank):
            raise DimensionError(
                f"matrix shape {A.shape} does not match {target.ambient_rank} x {source.ambient_rank}")
        self.source = source
        self.target = target
        self.ring = ring
        self.space = source.space
        self.matrix = A
        self._img: dict[int, Submodule] = {}
        if not includes(target.total, self.total_image):
            raise ValueError("matrix does not map the source total module into the target")

    def apply(self, v) -> tuple:
        x = np.asarray(self.ring.array([v], self.source.ambient_rank)[0])
        return tuple(self.ring.normalize(self.matrix.dot(x)).tolist())

    def apply_rows(self, V: np.ndarray) -> np.ndarray:
        return self.ring.normalize(V.dot(self.matrix.T))

    def image(self, M: Submodule) -> Submodule:
        return image(self.matrix, M)

    def image_of(self, S: int) -> Submodule:
        """``f(F1(S))``."""
        S = self.source.closure(S)
        M = self._img.get(S)
        if M is None:
            M = self.image(self.source.eval(S))
            if len(self._img) > 200_000:
                self._img.clear()
            self._img[S] = M
        return M

    @property
    def total_image(self) -> Submodule:
        return self.image_of(self.space.full)

    @property
    def is_epimorphism(self) -> bool:
        """Onto the target's total module (not the ambient module)."""
        return self.total_image == self.target.total

    def is_idempotent(self) -> bool:
        A = self.matrix
        return A.shape[0] == A.shape[1] and np.array_equal(self.ring.normalize(A.dot(A)), A)


@dataclass
class ControlReport:
    control: ConstantResult
    bicontrol: ConstantResult
    surjective: bool

    def to_json(self) -> dict:
        return {"control": self.control.to_json(), "bicontrol": self.bicontrol.to_json(),
                "surjective": self.surjective}


def _mode_label(mode, caps):
    return mode if mode != "sampled" else f"sampled(seed={caps.seed}, trials={caps.trials})"


def control_constant(phi: FilteredMap, mode: str = "auto", caps: Optional[Caps] = None,
                     limit: Optional[int] = None) -> ConstantResult:
    """Least ``b`` with ``f(F1(S)) ⊂ F2(S[b])`` for all ``S``."""
    caps = caps or Caps()
    sp = phi.space
    src, tgt = phi.source, phi.target
    cands = candidate_constants(sp, limit)
    if mode == "auto":
        if isinstance(src, GeneratedFiltration):
            mode = "generator-reduced"
        else:
            mode = "exhaustive" if enumerate_closed(src, caps.subset) is not None else "sampled"
    if mode == "generator-reduced":
        if not isinstance(src, GeneratedFiltration):
            raise ValueError("generator-reduced mode needs a generated source")
        imgs = phi.apply_rows(src._rows) if src.generators else None
        tests = range(len(src.generators))

        def holds(i, b):
            return contains(tgt.eval(sp.enlarge(src.supports[i], b)), tuple(imgs[i].tolist()))

        describe = lambda i: {"generator": i, "support": sp.labels_of(src.supports[i])}
    else:
        if mode == "exhaustive":
            sets = enumerate_closed(src, caps.subset)
            if sets is None:
                raise ValueError("too many subsets for exhaustive mode")
            tests = (S for S in sets if S)
        else:
            rng = np.random.default_rng(caps.seed)
            tests = (src.closure(_random_mask(rng, sp.n)) for _ in range(caps.trials))

        def holds(S, b):
            return includes(tgt.eval(sp.enlarge(S, b)), phi.image_of(S))

        describe = lambda S: {"S": sp.labels_of(S)}
    value, wit, count = minimal_constant(tests, holds, cands)
    return ConstantResult("control", value, _mode_label(mode, caps), describe(wit) if wit is not None else None, count)


def image_containment_constant(phi: FilteredMap, mode: str = "auto", caps: Optional[Caps] = None,
                               limit: Optional[int] = None) -> ConstantResult:
    """Least ``b`` with ``f(F1) ∩ F2(S) ⊂ f(F1(S[b]))`` for all ``S``."""
    caps = caps or Caps()
    sp = phi.space
    tgt = phi.target
    cands = candidate_constants(sp, limit)
    epi = phi.is_epimorphism
    if mode == "auto":
        if isinstance(tgt, GeneratedFiltration) and epi:
            mode = "generator-reduced"
        else:
            mode = "exhaustive" if enumerate_closed(tgt, caps.subset) is not None else "sampled"
    if mode == "generator-reduced":
        if not (isinstance(tgt, GeneratedFiltration) and epi):
            raise ValueError("generator-reduced image containment needs an epimorphism onto a generated target")
        tests = range(len(tgt.generators))

        def holds(j, b):
            return contains(phi.image_of(sp.enlarge(tgt.supports[j], b)), tgt.generators[j][0])

        describe = lambda j: {"target_generator": j, "support": sp.labels_of(tgt.supports[j])}
    else:
        if mode == "exhaustive":
            sets = enumerate_closed(tgt, caps.subset)
            if sets is None:
                raise ValueError("too many subsets for exhaustive mode")
            tests = (S for S in sets if S)
        else:
            rng = np.random.default_rng(caps.seed + 1)
            tests = (tgt.closure(_random_mask(rng, sp.n)) for _ in range(caps.trials))
        total = phi.total_image
        lhs_cache: dict[int, Submodule] = {}

        def holds(S, b):
            lhs = lhs_cache.get(S)
            if lhs is None:
                lhs = tgt.eval(S) if epi else intersect(total, tgt.eval(S))
                lhs_cache.clear()
                lhs_cache[S] = lhs
            if lhs.is_zero:
                return True
            return includes(phi.image_of(sp.enlarge(S, b)), lhs)

        describe = lambda S: {"S": sp.labels_of(S)}
    value, wit, count = minimal_constant(tests, holds, cands)
    return ConstantResult("image-containment", value, _mode_label(mode, caps),
                          describe(wit) if wit is not None else None, count)


def bicontrol_constant(phi: FilteredMap, mode: str = "auto", caps: Optional[Caps] = None,
                       limit: Optional[int] = None) -> ConstantResult:
    return control_report(phi, mode, caps, limit).bicontrol


def control_report(phi: FilteredMap, mode: str = "auto", caps: Optional[Caps] = None,
                   limit: Optional[int] = None) -> ControlReport:
    c = control_constant(phi, mode, caps, limit)
    s = image_containment_constant(phi, mode, caps, limit)
    value = max(c.value, s.value)
    wit = s.witness if s.value > c.value else c.witness
    bi = ConstantResult("bicontrol", value, f"{c.mode} / {s.mode}", wit, c.tested + s.tested)
    return ControlReport(c, bi, phi.is_epimorphism)


# ---------------------------------------------------------------------------
# kernels


class KernelModule:
    """``K = ker(f) ∩ F1`` with the standard filtration ``K(S) = K ∩ F1(S)``."""

    def __init__(self, phi: FilteredMap):
        self.map = phi
        F1 = phi.source
        ker = kernel_of(phi.matrix, phi.ring, F1.ambient_rank)
        self.sub = intersect(ker, F1.total)
        self.filtration = StandardSubFiltration(F1, self.sub)
        self._constants: dict = {}

    @property
    def rank(self) -> int:
        return self.sub.rank

    @property
    def basis(self) -> tuple:
        return self.sub.basis

    def constant(self, kind: str, mode: str = "auto", caps: Optional[Caps] = None) -> ConstantResult:
        key = (kind, mode, caps)
        if key not in self._constants:
            from .filtered import property_constant
            if self.sub.is_zero:
                self._constants[key] = ConstantResult(kind, 0, "trivial (zero kernel)")
            else:
                self._constants[key] = property_constant(self.filtration, kind, mode, caps)
        return self._constants[key]

    def rank_nullity_holds(self) -> bool:
        return self.rank + self.map.total_image.rank == self.map.source.total.rank

    def check_generators(self) -> bool:
        return all(not any(self.map.apply(k)) for k in self.basis)


def kernel(phi: FilteredMap) -> KernelModule:
    return KernelModule(phi)


@dataclass
class SplitResult:
    z1: tuple
    z2: tuple
    radius: int
    radii: tuple  # (delta, delta + b + d, delta + 2b + d): the argument's radius chain


def _zero_row(ring, n):
    return np.zeros((1, n), dtype=ring.dtype) if ring.kind != "QQ" else np.array([ring.zero_vector(n)], dtype=object)


class KernelSplitter:
    """Splits kernel elements of ``K(T ∪ U)`` into ``K(T[r]) + K(U[r])``, ``r = δ + 2b + d``.

    The eliminations depend only on ``(T, U)``, so one splitter serves many
    elements.
    """

    def __init__(self, phi: FilteredMap, T: int, U: int, delta: int, b: int, d: int):
        self.phi = phi
        sp = phi.space
        F1, G = phi.source, phi.target
        ring = phi.ring
        self.ring = ring
        self.T, self.U = T, U
        self.delta, self.b, self.d = delta, b, d
        self.r = r = delta + 2 * b + d
        self.A_T = F1.eval(sp.enlarge(T, delta))
        self.A_U = F1.eval(sp.enlarge(U, delta))
        N = F1.ambient_rank
        gens = np.vstack([self.A_T.rows, self.A_U.rows])
        self.split_solver = Solver(ring, gens, N)
        mid = delta + b + d
        self.G_mid = G.eval(sp.enlarge(T, mid) & sp.enlarge(U, mid))
        self.P = sp.enlarge(T, r) & sp.enlarge(U, r)
        self.B_P = F1.eval(self.P)
        self.lift_solver = Solver(ring, phi.apply_rows(self.B_P.rows), G.ambient_rank)
        self.T_r = F1.eval(sp.enlarge(T, r))
        self.U_r = F1.eval(sp.enlarge(U, r))
        self.TU = F1.eval(T | U)

    def split(self, z) -> SplitResult:
        ring, phi = self.ring, self.phi
        z = tuple(ring.coerce(x) for x in z)
        if any(phi.apply(z)) or not contains(self.TU, z):
            raise ValueError("element is not in K(T ∪ U)")
        x = self.split_solver.solve(z)
        if x is None:
            raise HypothesisViolation("split", f"element not in F1(T[{self.delta}]) + F1(U[{self.delta}]); source is not {self.delta}-split")
        kT = self.A_T.rank
        zarr = ring.array([z], len(z))
        if kT:
            y1 = ring.normalize(np.array([x[:kT]], dtype=ring.dtype).dot(self.A_T.rows))
        else:
            y1 = _zero_row(ring, len(z))
        y2 = ring.normalize(zarr - y1)
        w = phi.apply_rows(y1)[0]
        if not contains(self.G_mid, tuple(w.tolist())):
            raise HypothesisViolation(
                "insular", f"f(y1) not in G(T[{self.delta + self.b + self.d}] ∩ U[{self.delta + self.b + self.d}]); "
                           "target is not insular or the map is not controlled at the given constants")
        c = self.lift_solver.solve(w)
        if c is None:
            raise HypothesisViolation("lift", f"f(y1) has no preimage in F1(T[{self.r}] ∩ U[{self.r}]); map is not {self.b}-bicontrolled")
        if self.B_P.rank:
            y = ring.normalize(np.array([c], dtype=ring.dtype).dot(self.B_P.rows))
        else:
            y = _zero_row(ring, len(z))
        z1 = tuple(ring.normalize(y1 - y)[0].tolist())
        z2 = tuple(ring.normalize(y2 + y)[0].tolist())
        if any(phi.apply(z1)) or not contains(self.T_r, z1) or not contains(self.U_r, z2):
            raise HypothesisViolation("postcondition", "split parts fail their memberships")
        if tuple(ring.normalize(ring.array([z1], len(z)) + ring.array([z2], len(z)))[0].tolist()) != z:
            raise HypothesisViolation("postcondition", "split parts do not sum to the element")
        return SplitResult(z1, z2, self.r, (self.delta, self.delta + self.b + self.d, self.r))


    def split_rows(self, Z) -> list:
        """Split every row of ``Z`` with the same checks as :meth:`split`, batched over fields."""
        ring, phi = self.ring, self.phi
        if not ring.is_field:
            return [self.split(tuple(z)) for z in np.asarray(Z).tolist()]
        N = phi.source.ambient_rank
        Z = ring.normalize(np.asarray(Z, dtype=ring.dtype).reshape(-1, N))
        if not Z.shape[0]:
            return []
        if phi.apply_rows(Z).any() or _residual(self.TU, Z).any():
            raise ValueError("element is not in K(T ∪ U)")
        X, ok = self.split_solver.solve_many(Z)
        if not ok.all():
            raise HypothesisViolation("split", f"element not in F1(T[{self.delta}]) + F1(U[{self.delta}]); source is not {self.delta}-split")
        kT = self.A_T.rank
        Y1 = ring.normalize(X[:, :kT].dot(self.A_T.rows)) if kT else ring.normalize(Z * 0)
        Y2 = ring.normalize(Z - Y1)
        W = phi.apply_rows(Y1)
        if _residual(self.G_mid, W).any():
            raise HypothesisViolation(
                "insular", f"f(y1) not in G(T[{self.delta + self.b + self.d}] ∩ U[{self.delta + self.b + self.d}]); "
                           "target is not insular or the map is not controlled at the given constants")
        C, ok = self.lift_solver.solve_many(W)
        if not ok.all():
            raise HypothesisViolation("lift", f"f(y1) has no preimage in F1(T[{self.r}] ∩ U[{self.r}]); map is not {self.b}-bicontrolled")
        Y = ring.normalize(C.dot(self.B_P.rows)) if self.B_P.rank else ring.normalize(Z * 0)
        Z1, Z2 = ring.normalize(Y1 - Y), ring.normalize(Y2 + Y)
        if phi.apply_rows(Z1).any() or _residual(self.T_r, Z1).any() or _residual(self.U_r, Z2).any():
            raise HypothesisViolation("postcondition", "split parts fail their memberships")
        if ring.normalize(Z1 + Z2 - Z).any():
            raise HypothesisViolation("postcondition", "split parts do not sum to the element")
        radii = (self.delta, self.delta + self.b + self.d, self.r)
        return [SplitResult(tuple(a), tuple(b), self.r, radii) for a, b in zip(Z1.tolist(), Z2.tolist())]


def split_kernel_element(phi: FilteredMap, z, T: int, U: int, delta: Optional[int] = None,
                         b: Optional[int] = None, d: Optional[int] = None,
                         caps: Optional[Caps] = None) -> SplitResult:
    """Split ``z ∈ K(T ∪ U)``; constants not given are computed."""
    if delta is None:
        delta = int(split_constant(phi.source, caps=caps).value)
    if b is None:
        b = int(bicontrol_constant(phi, caps=caps).value)
    if d is None:
        d = int(insular_constant(phi.target, caps=caps).value)
    return KernelSplitter(phi, T, U, delta, b, d).split(z)


def _distribute(phi: FilteredMap, z, pieces: Sequence[int], radius: int, cache: Optional[dict] = None):
    """Write ``z`` as a sum over ``F1(pieces[a][radius])``; parts may leave the kernel."""
    sp, F1, ring = phi.space, phi.source, phi.ring
    N = F1.ambient_rank
    key = ("distribute", tuple(pieces), radius)
    hit = cache.get(key) if cache is not None else None
    if hit is None:
        mods = [F1.eval(sp.enlarge(P, radius)) for P in pieces]
        gens = np.vstack([M.rows for M in mods]) if any(M.rank for M in mods) else np.zeros((0, N), dtype=ring.dtype)
        hit = (mods, Solver(ring, gens, N))
        if cache is not None:
            cache[key] = hit
    mods, solver = hit
    x = solver.solve(z)
    if x is None:
        return None
    parts = []
    pos = 0
    for M in mods:
        coeff = np.array([x[pos:pos + M.rank]], dtype=ring.dtype)
        pos += M.rank
        if M.rank:
            parts.append(tuple(ring.normalize(coeff.dot(M.rows))[0].tolist()))
        else:
            parts.append(ring.zero_vector(N))
    return parts


def decompose_kernel_over_disjoint_family(phi: FilteredMap, k, family: Sequence[int], D: int, b: int, d: int,
                                          radius: int = 0, check_disjointness: bool = True):
    """Distribute ``k ∈ K(⋃ U_a[radius])`` into kernel parts ``k_a ∈ K(U_a[radius + D])``.

    With ``radius = 0`` this needs the family to be ``(2D + 2b + 2d)``-disjoint;
    in general ``2(radius + D + b + d)``-disjoint.  Returns ``[(index, part)]``
    for the nonzero parts.
    """
    sp, ring = phi.space, phi.ring
    k = tuple(ring.coerce(x) for x in k)
    need = 2 * (radius + D + b + d)
    if check_disjointness:
        bad = disjointness_violation(sp, family, need)
        if bad is not None:
            raise HypothesisViolation("disjointness", f"family is not {need}-disjoint: {bad.reason} {bad.witness}")
    union = 0
    for P in family:
        union |= sp.enlarge(P, radius)
    if any(phi.apply(k)) or not contains(phi.source.eval(union), k):
        raise ValueError("element is not in K of the family's union")
    parts = _distribute(phi, k, family, radius + D)
    if parts is None:
        raise HypothesisViolation("lean", f"element is not a sum over F1(U_a[{radius + D}]); source is not {D}-lean")
    out = []
    for a, part in enumerate(parts):
        if any(phi.apply(part)):
            raise HypothesisViolation("kernel", f"part {a} is not a kernel element")
        if any(part):
            out.append((a, part))
    return out


@dataclass
class Summand:
    vector: tuple
    member: int          # index into the final family
    piece: int           # point mask of that member
    tracked_radius: int  # vector ∈ K(piece[tracked_radius])
    center: Optional[int] = None
    certified_radius: Optional[int] = None  # vector ∈ K(center[certified_radius])


@dataclass
class LeanDecomposition:
    element: tuple
    summands: list
    log: list = field(default_factory=list)
    n: int = 0
    mesh: int = 0
    D: int = 0

    @property
    def claimed_bound(self) -> int:
        return self.mesh + 2 * self.n * self.D

    @property
    def max_tracked(self) -> int:
        return max((s.tracked_radius for s in self.summands), default=0)

    @property
    def tracker_bound(self) -> int:
        return self.mesh + self.max_tracked

    @property
    def certified(self) -> int:
        return max((s.certified_radius for s in self.summands), default=0)

    @property
    def proof_guaranteed(self) -> bool:
        return all(e["guaranteed"] for e in self.log)


def _certify(phi: FilteredMap, v: tuple, region: int):
    """Least radius ρ with ``v ∈ F1(x[ρ])`` for some point ``x``; returns ``(ρ, x)``."""
    sp, F1 = phi.space, phi.source
    cands = candidate_constants(sp)
    centers = bits(region) or list(range(sp.n))

    def hit(rho):
        for x in centers:
            if contains(F1.local(x, rho), v):
                return x
        return None

    lo, hi = 0, len(cands) - 1
    if hit(cands[hi]) is None:
        centers = list(range(sp.n))
        if hit(cands[hi]) is None:
            return INF, None
    while lo < hi:
        mid = (lo + hi) // 2
        if hit(cands[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    return cands[lo], hit(cands[lo])


def lean_decompose_kernel(phi: FilteredMap, k, chain: DecompositionChain, D: int, b: int, d: int,
                          kernel_module: Optional[KernelModule] = None, certify: bool = True,
                          cache: Optional[dict] = None) -> LeanDecomposition:
    """Decompose ``k`` into kernel summands carried by the chain's final pieces.

    Each level splits the current element across the two color classes with
    ``KernelSplitter`` and distributes each half over its disjoint pieces.  A
    distribution whose disjointness precondition fails numerically falls back
    to an exact solve over the pieces' kernel submodules at the least radius
    that works; the log records which steps were guaranteed and which were
    computed.  Pass the same ``cache`` dict when decomposing many elements
    against one chain.
    """
    cache = {} if cache is None else cache
    sp, ring = phi.space, phi.ring
    K = kernel_module or kernel(phi)
    k = tuple(ring.coerce(x) for x in k)
    if any(phi.apply(k)) or not contains(phi.source.total, k):
        raise ValueError("element is not in the kernel")
    log = []
    states = [(k, 0, 0)] if any(k) else []  # (element, member index, radius)
    families = chain.families
    for level, R in enumerate(chain.radii, start=1):
        step = chain.steps[level - 1]
        offsets = np.cumsum([0] + [len(dec.pieces) for dec in step]).tolist()
        new_states = []
        for z, idx, r in states:
            dec = step[idx]
            classes = {c: [(offsets[idx] + j, m) for j, (m, cc) in enumerate(dec.pieces) if cc == c] for c in (1, 2)}
            if classes[1] and classes[2]:
                T = 0
                for _, m in classes[1]:
                    T |= m
                U = 0
                for _, m in classes[2]:
                    U |= m
                skey = ("split", sp.enlarge(T, r), sp.enlarge(U, r), D, b, d)
                splitter = cache.get(skey)
                if splitter is None:
                    splitter = cache[skey] = KernelSplitter(phi, skey[1], skey[2], D, b, d)
                res = splitter.split(z)
                halves = [(classes[1], res.z1), (classes[2], res.z2)]
                r_half = r + res.radius
                log.append({"level": level, "member": idx, "step": "split", "radius": r_half, "guaranteed": True})
            else:
                halves = [(classes[1] or classes[2], z)]
                r_half = r
            for cls, zc in halves:
                if not any(zc):
                    continue
                if len(cls) == 1:
                    new_states.append((zc, cls[0][0], r_half))
                    continue
                pieces = [m for _, m in cls]
                need = 2 * (r_half + D + b + d)
                guaranteed = disjointness_violation(sp, pieces, need) is None
                parts = _distribute(phi, zc, pieces, r_half + D, cache)
                rho = r_half + D
                if parts is None or any(any(phi.apply(p)) for p in parts):
                    if guaranteed:
                        raise HypothesisViolation("distribute", "guaranteed distribution failed", level)
                    parts, rho = _kernel_distribute(K, zc, pieces, rho)
                log.append({"level": level, "member": idx, "step": "distribute", "radius": rho,
                            "guaranteed": guaranteed, "required_disjointness": need,
                            "pieces": len(pieces)})
                for (j, _), part in zip(cls, parts):
                    if any(part):
                        new_states.append((part, j, rho))
        states = new_states
    final = families[-1]
    summands = []
    for v, j, r in states:
        s = Summand(v, j, final[j], r)
        if certify:
            s.certified_radius, s.center = _certify(phi, v, sp.enlarge(final[j], r))
        summands.append(s)
    total = ring.array([ring.zero_vector(len(k))], len(k))
    for s in summands:
        total = ring.normalize(total + ring.array([s.vector], len(k)))
    if tuple(total[0].tolist()) != k:
        raise HypothesisViolation("reassembly", "summands do not add up to the element")
    for s in summands:
        if any(phi.apply(s.vector)) or not contains(phi.source.eval(sp.enlarge(s.piece, s.tracked_radius)), s.vector):
            raise HypothesisViolation("membership", f"summand on member {s.member} leaves K(W[{s.tracked_radius}])")
    M = chain.mesh_bound
    return LeanDecomposition(k, summands, log, chain.n, M, D)


def _kernel_distribute(K: KernelModule, z, pieces, start: int):
    sp, ring = K.map.space, K.map.ring
    N = K.filtration.ambient_rank
    for rho in candidate_constants(sp):
        if rho < start and rho < sp.diameter:
            continue
        mods = [K.filtration.eval(sp.enlarge(P, rho)) for P in pieces]
        if not any(M.rank for M in mods):
            continue
        x = Solver(ring, np.vstack([M.rows for M in mods]), N).solve(z)
        if x is None:
            continue
        parts, pos = [], 0
        for M in mods:
            coeff = np.array([x[pos:pos + M.rank]], dtype=ring.dtype)
            pos += M.rank
            parts.append(tuple(ring.normalize(coeff.dot(M.rows))[0].tolist()) if M.rank else ring.zero_vector(N))
        return parts, rho
    raise HypothesisViolation("distribute", "element is not a sum of kernel elements over the pieces")


# ---------------------------------------------------------------------------
# classical facts


@dataclass
class Fact:
    name: str
    outcome: str  # "pass" | "fail" | "n/a"
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"fact": self.name, "outcome": self.outcome, "detail": self.detail}


def _intertwines(phi: FilteredMap, a: IsometryAction, t: IsometryAction) -> bool:
    ring = phi.ring
    return a.perm == t.perm and np.array_equal(ring.normalize(t.matrix.dot(phi.matrix)),
                                               ring.normalize(phi.matrix.dot(a.matrix)))


def classical_facts(phi: FilteredMap, source_action: Optional[IsometryAction] = None,
                    target_action: Optional[IsometryAction] = None, group: Optional[Sequence[IsometryAction]] = None,
                    basepoint: int = 0, mode: str = "auto", caps: Optional[Caps] = None,
                    image_facts: bool = True) -> list[Fact]:
    """Evaluate the elementary facts about ``phi`` as checks with witnesses.

    ``group`` is the full list of source isometries used by the
    finite-generation check (translates of ``K ∩ F1(e[D])``).
    """
    caps = caps or Caps()
    facts = []
    F1, F2 = phi.source, phi.target
    rep = control_report(phi, mode, caps)
    b, bi = rep.control.value, rep.bicontrol.value
    lean1 = lean_constant(F1, mode, caps)
    lean2 = lean_constant(F2, mode, caps)
    consts = {"control": _js(b), "bicontrol": _js(bi), "source_lean": _js(lean1.value), "target_lean": _js(lean2.value)}

    same_module = F1.ambient_rank == F2.ambient_rank and F1.total == F2.total
    identity = same_module and np.array_equal(phi.matrix, np.eye(F1.ambient_rank, dtype=int).astype(phi.ring.dtype))
    if identity:
        facts.append(Fact("filtration-change identity is bicontrolled", "pass" if bi != INF else "fail",
                          {"bicontrol": _js(bi)}))
    else:
        facts.append(Fact("filtration-change identity is bicontrolled", "n/a", {"reason": "map is not an identity"}))

    if source_action is not None and target_action is not None:
        eq = (_intertwines(phi, source_action, target_action)
              and check_equivariance(F1, source_action, caps=caps).ok
              and check_equivariance(F2, target_action, caps=caps).ok)
        if eq:
            ok = lean1.finite and b != INF
            facts.append(Fact("equivariant map from a lean source is controlled", "pass" if ok else "fail",
                              {"source_lean": _js(lean1.value), "control": _js(b)}))
        else:
            facts.append(Fact("equivariant map from a lean source is controlled", "n/a", {"reason": "not equivariant"}))
    else:
        facts.append(Fact("equivariant map from a lean source is controlled", "n/a", {"reason": "no action given"}))

    if rep.surjective and b != INF and lean1.finite and lean2.finite:
        facts.append(Fact("controlled epimorphism of lean modules is bicontrolled", "pass" if bi != INF else "fail",
                          {"bicontrol": _js(bi)}))
    else:
        facts.append(Fact("controlled epimorphism of lean modules is bicontrolled", "n/a",
                          {"reason": "not a controlled epimorphism of lean modules"}))

    if image_facts:
        ins1 = insular_constant(F1, mode, caps)
        ins2 = insular_constant(F2, mode, caps)
        if bi != INF and lean1.finite and lean2.finite and ins1.finite and ins2.finite:
            img = StandardSubFiltration(F2, phi.total_image)
            il = lean_constant(img, mode, caps)
            ii = insular_constant(img, mode, caps)
            ok = il.finite and ii.finite
            facts.append(Fact("image of a bicontrolled map of lean insular modules is lean and insular",
                              "pass" if ok else "fail",
                              {"image_lean": il.to_json(), "image_insular": ii.to_json()}))
        else:
            facts.append(Fact("image of a bicontrolled map of lean insular modules is lean and insular", "n/a", {}))

    if phi.is_idempotent() and same_module:
        facts.append(Fact("controlled idempotent is bicontrolled with bicontrol <= control",
                          "pass" if bi <= b else "fail", {"control": _js(b), "bicontrol": _js(bi)}))
    else:
        facts.append(Fact("controlled idempotent is bicontrolled with bicontrol <= control", "n/a",
                          {"reason": "map is not an idempotent endomorphism"}))

    if group:
        orbit = 0
        for g in group:
            orbit |= 1 << g.perm[basepoint]
        if orbit != phi.space.full:
            facts.append(Fact("kernel generated by translates of K ∩ F(e[D])", "n/a", {"reason": "action is not transitive"}))
        else:
            K = kernel(phi)
            DK = K.constant("lean", mode, caps)
            local = K.filtration.eval(phi.space.ball(basepoint, int(DK.value)))
            from .exactlinalg import submodule_sum
            span = submodule_sum(*[image(g.matrix, local) for g in group]) if local.rank else local
            ok = span == K.sub
            facts.append(Fact("kernel generated by translates of K ∩ F(e[D])", "pass" if ok else "fail",
                              {"kernel_lean": DK.to_json(), "kernel_rank": K.rank, "local_rank": local.rank,
                               "translates_rank": span.rank, "surrogate": "finite isometry group"}))
    else:
        facts.append(Fact("kernel generated by translates of K ∩ F(e[D])", "n/a", {"reason": "no group given"}))
    for f in facts:
        f.detail.setdefault("constants", consts)
    return facts


def _js(v):
    return "inf" if v == INF else int(v)
