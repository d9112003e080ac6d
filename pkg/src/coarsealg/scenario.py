"""Scenario files: JSON (de)serialization, built-in examples and seeded generators.

A scenario bundles a space, a ring, named filtrations, named maps between
them, optional isometry actions and chains, declared constants, caps, and an
ordered list of checks.  Rationals are written as ``"p/q"`` strings so that
files stay exact.
"""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .decomp import chain_from_json, chain_to_json, derive_chain_for_cvbbcc
from .exactlinalg import DimensionError, Ring, inverse
from .filtered import Caps, FilteredModule, GeneratedFiltration, IsometryAction, StandardSubFiltration
from .exactlinalg import canonicalize
from .metric import FiniteMetricSpace, bits, parse_space
from .morphism import FilteredMap, kernel

SCHEMA = "coarsealg-scenario/1"

__all__ = [
    "SCHEMA",
    "Scenario",
    "ScenarioError",
    "encode_scalar",
    "encode_matrix",
    "load_scenario",
    "dump_scenario",
    "path3_kernel",
    "zball_kernel",
    "z2ball_chain",
    "cycle_equivariant",
    "random_idempotent",
    "random_epimorphism",
    "random_scenario",
    "random_lean_module",
    "generate_example",
    "GENERATORS",
]


class ScenarioError(ValueError):
    """Malformed scenario input; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def encode_scalar(x):
    if isinstance(x, Fraction):
        return int(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def encode_matrix(A) -> list:
    return [[encode_scalar(x) for x in row] for row in np.asarray(A, dtype=object).tolist()]


def _encode_label(l):
    return list(l) if isinstance(l, tuple) else l


def _encode_vector(v) -> dict:
    """Unit vectors are written as ``{"unit": i}``, everything else densely."""
    nz = [i for i, x in enumerate(v) if x]
    if len(nz) == 1 and v[nz[0]] == 1:
        return {"unit": nz[0]}
    return {"vector": [encode_scalar(x) for x in v]}


def _decode_vector(g: dict, rank, ring: Ring) -> tuple:
    if "unit" in g:
        if rank is None:
            raise ValueError("unit generators need ambient_rank")
        i = int(g["unit"])
        if not 0 <= i < rank:
            raise ValueError(f"unit index {i} out of range")
        return tuple(ring.coerce(int(j == i)) for j in range(rank))
    return tuple(ring.coerce(x) for x in g["vector"])


@dataclass
class Scenario:
    name: str
    space_expr: Any
    space: FiniteMetricSpace
    ring: Ring
    filtrations: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)  # name -> {filtration name: IsometryAction}
    chains: dict = field(default_factory=dict)   # name -> JSON spec
    declared: dict = field(default_factory=dict)
    caps: Caps = field(default_factory=Caps)
    checks: list = field(default_factory=list)
    description: str = ""
    seed_declared: bool = True

    # -- references -------------------------------------------------------

    def filtration(self, ref: str) -> FilteredModule:
        """A named filtration, or ``"kernel:<map>"`` for a map's kernel."""
        if ref.startswith("kernel:"):
            return kernel(self.map(ref[7:])).filtration
        try:
            return self.filtrations[ref]
        except KeyError:
            raise ScenarioError(f"filtration {ref!r}", "not defined") from None

    def map(self, ref: str) -> FilteredMap:
        try:
            return self.maps[ref]
        except KeyError:
            raise ScenarioError(f"map {ref!r}", "not defined") from None

    def action(self, ref: str) -> dict:
        try:
            return self.actions[ref]
        except KeyError:
            raise ScenarioError(f"action {ref!r}", "not defined") from None

    def chain(self, ref: str, D: Optional[int] = None, b: Optional[int] = None, d: Optional[int] = None):
        try:
            spec = self.chains[ref]
        except KeyError:
            raise ScenarioError(f"chain {ref!r}", "not defined") from None
        if "derive" in spec:
            dv = spec["derive"]
            return derive_chain_for_cvbbcc(
                self.space, int(dv.get("D", D)), int(dv.get("b", b)), int(dv.get("d", d)),
                dv.get("strategy", "interval"), dv.get("rounds"), dv.get("mesh_cap"))
        return chain_from_json(self.space, spec)

    def _name_of(self, F) -> str:
        for k, v in self.filtrations.items():
            if v is F:
                return k
        raise ScenarioError("maps", "map endpoint is not a named filtration")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        sp = self.space
        filts = {}
        for name, F in self.filtrations.items():
            if isinstance(F, GeneratedFiltration):
                filts[name] = {
                    "kind": "generated",
                    "ambient_rank": F.ambient_rank,
                    "generators": [dict(_encode_vector(v), support=[_encode_label(l) for l in sp.labels_of(s)])
                                   for v, s in F.generators],
                }
            elif isinstance(F, StandardSubFiltration):
                filts[name] = {"kind": "sub", "parent": self._name_of(F.parent), "basis": encode_matrix(F.sub.rows)}
            else:
                raise ScenarioError(f"filtrations.{name}", "cannot serialize this filtration type")
        out = {
            "schema": SCHEMA,
            "name": self.name,
            "description": self.description,
            "space": self.space_expr,
            "ring": str(self.ring),
            "filtrations": filts,
            "maps": {k: {"source": self._name_of(m.source), "target": self._name_of(m.target),
                         "matrix": encode_matrix(m.matrix)} for k, m in self.maps.items()},
            "actions": {k: {"perm": list(next(iter(acts.values())).perm),
                            "matrices": {f: encode_matrix(a.matrix) for f, a in acts.items()}}
                        for k, acts in self.actions.items()},
            "chains": self.chains,
            "declared": self.declared,
            "caps": {"subset": self.caps.subset, "pair": self.caps.pair, "trials": self.caps.trials,
                     "seed": self.caps.seed},
            "checks": self.checks,
        }
        return out

    @classmethod
    def from_json(cls, data: dict, ring: Optional[str] = None) -> "Scenario":
        """Parse a scenario; ``ring`` reinterprets the stored integer entries over another ring."""
        if not isinstance(data, dict):
            raise ScenarioError("scenario", "top level must be an object")
        if data.get("schema") != SCHEMA:
            raise ScenarioError("schema", f"expected {SCHEMA!r}, got {data.get('schema')!r}")
        name = data.get("name", "unnamed")
        space_expr = data.get("space")
        try:
            if isinstance(space_expr, str):
                space = parse_space(space_expr)
            elif isinstance(space_expr, dict) and "matrix" in space_expr:
                labels = space_expr.get("labels")
                space = FiniteMetricSpace(space_expr["matrix"], labels=labels)
            else:
                raise ValueError("expected an expression string or {matrix, labels}")
        except (ValueError, TypeError) as e:
            raise ScenarioError("space", str(e)) from None
        try:
            ring = Ring.parse(str(ring or data.get("ring", "QQ")))
        except ValueError as e:
            raise ScenarioError("ring", str(e)) from None
        sc = cls(name, space_expr, space, ring, description=data.get("description", ""))

        def support(where, labels):
            try:
                return space.mask(labels)
            except KeyError as e:
                raise ScenarioError(where, str(e)) from None

        pending = dict(data.get("filtrations", {}))
        while pending:
            progressed = False
            for fname, spec in list(pending.items()):
                where = f"filtrations.{fname}"
                kind = spec.get("kind", "generated")
                try:
                    if kind == "generated":
                        gens = []
                        for i, g in enumerate(spec.get("generators", [])):
                            gens.append((_decode_vector(g, spec.get("ambient_rank"), ring),
                                         support(f"{where}.generators[{i}].support", g["support"])))
                        sc.filtrations[fname] = GeneratedFiltration(space, ring, gens, spec.get("ambient_rank"))
                    elif kind == "sub":
                        parent = spec["parent"]
                        if parent not in sc.filtrations:
                            if parent not in pending:
                                raise ScenarioError(f"{where}.parent", f"unknown filtration {parent!r}")
                            continue
                        P = sc.filtrations[parent]
                        sub = canonicalize([tuple(r) for r in spec.get("basis", [])], ring, P.ambient_rank)
                        sc.filtrations[fname] = StandardSubFiltration(P, sub)
                    else:
                        raise ScenarioError(f"{where}.kind", f"unknown kind {kind!r}")
                except (DimensionError, ValueError, KeyError, TypeError) as e:
                    if isinstance(e, ScenarioError):
                        raise
                    raise ScenarioError(where, str(e)) from None
                del pending[fname]
                progressed = True
            if not progressed:
                raise ScenarioError("filtrations", "cyclic parent references")
        for mname, spec in data.get("maps", {}).items():
            where = f"maps.{mname}"
            try:
                src, tgt = sc.filtrations[spec["source"]], sc.filtrations[spec["target"]]
            except KeyError as e:
                raise ScenarioError(where, f"unknown filtration {e}") from None
            mat = spec.get("matrix")
            if not isinstance(mat, list) or len(mat) != tgt.ambient_rank or any(
                    not isinstance(r, list) or len(r) != src.ambient_rank for r in mat):
                raise ScenarioError(f"{where}.matrix",
                                    f"expected a {tgt.ambient_rank} x {src.ambient_rank} row array")
            try:
                M = ring.array(mat, src.ambient_rank) if mat else np.zeros((0, src.ambient_rank), dtype=ring.dtype)
                sc.maps[mname] = FilteredMap(src, tgt, M)
            except (DimensionError, ValueError) as e:
                raise ScenarioError(where, str(e)) from None
        for aname, spec in data.get("actions", {}).items():
            where = f"actions.{aname}"
            acts = {}
            for fname, mat in spec.get("matrices", {}).items():
                if fname not in sc.filtrations:
                    raise ScenarioError(f"{where}.matrices", f"unknown filtration {fname!r}")
                try:
                    acts[fname] = IsometryAction(space, spec["perm"], mat, ring)
                except (ValueError, KeyError, DimensionError) as e:
                    raise ScenarioError(where, str(e)) from None
            sc.actions[aname] = acts
        sc.chains = dict(data.get("chains", {}))
        sc.declared = dict(data.get("declared", {}))
        caps = data.get("caps", {})
        try:
            sc.caps = Caps(**{k: int(v) for k, v in caps.items()})
        except (TypeError, ValueError) as e:
            raise ScenarioError("caps", str(e)) from None
        sc.seed_declared = "seed" in caps
        checks = data.get("checks", [])
        if not isinstance(checks, list) or any(not isinstance(c, dict) or "check" not in c for c in checks):
            raise ScenarioError("checks", "expected a list of objects with a 'check' field")
        sc.checks = checks
        return sc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(sc.to_json(), indent=1, sort_keys=False) + "\n"


def load_scenario(path, ring: Optional[str] = None) -> Scenario:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ScenarioError(str(path), f"invalid JSON at line {e.lineno}: {e.msg}") from None
    except OSError as e:
        raise ScenarioError(str(path), e.strerror or str(e)) from None
    return Scenario.from_json(data, ring)


# ---------------------------------------------------------------------------
# built-in examples


def _unit(n: int, i: int) -> tuple:
    v = [0] * n
    v[i] = 1
    return tuple(v)


def _perm_matrix(perm: list[int], ring: Ring) -> np.ndarray:
    n = len(perm)
    M = np.zeros((n, n), dtype=ring.dtype)
    one = ring.coerce(1)
    for i, j in enumerate(perm):
        M[j, i] = one
    if ring.kind == "QQ":
        M = np.where(M == 0, Fraction(0), M).astype(object)
    return M


def path3_kernel() -> Scenario:
    """Two end generators mapping to plus and minus a middle generator."""
    expr = {"matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]], "labels": [0, 1, 2]}
    sp = FiniteMetricSpace(expr["matrix"], labels=expr["labels"])
    QQ = Ring.rationals()
    F1 = GeneratedFiltration(sp, QQ, [((1, 0), sp.mask([0])), ((0, 1), sp.mask([2]))])
    G = GeneratedFiltration(sp, QQ, [((1,), sp.mask([1]))])
    phi = FilteredMap(F1, G, QQ.array([[1, -1]], 2))
    return Scenario(
        "path3-kernel", expr, sp, QQ, {"F1": F1, "G": G}, {"phi": phi},
        description="Path of three points; the kernel split constant attains its bound.",
        declared={"delta": 0, "b": 1, "d": 0},
        checks=[
            {"check": "control", "map": "phi", "expect": {"control": 1, "bicontrol": 1}},
            {"check": "kernel-split-bound", "map": "phi", "expect_equal": True},
            {"check": "split-kernel-elements", "map": "phi", "covers": [[[0], [2]]]},
            {"check": "disjoint-family", "map": "phi", "family": [[0], [2]], "expect": "fail"},
            {"check": "resolution", "filtration": "kernel:phi", "max_length": 8},
            {"check": "classical-facts", "map": "phi"},
        ],
    )


def _edge_kernel(space: FiniteMetricSpace, ring: Ring, axis_edges, shift: bool):
    """Point generators ``a_x`` and edge generators ``c_xy`` over point generators ``u_x``.

    ``φ(c_xy) = u_x + u_y``; ``φ(a_x) = u_{x+e}`` along the first axis when
    ``shift`` (so control is 1), else ``u_x``.
    """
    n = space.n
    edges = [(x, y) for x in range(n) for y in range(x + 1, n) if space.dist[x, y] == 1 and axis_edges(x, y)]
    N = n + len(edges)
    F1 = GeneratedFiltration(space, ring, [(_unit(N, i), 1 << i) for i in range(n)]
                             + [(_unit(N, n + j), (1 << x) | (1 << y)) for j, (x, y) in enumerate(edges)], N)
    G = GeneratedFiltration(space, ring, [(_unit(n, i), 1 << i) for i in range(n)], n)
    M = np.zeros((n, N), dtype=ring.dtype)
    one = ring.coerce(1)
    if ring.kind == "QQ":
        M = np.full((n, N), Fraction(0), dtype=object)
    for x in range(n):
        target = x
        if shift:
            nb = _step(space, x)
            target = nb if nb is not None else x
        M[target, x] = one
    for j, (x, y) in enumerate(edges):
        M[x, n + j] = one
        M[y, n + j] = one
    return F1, G, FilteredMap(F1, G, M)


def _step(space: FiniteMetricSpace, x: int):
    e = space.elements[x]
    nxt = (e[0] + 1,) + tuple(e[1:])
    try:
        return space.elements.index(nxt)
    except ValueError:
        return None


def _first_axis(space):
    def ok(x, y):
        a, b = space.elements[x], space.elements[y]
        return a[1:] == b[1:]
    return ok


def zball_kernel(N: int = 32, D: int = 1, b: int = 1, d: int = 1, ring: str = "GF(5)") -> Scenario:
    expr = f"zball:{N}"
    sp = parse_space(expr)
    R = Ring.parse(ring)
    F1, G, phi = _edge_kernel(sp, R, lambda x, y: True, shift=True)
    return Scenario(
        f"zball{N}-kernel", expr, sp, R, {"F1": F1, "G": G}, {"phi": phi},
        description="Edge kernel on an integer interval driven through the interval chain.",
        declared={"D": D, "b": b, "d": d},
        chains={"interval": {"derive": {"strategy": "interval", "D": D, "b": b, "d": d}}},
        checks=[
            {"check": "declared-constants", "map": "phi"},
            {"check": "lean-decompose", "map": "phi", "chain": "interval"},
        ],
    )


def z2ball_chain(N: int = 8, D: int = 1, b: int = 1, d: int = 1, ring: str = "GF(5)") -> Scenario:
    expr = f"z2ball:{N}"
    sp = parse_space(expr)
    R = Ring.parse(ring)
    F1, G, phi = _edge_kernel(sp, R, _first_axis(sp), shift=True)
    return Scenario(
        f"z2ball{N}-chain", expr, sp, R, {"F1": F1, "G": G}, {"phi": phi},
        description="Horizontal edge kernel on a square grid driven through the product chain.",
        declared={"D": D, "b": b, "d": d},
        chains={"product": {"derive": {"strategy": "product", "D": D, "b": b, "d": d}}},
        checks=[
            {"check": "declared-constants", "map": "phi"},
            {"check": "lean-decompose", "map": "phi", "chain": "product"},
        ],
    )


def cycle_equivariant(m: int = 6, broken: bool = False, ring: str = "QQ") -> Scenario:
    """Rotation-equivariant edge kernel on a cycle; ``broken`` stretches one support."""
    expr = f"cycle:{m}"
    sp = parse_space(expr)
    R = Ring.parse(ring)
    idx = [sp.index(x) for x in range(m)]  # idx[label] = point index
    n = m
    N = 2 * m
    gens1 = []
    for x in range(m):
        gens1.append((_unit(N, x), 1 << idx[x]))
    for x in range(m):
        supp = (1 << idx[x]) | (1 << idx[(x + 1) % m])
        if broken and x == 0:
            supp |= 1 << idx[2 % m]
        gens1.append((_unit(N, m + x), supp))
    F1 = GeneratedFiltration(sp, R, gens1, N)
    G = GeneratedFiltration(sp, R, [(_unit(n, x), 1 << idx[x]) for x in range(m)], n)
    rows = [[0] * N for _ in range(n)]
    for x in range(m):
        rows[x][x] = 1
        rows[x][m + x] = 1
        rows[(x + 1) % m][m + x] = 1
    phi = FilteredMap(F1, G, R.array(rows, N))
    perm = [0] * n
    for x in range(m):
        perm[idx[x]] = idx[(x + 1) % m]
    rot1 = [(x + 1) % m for x in range(m)] + [m + (x + 1) % m for x in range(m)]
    rot2 = [(x + 1) % m for x in range(m)]
    acts = {"F1": IsometryAction(sp, perm, _perm_matrix(rot1, R), R),
            "G": IsometryAction(sp, perm, _perm_matrix(rot2, R), R)}
    name = f"cycle{m}-{'broken' if broken else 'equivariant'}"
    checks = [{"check": "equivariance", "filtration": "F1", "action": "rotation",
               "expect": "fail" if broken else "pass"}]
    if not broken:
        checks += [
            {"check": "equivariance", "filtration": "G", "action": "rotation", "expect": "pass"},
            {"check": "classical-facts", "map": "phi", "action": "rotation", "basepoint": 0},
            {"check": "kernel-split-bound", "map": "phi"},
            {"check": "resolution", "filtration": "kernel:phi", "max_length": 8},
        ]
    return Scenario(name, expr, sp, R, {"F1": F1, "G": G}, {"phi": phi}, {"rotation": acts},
                    description="Edge kernel on a cycle with the rotation action.", checks=checks)


# ---------------------------------------------------------------------------
# seeded generators


def _rand_nonzero(ring: Ring, rng):
    while True:
        v = ring.random_element(rng)
        if v:
            return v


def _zero_matrix(ring: Ring, m: int, n: int) -> np.ndarray:
    if ring.kind == "QQ":
        return np.full((m, n), Fraction(0), dtype=object)
    return np.zeros((m, n), dtype=ring.dtype)


def _target_generators(space, rng, radius: int = 1):
    n = space.n
    return [space.ball(c, int(rng.integers(0, radius + 1))) for c in range(n)]


def random_epimorphism(space: FiniteMetricSpace, ring: Ring, rng, D_max: int = 2, b_max: int = 2,
                       extra: float = 0.5):
    """A bicontrolled epimorphism onto a target with independent generators.

    Target generators are basis vectors on small balls (so the target is
    0-insular).  Source generators are basis vectors on balls of radius at
    most ``D_max``, each sent to a random combination of target generators
    within ``b_max`` of its support; missing target generators receive an
    extra preimage supported on their own support.  Returns ``(F1, G, φ)``.
    """
    n = space.n
    tsupp = _target_generators(space, rng)
    m = len(tsupp)
    G = GeneratedFiltration(space, ring, [(_unit(m, j), s) for j, s in enumerate(tsupp)], m)
    k = n + int(extra * n)
    ssupp, cols = [], []
    for _ in range(k):
        c = int(rng.integers(0, n))
        s = space.ball(c, int(rng.integers(0, D_max + 1)))
        reach = space.enlarge(s, int(rng.integers(0, b_max + 1)))
        near = [j for j, t in enumerate(tsupp) if not t & ~reach]
        col = [ring.coerce(0)] * m
        if near:
            for j in rng.choice(near, size=min(len(near), int(rng.integers(1, 4))), replace=False).tolist():
                col[j] = _rand_nonzero(ring, rng)
        ssupp.append(s)
        cols.append(col)
    # repair: every target generator must come from within b_max of its support
    for j, t in enumerate(tsupp):
        reach = space.enlarge(t, b_max)
        idx = [i for i, s in enumerate(ssupp) if not s & ~reach]
        M = canonicalize([cols[i] for i in idx], ring, m) if idx else None
        if M is None or _unit(m, j) not in M:
            col = [ring.coerce(0)] * m
            col[j] = ring.coerce(1)
            ssupp.append(t)
            cols.append(col)
    N = len(ssupp)
    F1 = GeneratedFiltration(space, ring, [(_unit(N, i), s) for i, s in enumerate(ssupp)], N)
    A = _zero_matrix(ring, m, N)
    for i, col in enumerate(cols):
        for j, v in enumerate(col):
            A[j, i] = v
    return F1, G, FilteredMap(F1, G, A)


def random_scenario(seed: int, space: str = "zball:8", ring: str = "GF(5)", D_max: int = 2, b_max: int = 2,
                    covers: int = 50) -> Scenario:
    rng = np.random.default_rng(seed)
    sp = parse_space(space)
    R = Ring.parse(ring)
    F1, G, phi = random_epimorphism(sp, R, rng, D_max, b_max)
    return Scenario(
        f"random-{seed}", space, sp, R, {"F1": F1, "G": G}, {"phi": phi},
        description=f"Seeded random bicontrolled epimorphism (seed {seed}).",
        caps=Caps(seed=seed),
        checks=[
            {"check": "control", "map": "phi"},
            {"check": "kernel-split-bound", "map": "phi"},
            {"check": "split-kernel-elements", "map": "phi", "sampled_covers": covers},
        ],
    )


def random_idempotent(seed: int, N: int = 6, ring: str = "GF(2)", gens: tuple = (8, 10)) -> Scenario:
    """A block-diagonal idempotent ``S diag S^-1`` over groups of nearby generators."""
    rng = np.random.default_rng(seed)
    expr = f"zball:{N}"
    sp = parse_space(expr)
    R = Ring.parse(ring)
    k = int(rng.integers(gens[0], gens[1] + 1))
    centers = sorted(int(c) for c in rng.integers(0, sp.n, size=k))
    supports = [sp.ball(c, int(rng.integers(0, 2))) for c in centers]
    F = GeneratedFiltration(sp, R, [(_unit(k, i), s) for i, s in enumerate(supports)], k)
    P = _zero_matrix(R, k, k)
    i = 0
    while i < k:
        size = min(int(rng.integers(1, 4)), k - i)
        while True:
            S = R.array([[R.random_element(rng) for _ in range(size)] for _ in range(size)], size)
            Sinv = inverse(S, R)
            if Sinv is not None:
                break
        diag = _zero_matrix(R, size, size)
        for t in range(size):
            diag[t, t] = R.coerce(int(rng.integers(0, 2)))
        P[i:i + size, i:i + size] = R.normalize(S.dot(diag).dot(Sinv))
        i += size
    phi = FilteredMap(F, F, P)
    return Scenario(f"idempotent-{seed}", expr, sp, R, {"F": F}, {"P": phi},
                    description=f"Seeded controlled idempotent (seed {seed}).", caps=Caps(seed=seed),
                    checks=[{"check": "idempotent", "map": "P"}])


def random_lean_module(space: FiniteMetricSpace, ring: Ring, rng, rank: int = 4, count: Optional[int] = None,
                       radius: int = 1) -> GeneratedFiltration:
    """Random vectors on balls of radius ``radius``: lean at scale ``radius``."""
    count = space.n if count is None else count
    gens = []
    for _ in range(count):
        c = int(rng.integers(0, space.n))
        s = space.ball(c, int(rng.integers(0, radius + 1)))
        v = tuple(ring.random_element(rng) for _ in range(rank))
        if not any(v):
            v = _unit(rank, int(rng.integers(0, rank)))
        gens.append((v, s))
    return GeneratedFiltration(space, ring, gens, rank)


# ---------------------------------------------------------------------------


GENERATORS = {
    "path3-kernel": lambda: path3_kernel(),
    "zball-kernel": lambda N=32, D=1, b=1, d=1: zball_kernel(int(N), int(D), int(b), int(d)),
    "z2ball-chain": lambda N=8, D=1, b=1, d=1: z2ball_chain(int(N), int(D), int(b), int(d)),
    "cycle-equivariant": lambda m=6, broken=False: cycle_equivariant(int(m), str(broken).lower() in ("1", "true", "yes")),
    "idempotent": lambda seed=0: random_idempotent(int(seed)),
    "random": lambda seed=0: random_scenario(int(seed)),
}


def generate_example(kind: str, **params) -> Scenario:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown example kind {kind!r}; choose from {', '.join(GENERATORS)}") from None
    known = inspect.signature(gen).parameters
    unknown = sorted(set(params) - set(known))
    if unknown:
        raise ValueError(f"{kind} does not take {', '.join(unknown)}; it accepts {', '.join(known) or 'no parameters'}")
    return gen(**params)
