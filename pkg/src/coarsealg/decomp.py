"""Colored decompositions, decomposition chains and the decomposition game.

A chain records families ``V_0 = {X}, V_1, ..., V_n``: step ``k`` decomposes
every member of ``V_{k-1}`` at radius ``R_k`` into pieces of two colors, and
``V_k`` is the list of all emitted pieces in emission order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .metric import FiniteMetricSpace, Violation, bits, disjointness_violation, mesh

__all__ = [
    "ColoredDecomposition",
    "DecompositionChain",
    "ApcWitness",
    "GameResult",
    "GameLost",
    "IntervalStrategy",
    "ProductStrategy",
    "STRATEGIES",
    "get_strategy",
    "validate_decomposition",
    "validate_chain",
    "validate_apc_witness",
    "asdim_multiplicity",
    "chain_to_apc",
    "play_game",
    "cvbbcc_schedule",
    "derive_chain_for_cvbbcc",
    "chain_to_json",
    "chain_from_json",
]


@dataclass(frozen=True)
class ColoredDecomposition:
    target: int
    pieces: tuple  # of (mask, color)

    def color_class(self, color: int) -> list[int]:
        return [m for m, c in self.pieces if c == color]


@dataclass
class DecompositionChain:
    radii: tuple
    steps: list  # steps[k] is a list of ColoredDecomposition, one per member of V_k
    mesh_bound: int
    families: list = field(default_factory=list)

    def __post_init__(self):
        if not self.families:
            self.families = _families_from_steps(self.steps)

    @property
    def n(self) -> int:
        return len(self.steps)

    @property
    def final_family(self) -> list[int]:
        return self.families[-1]


def _families_from_steps(steps, full: Optional[int] = None) -> list:
    fams = []
    if steps:
        fams.append([d.target for d in steps[0]])
    elif full is not None:
        fams.append([full])
    for step in steps:
        fams.append([m for d in step for m, _ in d.pieces])
    return fams


@dataclass
class ApcWitness:
    radii: tuple
    families: list
    bound: Optional[int] = None


def validate_decomposition(space: FiniteMetricSpace, dec: ColoredDecomposition, R: int) -> Optional[Violation]:
    """``None`` iff the pieces cover the target and each color class is ``R``-disjoint."""
    union = 0
    for idx, (m, c) in enumerate(dec.pieces):
        if c not in (1, 2):
            return Violation("color must be 1 or 2", {"piece": idx, "color": c})
        if not m:
            return Violation("empty piece", {"piece": idx})
        if m & ~dec.target:
            return Violation("piece leaves its target", {"piece": idx, "points": space.labels_of(m & ~dec.target)})
        union |= m
    if union != dec.target:
        return Violation("pieces do not cover the target", {"missing": space.labels_of(dec.target & ~union)})
    for color in (1, 2):
        cls = [(i, m) for i, (m, c) in enumerate(dec.pieces) if c == color]
        bad = disjointness_violation(space, [m for _, m in cls], R)
        if bad is not None:
            a, b = bad.witness["members"]
            return Violation(
                f"color {color} is not {R}-disjoint: {bad.reason}",
                {"color": color, "pieces": [cls[a][0], cls[b][0]], "distance": bad.witness.get("distance")},
            )
    return None


def validate_chain(space: FiniteMetricSpace, chain: DecompositionChain) -> Optional[Violation]:
    radii = list(chain.radii)
    if len(radii) != chain.n:
        return Violation("radius count differs from step count", {"radii": len(radii), "steps": chain.n})
    for k in range(1, len(radii)):
        if radii[k] < radii[k - 1]:
            return Violation("radii are not non-decreasing", {"step": k + 1})
    current = [space.full]
    for k, step in enumerate(chain.steps):
        if [d.target for d in step] != current:
            return Violation("step does not decompose every member of the previous family once", {"step": k + 1})
        nxt = []
        for j, dec in enumerate(step):
            bad = validate_decomposition(space, dec, radii[k])
            if bad is not None:
                return Violation(f"step {k + 1}, member {j}: {bad.reason}", {"step": k + 1, "member": j, **bad.witness})
            nxt.extend(m for m, _ in dec.pieces)
        current = nxt
    actual = mesh(space, current)
    if actual > chain.mesh_bound:
        return Violation("final family exceeds the mesh bound", {"mesh": actual, "bound": chain.mesh_bound})
    return None


def validate_apc_witness(space: FiniteMetricSpace, w: ApcWitness) -> Optional[Violation]:
    if len(w.radii) != len(w.families):
        return Violation("one radius per family required", {})
    union = 0
    for i, (R, fam) in enumerate(zip(w.radii, w.families)):
        bad = disjointness_violation(space, fam, R)
        if bad is not None:
            return Violation(f"family {i + 1} is not {R}-disjoint: {bad.reason}", {"family": i + 1, **bad.witness})
        if w.bound is not None and fam and mesh(space, fam) > w.bound:
            return Violation(f"family {i + 1} exceeds the diameter bound", {"family": i + 1, "mesh": mesh(space, fam)})
        for m in fam:
            union |= m
    if union != space.full:
        return Violation("families do not cover the space", {"missing": space.labels_of(space.full & ~union)})
    return None


def asdim_multiplicity(space: FiniteMetricSpace, cover: Sequence[int], d: int) -> int:
    """Largest number of cover elements met by a ``d``-ball."""
    best = 0
    for x in range(space.n):
        B = space.ball(x, d)
        best = max(best, sum(1 for U in cover if U & B))
    return best


def chain_to_apc(chain: DecompositionChain) -> ApcWitness:
    """One family per (level, color), at that level's radius.

    Same-colored pieces of *different* parents need not be far apart, so
    from the second level on the result usually fails
    :func:`validate_apc_witness`; the violation names the offending pair.
    """
    radii, fams = [], []
    for k, step in enumerate(chain.steps):
        for color in (1, 2):
            fam = [m for d in step for m in d.color_class(color)]
            if fam:
                radii.append(chain.radii[k])
                fams.append(fam)
    return ApcWitness(tuple(radii), fams)


# ---------------------------------------------------------------------------
# strategies


def _blocks(space: FiniteMetricSpace, member: int, R: int, axis: int) -> ColoredDecomposition:
    pts = bits(member)
    coords = [space.coordinate(i, axis) for i in pts]
    anchor = min(coords)
    groups: dict[int, int] = {}
    for i, c in zip(pts, coords):
        blk = (c - anchor) // (R + 1)
        groups[blk] = groups.get(blk, 0) | (1 << i)
    pieces = tuple((groups[blk], 1 + blk % 2) for blk in sorted(groups))
    return ColoredDecomposition(member, pieces)


class IntervalStrategy:
    """Consecutive blocks of ``R + 1`` integers, alternating colors, anchored at the least point."""

    name = "interval"
    dimension = 1

    def check_space(self, space: FiniteMetricSpace):
        if not space.is_zball:
            raise ValueError("interval strategy needs a zball space")

    def decompose(self, space, member: int, R: int, round_index: int) -> ColoredDecomposition:
        return _blocks(space, member, R, 0)


class ProductStrategy:
    """Slabs of width ``R+1`` along the first coordinate, then blocks along the second."""

    name = "product"
    dimension = 2

    def check_space(self, space: FiniteMetricSpace):
        g = space.group
        if g is None or g.kind != "zn" or g.k != 2:
            raise ValueError("product strategy needs a z2ball space")

    def decompose(self, space, member: int, R: int, round_index: int) -> ColoredDecomposition:
        return _blocks(space, member, R, min(round_index, 1))


STRATEGIES = {"interval": IntervalStrategy, "product": ProductStrategy}


def get_strategy(kind):
    if not isinstance(kind, str):
        return kind
    try:
        return STRATEGIES[kind]()
    except KeyError:
        raise ValueError(f"unknown strategy {kind!r}") from None


@dataclass
class GameResult:
    won: bool
    chain: Optional[DecompositionChain]
    rounds: int
    mesh_cap: int
    failed_round: Optional[int] = None
    reason: str = ""


class GameLost(RuntimeError):
    def __init__(self, result: GameResult):
        super().__init__(result.reason)
        self.result = result


def play_game(space: FiniteMetricSpace, radii: Sequence[int], strategy="interval",
              mesh_cap: Optional[int] = None, min_rounds: int = 1) -> GameResult:
    """Play the second player's strategy against the announced radii.

    The game is won once the current family has mesh at most ``mesh_cap``
    (default: the sum of the radii) and at least ``min_rounds`` rounds have
    been played.
    """
    strat = get_strategy(strategy)
    strat.check_space(space)
    radii = [int(R) for R in radii]
    if any(R < 0 for R in radii):
        raise ValueError("radii must be non-negative")
    if any(radii[k] < radii[k - 1] for k in range(1, len(radii))):
        raise ValueError("radii must be non-decreasing")
    cap = sum(radii) if mesh_cap is None else int(mesh_cap)
    current = [space.full]
    steps = []
    if not radii:
        m = mesh(space, current)
        if m <= cap:
            return GameResult(True, DecompositionChain((), [], m, [current]), 0, cap)
        return GameResult(False, None, 0, cap, 1, "no radii announced and the space is not bounded")
    for k, R in enumerate(radii):
        step = [strat.decompose(space, member, R, k) for member in current]
        for j, dec in enumerate(step):
            bad = validate_decomposition(space, dec, R)
            if bad is not None:
                return GameResult(False, None, k + 1, cap, k + 1, f"strategy produced an invalid decomposition: {bad.reason}")
        steps.append(step)
        current = [m for d in step for m, _ in d.pieces]
        m = mesh(space, current)
        if m <= cap and k + 1 >= min_rounds:
            chain = DecompositionChain(tuple(radii[: k + 1]), steps, m, [[space.full]] + _families_from_steps(steps)[1:])
            return GameResult(True, chain, k + 1, cap)
    return GameResult(
        False, None, len(radii), cap, len(radii) + 1,
        f"family after round {len(radii)} has mesh {mesh(space, current)} > {cap}; no further radius announced",
    )


def cvbbcc_schedule(D: int, b: int, d: int, rounds: int) -> list[int]:
    """Radii ``R_k = 2(k+1)D + 2b + 2d`` for ``k = 1..rounds``."""
    return [2 * (k + 1) * D + 2 * b + 2 * d for k in range(1, rounds + 1)]


def derive_chain_for_cvbbcc(space: FiniteMetricSpace, D: int, b: int, d: int, strategy="interval",
                            max_rounds: Optional[int] = None, mesh_cap: Optional[int] = None) -> DecompositionChain:
    """Chain for the schedule ``R_k = 2(k+1)D + 2b + 2d``; every scheduled round is played."""
    if min(D, b, d) < 0:
        raise ValueError("constants must be non-negative")
    strat = get_strategy(strategy)
    rounds = strat.dimension if max_rounds is None else max_rounds
    result = play_game(space, cvbbcc_schedule(D, b, d, rounds), strat, mesh_cap, min_rounds=rounds)
    if not result.won:
        raise GameLost(result)
    return result.chain


# ---------------------------------------------------------------------------
# serialization


def chain_to_json(space: FiniteMetricSpace, chain: DecompositionChain) -> dict:
    return {
        "radii": list(chain.radii),
        "mesh_bound": chain.mesh_bound,
        "steps": [
            [
                {"target": space.labels_of(d.target),
                 "pieces": [{"points": space.labels_of(m), "color": c} for m, c in d.pieces]}
                for d in step
            ]
            for step in chain.steps
        ],
    }


def chain_from_json(space: FiniteMetricSpace, data: dict) -> DecompositionChain:
    steps = []
    for step in data["steps"]:
        decs = []
        for d in step:
            pieces = tuple((space.mask(p["points"]), int(p["color"])) for p in d["pieces"])
            decs.append(ColoredDecomposition(space.mask(d["target"]), pieces))
        steps.append(decs)
    fams = [[space.full]] + _families_from_steps(steps)[1:]
    return DecompositionChain(tuple(int(r) for r in data["radii"]), steps, int(data["mesh_bound"]), fams)
