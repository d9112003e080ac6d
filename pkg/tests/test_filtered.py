"""Filtration constants against a set-level oracle over GF(2).

The oracle stores ``F(S)`` as the literal set of vectors, so sums,
intersections and inclusions are plain set operations.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsealg.exactlinalg import Ring, canonicalize, intersect
from coarsealg.filtered import (INF, Caps, GeneratedFiltration, IsometryAction, StandardSubFiltration,
                                check_equivariance, free_filtration, generate_group, insular_constant,
                                lean_constant, local_ranks, minimal_constant, split_constant)
from coarsealg.metric import bits, parse_space

GF2 = Ring.prime_field(2)


def span(gens, n):
    out = {(0,) * n}
    for g in gens:
        out |= {tuple((a + b) % 2 for a, b in zip(v, g)) for v in out}
    return frozenset(out)


def ssum(A, B, n):
    return span(list(A) + list(B), n)


class Oracle:
    def __init__(self, space, gens, n):
        self.space, self.gens, self.n = space, gens, n

    def F(self, S):
        return span([v for v, s in self.gens if not s & ~S], self.n)

    def lean(self):
        sp = self.space
        for D in range(sp.diameter + 1):
            ok = True
            for S in range(1, 1 << sp.n):
                local = span([], self.n)
                for x in bits(S):
                    local = ssum(local, self.F(sp.ball(x, D)), self.n)
                if not self.F(S) <= local:
                    ok = False
                    break
            if ok:
                return D
        return INF

    def split(self):
        sp = self.space
        for delta in range(sp.diameter + 1):
            if all(self.F(A | B) <= ssum(self.F(sp.enlarge(A, delta)), self.F(sp.enlarge(B, delta)), self.n)
                   for A in range(1 << sp.n) for B in range(1 << sp.n) if not A & B):
                return delta
        return INF

    def insular(self):
        sp = self.space
        for d in range(sp.diameter + 1):
            if all(self.F(A) & self.F(B) <= self.F(sp.enlarge(A, d) & sp.enlarge(B, d))
                   for A in range(1 << sp.n) for B in range(1 << sp.n)):
                return d
        return INF


@st.composite
def small_filtrations(draw):
    N = draw(st.integers(1, 2))
    sp = parse_space(f"zball:{N}")
    n = draw(st.integers(1, 3))
    k = draw(st.integers(1, 4))
    gens = []
    for _ in range(k):
        v = tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
        s = draw(st.integers(1, sp.full))
        gens.append((v, s))
    return sp, gens, n


@settings(max_examples=40, deadline=None)
@given(small_filtrations())
def test_constants_match_set_oracle(case):
    sp, gens, n = case
    F = GeneratedFiltration(sp, GF2, gens, n)
    O = Oracle(sp, gens, n)
    for S in range(1 << sp.n):
        assert set(map(tuple, F.eval(S).basis)) <= O.F(S)
        assert len(O.F(S)) == 2 ** F.eval(S).rank
    ev = Caps(subset=16, pair=16)
    assert lean_constant(F, "exhaustive", ev).value == O.lean()
    assert lean_constant(F, "generator-reduced").value == O.lean()
    assert split_constant(F, "exhaustive", ev).value == O.split()
    assert split_constant(F, "generator-reduced").value == O.split()
    assert insular_constant(F, "exhaustive", ev).value == O.insular()


def test_path_module_constants():
    # one free line per point, then a single vector spread over both ends
    sp = parse_space("zball:1")
    gens = [((1, 0, 0), 0b001), ((0, 1, 0), 0b010), ((0, 0, 1), 0b100)]
    F = GeneratedFiltration(sp, GF2, gens)
    assert F.coordinate_supports == [[1], [2], [4]]
    assert lean_constant(F).value == 0
    assert split_constant(F).value == 0
    assert insular_constant(F).value == 0
    wide = GeneratedFiltration(sp, GF2, [((1, 1), 0b101)])
    assert lean_constant(wide).value == 2
    assert lean_constant(wide, limit=1).value == INF
    assert lean_constant(wide, limit=1).witness is not None


def test_sampled_results_are_labelled():
    sp = parse_space("zball:8")
    F = free_filtration(sp, GF2, [1] * sp.n)
    K = StandardSubFiltration(F, canonicalize([(1,) * sp.n], GF2))
    r = lean_constant(K, caps=Caps(subset=8, trials=20, seed=3))
    assert r.mode == "sampled(seed=3, trials=20)"
    again = lean_constant(StandardSubFiltration(F, canonicalize([(1,) * sp.n], GF2)),
                          caps=Caps(subset=8, trials=20, seed=3))
    assert again.value == r.value and again.witness == r.witness


@pytest.mark.parametrize("ring", [Ring.rationals(), Ring.integers(), Ring.prime_field(5)])
def test_coordinate_fast_path_matches_intersection(ring):
    sp = parse_space("zball:2")
    rng = np.random.default_rng(1)
    F = free_filtration(sp, ring, [1, 2, 0, 1, 1])
    sub = canonicalize(rng.integers(-2, 3, size=(3, F.ambient_rank)).tolist(), ring, F.ambient_rank)
    K = StandardSubFiltration(F, sub)
    for S in range(1 << sp.n):
        assert K.eval(S) == intersect(sub, F.eval(S))


def test_minimal_constant_is_monotone_search():
    thresholds = [0, 3, 2, 5, 1]
    value, wit, count = minimal_constant(thresholds, lambda t, c: c >= t, list(range(8)))
    assert (value, wit, count) == (5, 5, 5)
    value, wit, _ = minimal_constant([9], lambda t, c: c >= t, list(range(8)))
    assert value == INF and wit == 9


def test_caps_parse():
    assert Caps.parse("subset=6, seed=4") == Caps(subset=6, seed=4)
    with pytest.raises(ValueError):
        Caps.parse("depth=2")


def test_local_ranks():
    sp = parse_space("zball:2")
    F = free_filtration(sp, GF2, [1, 0, 2, 0, 1])
    assert local_ranks(F, 0) == [1, 0, 2, 0, 1]
    assert local_ranks(F, 1) == [1, 3, 2, 3, 1]


def test_generated_filtration_validation():
    sp = parse_space("zball:1")
    with pytest.raises(ValueError):
        GeneratedFiltration(sp, GF2, [((1,), 0)])
    with pytest.raises(ValueError):
        GeneratedFiltration(sp, GF2, [((1,), 1 << 5)])
    with pytest.raises(ValueError):
        GeneratedFiltration(sp, GF2, [((1, 0), 1), ((1,), 2)])


# ---------------------------------------------------------------- equivariance


def rotation(sp, ring, rank_per_point=1):
    n = sp.n
    perm = [(i + 1) % n for i in range(n)]
    M = np.zeros((n, n), dtype=int)
    for i in range(n):
        M[perm[i], i] = 1
    return IsometryAction(sp, perm, M.tolist(), ring)


def test_rotation_group_and_equivariance():
    sp = parse_space("cycle:6")
    g = rotation(sp, GF2)
    G = generate_group([g])
    assert len(G) == 6
    F = free_filtration(sp, GF2, [1] * 6)
    assert check_equivariance(F, g).ok
    gens = [(tuple(1 if j in (i, (i + 1) % 6) else 0 for j in range(6)), sp.mask_of_indices([i, (i + 1) % 6]))
            for i in range(6)]
    edges = GeneratedFiltration(sp, GF2, gens)
    assert check_equivariance(edges, g).ok
    broken = GeneratedFiltration(sp, GF2, gens[:-1] + [(gens[-1][0], sp.full)])
    res = check_equivariance(broken, g)
    assert not res.ok and res.witness is not None


def test_isometry_validation():
    sp = parse_space("zball:2")
    with pytest.raises(ValueError):
        IsometryAction(sp, [1, 0, 2, 3, 4], np.eye(5, dtype=int).tolist(), GF2)
    with pytest.raises(ValueError):
        IsometryAction(sp, [4, 3, 2, 1, 0], np.zeros((5, 5), dtype=int).tolist(), GF2)
    flip = IsometryAction(sp, [4, 3, 2, 1, 0], np.eye(5, dtype=int)[::-1].tolist(), GF2)
    assert flip.act(0b00011) == 0b11000
