import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsealg.metric import (FiniteMetricSpace, GroupSpec, SpaceTooLarge, bits, cayley_ball, diameter,
                              disjointness_violation, enlarge, is_r_disjoint, mask_of, mesh, parse_space,
                              validate_metric)


def brute_enlarge(space, S, b):
    return mask_of(y for y in range(space.n) if any(space.dist[x, y] <= b for x in bits(S)))


def test_zball_is_an_interval():
    sp = parse_space("zball:4")
    assert sp.n == 9
    assert sp.labels == list(range(-4, 5))
    for i, j in itertools.product(range(9), repeat=2):
        assert sp.dist[i, j] == abs(i - j)
    assert sp.diameter == 8


def test_z2ball_uses_the_word_metric():
    sp = parse_space("z2ball:3")
    # the L1 ball of radius 3 in Z^2 has 2*3*3 + 2*3 + 1 points
    assert sp.n == 25
    for i, j in itertools.product(range(sp.n), repeat=2):
        (a, b), (c, d) = sp.labels[i], sp.labels[j]
        assert sp.dist[i, j] == abs(a - c) + abs(b - d)


def test_cycle_six():
    sp = parse_space("cycle:6")
    assert sp.n == 6 and sp.diameter == 3
    for i, j in itertools.product(range(6), repeat=2):
        assert sp.dist[i, j] == min((i - j) % 6, (j - i) % 6)


def test_free_group_ball_counts_reduced_words():
    sp = parse_space("free:2:2")
    # 1 + 4 + 4*3 reduced words of length at most 2
    assert sp.n == 17
    assert validate_metric(sp.dist) is None
    assert sp.diameter == 4


def test_truncated_ball_keeps_global_distances():
    # in Z^2 the points (2,0) and (0,2) are at word distance 4 inside the radius-2 ball
    sp = parse_space("z2ball:2")
    i, j = sp.index([2, 0]), sp.index([0, 2])
    assert sp.dist[i, j] == 4


def test_point_cap():
    with pytest.raises(SpaceTooLarge):
        cayley_ball(GroupSpec("free", 3), 6, cap=100)


@pytest.mark.parametrize("expr", ["zball", "zball:x", "torus:3", "zn:2"])
def test_bad_expressions(expr):
    with pytest.raises(ValueError):
        parse_space(expr)


def test_validate_metric_names_the_failure():
    assert validate_metric([[0, 1], [2, 0]]).reason == "distance is not symmetric"
    v = validate_metric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert v.reason == "triangle inequality fails"
    assert validate_metric([[0, 0], [0, 0]]).reason == "distinct points at distance 0"
    assert validate_metric([[1]]).reason == "nonzero self-distance"
    with pytest.raises(ValueError):
        FiniteMetricSpace([[0, 3, 1], [3, 0, 1], [1, 1, 0]])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 13 - 1), st.integers(0, 3))
def test_enlarge_matches_brute_force(N, S, b):
    sp = parse_space(f"zball:{N}")
    S &= sp.full
    assert enlarge(sp, S, b) == brute_enlarge(sp, S, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 13 - 1), st.integers(0, 3), st.integers(0, 3))
def test_enlargement_composes(S, a, b):
    sp = parse_space("z2ball:2")
    S &= sp.full
    assert enlarge(sp, enlarge(sp, S, a), b) == enlarge(sp, S, a + b)


def test_disjointness_uses_strict_distance():
    sp = parse_space("zball:5")
    A, B = sp.mask([-5, -4]), sp.mask([-1, 0])
    assert sp.set_distance(A, B) == 3
    assert is_r_disjoint(sp, [A, B], 2)
    v = disjointness_violation(sp, [A, B], 3)
    assert v is not None and v.witness == {"members": [0, 1], "distance": 3}
    assert disjointness_violation(sp, [A, A], 0).reason == "members overlap"


def test_diameter_and_mesh():
    sp = parse_space("zball:5")
    fam = [sp.mask([-5, -3]), sp.mask([0, 1, 2, 3])]
    assert diameter(sp, fam[0]) == 2
    assert mesh(sp, fam) == 3
    with pytest.raises(ValueError):
        diameter(sp, 0)
    with pytest.raises(ValueError):
        mesh(sp, [])


def test_random_metric_from_graph_is_valid():
    rng = np.random.default_rng(0)
    n = 7
    W = np.full((n, n), 99, dtype=np.int64)
    np.fill_diagonal(W, 0)
    for i in range(n - 1):
        W[i, i + 1] = W[i + 1, i] = int(rng.integers(1, 4))
    for k in range(n):
        W = np.minimum(W, W[:, [k]] + W[[k], :])
    assert validate_metric(W) is None
