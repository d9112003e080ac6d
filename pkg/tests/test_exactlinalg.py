import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsealg.exactlinalg import (DimensionError, Ring, Solver, apply, canonicalize, contains, express_in_sum,
                                   image, includes, intersect, inverse, kernel_of, matmul, rank_of, solve,
                                   submodule_sum)

GF2, GF3, GF5 = Ring.prime_field(2), Ring.prime_field(3), Ring.prime_field(5)
QQ, ZZ = Ring.rationals(), Ring.integers()


def span_set(p, n, gens):
    """Every vector of the GF(p)-span, by enumeration of coefficients."""
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(gens)):
        out.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) % p for i in range(n)))
    return out or {(0,) * n}


def sub_set(M):
    return span_set(M.ring.p, M.ambient_rank, list(M.basis))


def vectors(p, n):
    return st.tuples(*[st.integers(0, p - 1)] * n)


def gen_lists(p, n, max_size=3):
    return st.lists(vectors(p, n), min_size=0, max_size=max_size)


# ---------------------------------------------------------------- rings


def test_ring_parse_and_str():
    assert str(Ring.parse("GF(7)")) == "GF(7)"
    assert Ring.parse("QQ") == QQ
    assert Ring.parse("Z") == ZZ
    with pytest.raises(ValueError):
        Ring.parse("GF(6)")
    with pytest.raises(ValueError):
        Ring.parse("RR")


def test_coerce_rationals_into_prime_field():
    assert GF5.coerce("1/2") == 3
    assert GF5.coerce(-1) == 4
    assert QQ.coerce("2/4") == Fraction(1, 2)
    with pytest.raises(ValueError):
        ZZ.coerce("1/2")
    with pytest.raises(ValueError):
        ZZ.coerce(0.5)


def test_array_rejects_ragged_rows():
    with pytest.raises(DimensionError):
        GF5.array([(1, 2), (1, 2, 3)], 2)
    with pytest.raises(DimensionError):
        GF5.array(np.zeros((2, 3), dtype=int), 2)


# ---------------------------------------------------------------- canonical forms


def test_rref_over_field_is_canonical():
    A = canonicalize([(1, 1, 0), (0, 1, 1)], GF2)
    B = canonicalize([(1, 0, 1), (1, 1, 0)], GF2)
    assert A == B
    assert A.basis == ((1, 0, 1), (0, 1, 1))


def test_hnf_known_values():
    M = canonicalize([(4, 6), (2, 3), (0, 5)], ZZ)
    assert M.basis == ((2, 3), (0, 5))
    M = canonicalize([(-3, 0)], ZZ)
    assert M.basis == ((3, 0),)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-6, 6)] * 3), min_size=1, max_size=4),
       st.lists(st.tuples(*[st.integers(-3, 3)] * 4), min_size=4, max_size=4))
def test_hnf_invariant_under_unimodular_recombination(gens, ops):
    M = canonicalize(gens, ZZ, 3)
    rows = [list(g) for g in gens]
    # elementary unimodular row operations keep the span
    for i, j, k, _ in ops:
        i, j = i % len(rows), j % len(rows)
        if i != j:
            rows[i] = [a + k * b for a, b in zip(rows[i], rows[j])]
    assert canonicalize(rows, ZZ, 3) == M


def test_zero_and_full():
    assert canonicalize([], GF3, 4).is_zero
    assert canonicalize([(0, 0)], QQ).rank == 0
    assert canonicalize(np.eye(3, dtype=int), ZZ).rank == 3


# ---------------------------------------------------------------- oracle equivalence


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_sum_and_intersection_match_enumeration(p, data):
    n = data.draw(st.integers(1, 4))
    g1 = data.draw(gen_lists(p, n))
    g2 = data.draw(gen_lists(p, n))
    R = Ring.prime_field(p)
    M1, M2 = canonicalize(g1, R, n), canonicalize(g2, R, n)
    s1, s2 = span_set(p, n, g1), span_set(p, n, g2)
    assert sub_set(M1) == s1
    S = submodule_sum(M1, M2)
    assert sub_set(S) == span_set(p, n, g1 + g2)
    assert sub_set(intersect(M1, M2)) == s1 & s2
    assert includes(S, M1) and includes(S, M2)
    v = data.draw(vectors(p, n))
    assert contains(M1, v) == (v in s1)


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_kernel_and_express_match_enumeration(p, data):
    R = Ring.prime_field(p)
    n = data.draw(st.integers(1, 4))
    m = data.draw(st.integers(1, 4))
    A = data.draw(st.lists(vectors(p, n), min_size=m, max_size=m))
    K = kernel_of(A, R, n)
    brute = {v for v in itertools.product(range(p), repeat=n)
             if all(sum(a * x for a, x in zip(row, v)) % p == 0 for row in A)}
    assert sub_set(K) == brute
    g1, g2 = data.draw(gen_lists(p, n)), data.draw(gen_lists(p, n))
    M1, M2 = canonicalize(g1, R, n), canonicalize(g2, R, n)
    v = data.draw(vectors(p, n))
    res = express_in_sum(v, M1, M2)
    if v in span_set(p, n, g1 + g2):
        v1, v2 = res
        assert contains(M1, v1) and contains(M2, v2)
        assert tuple((a + b) % p for a, b in zip(v1, v2)) == v
    else:
        assert res is None


def test_kernel_over_integers_is_saturated():
    K = kernel_of([(2, 4)], ZZ)
    assert K == canonicalize([(2, -1)], ZZ)
    assert not contains(K, (4, 0))


# ---------------------------------------------------------------- maps and solving


def test_solve_and_apply_round_trip_qq():
    A = [(1, 2), (3, 4)]
    x = solve(A, (5, 6), QQ)
    assert apply(A, x, QQ) == (Fraction(5), Fraction(6))
    inv = inverse(A, QQ)
    assert (matmul(inv, A, QQ) == np.eye(2, dtype=int)).all()


def test_solve_over_integers_respects_divisibility():
    assert solve([(2, 0), (0, 2)], (1, 0), ZZ) is None
    assert solve([(2, 0), (0, 2)], (2, 4), ZZ) == (1, 2)
    assert inverse([(2, 0), (0, 1)], ZZ) is None


def test_solver_batch_agrees_with_single():
    rng = np.random.default_rng(3)
    gens = rng.integers(0, 5, size=(4, 6))
    sv = Solver(GF5, gens, 6)
    T = np.vstack([rng.integers(0, 5, size=(2, 4)).dot(gens) % 5, rng.integers(0, 5, size=(3, 6))])
    X, ok = sv.solve_many(T)
    for row, x, good in zip(T, X, ok):
        single = sv.solve(tuple(row.tolist()))
        assert good == (single is not None)
        if good:
            assert tuple((x.dot(gens) % 5).tolist()) == tuple(row.tolist())


def test_image_and_rank():
    M = canonicalize([(1, 0, 0), (0, 1, 0)], GF3)
    A = [(1, 1, 0), (0, 0, 1)]
    assert image(A, M).basis == ((1, 0),)
    assert rank_of(A, GF3) == 2
    with pytest.raises(DimensionError):
        image([(1, 1)], M)


def test_mismatched_ranks_raise():
    with pytest.raises(DimensionError):
        submodule_sum(canonicalize([(1, 0)], GF2), canonicalize([(1, 0, 1)], GF2))
    with pytest.raises(DimensionError):
        intersect(canonicalize([(1, 0)], GF2), canonicalize([(1, 0)], GF3))
