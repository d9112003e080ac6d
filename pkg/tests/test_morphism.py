import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarsealg.checks import random_cover
from coarsealg.exactlinalg import Ring, canonicalize
from coarsealg.filtered import INF, Caps, GeneratedFiltration, free_filtration, split_constant
from coarsealg.metric import bits, parse_space
from coarsealg.morphism import (FilteredMap, HypothesisViolation, KernelSplitter, control_constant,
                                control_report, decompose_kernel_over_disjoint_family,
                                image_containment_constant, kernel, lean_decompose_kernel,
                                split_kernel_element)
from coarsealg.scenario import path3_kernel, random_idempotent, random_scenario, zball_kernel

GF2 = Ring.prime_field(2)


def span(gens, n):
    out = {(0,) * n}
    for g in gens:
        out |= {tuple((a + b) % 2 for a, b in zip(v, g)) for v in out}
    return frozenset(out)


def mat_apply(M, v):
    return tuple(int(x) % 2 for x in np.asarray(M).dot(np.asarray(v)))


@st.composite
def gf2_maps(draw):
    sp = parse_space(f"zball:{draw(st.integers(1, 2))}")
    n1, n2 = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    vec = lambda n: tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    g1 = [(vec(n1), draw(st.integers(1, sp.full))) for _ in range(draw(st.integers(1, 3)))]
    # every unit vector of the target is available on its own support, so any matrix lands in G
    g2 = [(tuple(int(i == j) for i in range(n2)), draw(st.integers(1, sp.full))) for j in range(n2)]
    g2 += [(vec(n2), draw(st.integers(1, sp.full))) for _ in range(draw(st.integers(0, 2)))]
    M = [vec(n1) for _ in range(n2)]
    return sp, g1, g2, M, n1, n2


@settings(max_examples=40, deadline=None)
@given(gf2_maps())
def test_control_constants_match_set_oracle(case):
    sp, g1, g2, M, n1, n2 = case
    F1 = GeneratedFiltration(sp, GF2, g1, n1)
    F2 = GeneratedFiltration(sp, GF2, g2, n2)
    phi = FilteredMap(F1, F2, M)
    A = lambda S: span([v for v, s in g1 if not s & ~S], n1)
    B = lambda S: span([v for v, s in g2 if not s & ~S], n2)
    f = lambda X: frozenset(mat_apply(M, v) for v in X)
    control = next((b for b in range(sp.diameter + 1)
                    if all(f(A(S)) <= B(sp.enlarge(S, b)) for S in range(1 << sp.n))), INF)
    img = f(A(sp.full))
    contain = next((b for b in range(sp.diameter + 1)
                    if all(img & B(S) <= f(A(sp.enlarge(S, b))) for S in range(1 << sp.n))), INF)
    ev = Caps(subset=16)
    assert control_constant(phi).value == control
    assert control_constant(phi, "exhaustive", ev).value == control
    assert image_containment_constant(phi, "exhaustive", ev).value == contain
    if phi.is_epimorphism:
        assert image_containment_constant(phi, "generator-reduced").value == contain
    assert control_report(phi, "exhaustive", ev).bicontrol.value == max(control, contain)


def test_path_example_values():
    sc = path3_kernel()
    phi = sc.maps["phi"]
    rep = control_report(phi)
    assert (rep.control.value, rep.bicontrol.value, rep.surjective) == (1, 1, True)
    K = kernel(phi)
    assert K.rank == 1 and K.rank_nullity_holds() and K.check_generators()
    assert split_constant(phi.source).value == 0
    assert K.constant("split").value == 2
    z = K.basis[0]
    res = split_kernel_element(phi, z, sc.space.mask([0]), sc.space.mask([2]))
    assert res.radius == 2 and res.radii == (0, 1, 2)
    assert not any(phi.apply(res.z1)) and not any(phi.apply(res.z2))
    with pytest.raises(HypothesisViolation) as err:
        decompose_kernel_over_disjoint_family(phi, z, [sc.space.mask([0]), sc.space.mask([2])], 0, 1, 0)
    assert err.value.step == "disjointness"
    with pytest.raises(HypothesisViolation) as err:
        decompose_kernel_over_disjoint_family(phi, z, [sc.space.mask([0]), sc.space.mask([2])], 0, 1, 0,
                                              check_disjointness=False)
    assert err.value.step in ("lean", "kernel")


def test_splitter_rejects_non_kernel_elements():
    sc = path3_kernel()
    phi = sc.maps["phi"]
    sp = sc.space
    splitter = KernelSplitter(phi, sp.mask([0]), sp.mask([2]), 0, 1, 0)
    with pytest.raises(ValueError):
        splitter.split((1, 0))


def test_undersized_constants_are_reported():
    sc = path3_kernel()
    phi = sc.maps["phi"]
    sp = sc.space
    z = kernel(phi).basis[0]
    with pytest.raises(HypothesisViolation) as err:
        KernelSplitter(phi, sp.mask([0]), sp.mask([2]), 0, 0, 0).split(z)
    assert err.value.step in ("insular", "lift", "postcondition")


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_batched_split_matches_single(seed):
    sc = random_scenario(seed, covers=0)
    phi = sc.maps["phi"]
    d1 = int(split_constant(phi.source).value)
    b = int(control_report(phi).bicontrol.value)
    K = kernel(phi)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        T, U = random_cover(sc.space, rng)
        assert T | U == sc.space.full
        sp = KernelSplitter(phi, T, U, d1, b, 0)
        batch = sp.split_rows(K.sub.rows)
        for z, r in zip(K.basis, batch):
            one = sp.split(z)
            assert (one.z1, one.z2) == (r.z1, r.z2)
            assert r.radius == d1 + 2 * b


def test_lean_decomposition_on_the_line():
    sc = zball_kernel(N=16, D=1, b=1, d=1)
    phi = sc.maps["phi"]
    chain = sc.chain("interval", 1, 1, 1)
    K = kernel(phi)
    cache = {}
    for z in K.basis[:6]:
        dec = lean_decompose_kernel(phi, z, chain, 1, 1, 1, kernel_module=K, cache=cache)
        assert dec.certified <= dec.claimed_bound
        total = np.zeros(len(z), dtype=np.int64)
        for s in dec.summands:
            assert not any(phi.apply(s.vector))
            total = (total + np.asarray(s.vector)) % 5
        assert tuple(total.tolist()) == tuple(z)


def test_idempotents_have_bicontrol_at_most_control():
    for seed in range(5):
        sc = random_idempotent(seed)
        P = sc.maps["P"]
        assert P.is_idempotent()
        rep = control_report(P)
        assert rep.bicontrol.value <= rep.control.value


def test_map_validation():
    sp = parse_space("zball:1")
    F = free_filtration(sp, GF2, [1, 1, 1])
    G = GeneratedFiltration(sp, GF2, [((1, 0, 0), 1)], 3)
    with pytest.raises(ValueError):
        FilteredMap(F, G, np.eye(3, dtype=int))
    with pytest.raises(ValueError):
        FilteredMap(F, free_filtration(parse_space("zball:1"), GF2, [1, 1, 1]), np.eye(3, dtype=int))
    with pytest.raises(ValueError):
        FilteredMap(F, F, [(1, 0, 0), (0, 1, 0)])
