import pytest
from hypothesis import given, settings, strategies as st

from coarsealg.decomp import (ColoredDecomposition, asdim_multiplicity, DecompositionChain, GameLost, chain_from_json, chain_to_apc,
                              chain_to_json, cvbbcc_schedule, derive_chain_for_cvbbcc, play_game,
                              validate_apc_witness, validate_chain, validate_decomposition)
from coarsealg.metric import is_r_disjoint, parse_space


def test_schedule_values():
    assert cvbbcc_schedule(1, 1, 1, 2) == [8, 10]
    assert cvbbcc_schedule(2, 0, 1, 3) == [10, 14, 18]


def test_interval_blocks_on_a_small_line():
    sp = parse_space("zball:4")
    res = play_game(sp, [2])
    assert res.won
    (dec,) = res.chain.steps[0]
    assert [sp.labels_of(m) for m, _ in dec.pieces] == [[-4, -3, -2], [-1, 0, 1], [2, 3, 4]]
    assert [c for _, c in dec.pieces] == [1, 2, 1]
    assert validate_decomposition(sp, dec, 2) is None
    # one block of the other color sits between same-colored blocks: distance R + 2
    assert validate_decomposition(sp, dec, 3) is None
    assert validate_decomposition(sp, dec, 4) is not None


@pytest.mark.parametrize("N", [1, 4, 9])
def test_interval_strategy_wins_every_radius(N):
    sp = parse_space(f"zball:{N}")
    for R in range(2 * N + 1):
        res = play_game(sp, [R])
        assert res.won, (N, R, res.reason)
        assert validate_chain(sp, res.chain) is None
        assert res.chain.mesh_bound <= R


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_product_strategy_wins(a, b):
    sp = parse_space("z2ball:4")
    r1, r2 = sorted((a, b))
    res = play_game(sp, [r1, r2], "product")
    assert res.won
    assert validate_chain(sp, res.chain) is None


def test_single_round_on_the_plane_fails():
    sp = parse_space("z2ball:8")
    res = play_game(sp, [4], "product")
    assert not res.won
    assert res.failed_round == 2
    assert "mesh" in res.reason


def test_strategy_space_checks():
    with pytest.raises(ValueError):
        play_game(parse_space("z2ball:2"), [1], "interval")
    with pytest.raises(ValueError):
        play_game(parse_space("zball:2"), [1], "product")
    with pytest.raises(ValueError):
        play_game(parse_space("zball:2"), [2, 1])
    with pytest.raises(ValueError):
        play_game(parse_space("zball:2"), [1], "spiral")


def test_derived_chains_match_the_schedule():
    line = parse_space("zball:32")
    chain = derive_chain_for_cvbbcc(line, 1, 1, 1)
    assert chain.radii == (8,) and chain.n == 1
    plane = parse_space("z2ball:8")
    chain = derive_chain_for_cvbbcc(plane, 1, 1, 1, "product")
    assert chain.radii == (8, 10) and chain.n == 2
    assert validate_chain(plane, chain) is None
    with pytest.raises(GameLost):
        derive_chain_for_cvbbcc(plane, 1, 1, 1, "product", mesh_cap=0)


def test_chain_json_round_trip():
    sp = parse_space("z2ball:3")
    chain = play_game(sp, [1, 2], "product").chain
    back = chain_from_json(sp, chain_to_json(sp, chain))
    assert back.radii == chain.radii
    assert back.families == chain.families
    assert validate_chain(sp, back) is None


def test_validate_chain_reports_bad_steps():
    sp = parse_space("zball:3")
    good = play_game(sp, [1]).chain
    bad_mesh = DecompositionChain(good.radii, good.steps, 0)
    assert validate_chain(sp, bad_mesh).reason == "final family exceeds the mesh bound"
    # merge two blocks of the same color: they end up too close
    dec = ColoredDecomposition(sp.full, ((sp.mask([-3, -2]), 1), (sp.mask([-1, 0]), 1), (sp.mask([1, 2, 3]), 2)))
    v = validate_chain(sp, DecompositionChain((1,), [[dec]], 10))
    assert v is not None and "color 1" in v.reason
    gap = ColoredDecomposition(sp.full, ((sp.mask([-3]), 1),))
    assert validate_decomposition(sp, gap, 1).reason == "pieces do not cover the target"


def test_apc_witness_from_chain():
    sp = parse_space("zball:10")
    chain = play_game(sp, [3]).chain
    w = chain_to_apc(chain)
    assert validate_apc_witness(sp, w) is None
    for R, fam in zip(w.radii, w.families):
        assert is_r_disjoint(sp, fam, R)


def test_flattened_two_level_chain_is_not_an_apc_witness():
    sp = parse_space("z2ball:8")
    w = chain_to_apc(derive_chain_for_cvbbcc(sp, 1, 1, 1, "product"))
    v = validate_apc_witness(sp, w)
    assert v is not None
    assert v.witness["family"] >= 3 and v.witness["distance"] < 10


@pytest.mark.parametrize("L,d", [(3, 1), (5, 2), (6, 2)])
def test_interval_cover_multiplicity(L, d):
    sp = parse_space("zball:12")
    pts = list(range(sp.n))
    cover = [sp.mask_of_indices(pts[i:i + L]) for i in range(0, sp.n, L)]
    assert asdim_multiplicity(sp, cover, d) == 2
