import numpy as np
import pytest

from coarsealg.exactlinalg import Ring
from coarsealg.filtered import GeneratedFiltration, free_filtration, lean_constant
from coarsealg.metric import parse_space
from coarsealg.morphism import control_report, kernel
from coarsealg.resolution import (PreconditionError, build_admissible_presentation, build_cover_epi,
                                  build_resolution, covering_scale)
from coarsealg.scenario import Scenario, cycle_equivariant, path3_kernel, random_lean_module

GF5, QQ = Ring.prime_field(5), Ring.rationals()


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("reduced", [False, True])
def test_cover_bicontrol_at_most_scale(seed, reduced):
    sp = parse_space("zball:6")
    F = random_lean_module(sp, GF5, np.random.default_rng(seed))
    assert lean_constant(F).value <= 1
    cover = build_cover_epi(F, 1, reduced=reduced)
    assert cover.map.is_epimorphism
    assert control_report(cover.map).bicontrol.value <= 1
    assert cover.rank == sum(cover.point_ranks)
    # each summand sits at a single point
    assert all(bin(s).count("1") == 1 for s in cover.module.supports)


def test_reduced_cover_is_never_larger():
    sp = parse_space("zball:6")
    F = random_lean_module(sp, GF5, np.random.default_rng(11))
    full, red = build_cover_epi(F, 1), build_cover_epi(F, 1, reduced=True)
    assert red.rank <= full.rank
    assert red.map.total_image == full.map.total_image


def test_cover_needs_the_lean_scale():
    sp = parse_space("zball:2")
    F = GeneratedFiltration(sp, QQ, [((1,), sp.full)])
    # the centre's ball of radius 2 is the whole space
    assert lean_constant(F).value == 2
    with pytest.raises(PreconditionError):
        build_cover_epi(F, 1)
    assert build_cover_epi(F).D == 2


def test_covering_scale():
    sp = parse_space("zball:3")
    F = GeneratedFiltration(sp, QQ, [((1, 0), sp.mask([-3, -1])), ((0, 1), sp.mask([2]))])
    assert covering_scale(F) == 1
    assert covering_scale(free_filtration(sp, QQ, [1] * sp.n)) == 0


def test_free_module_resolves_in_one_stage():
    sp = parse_space("zball:3")
    rep = build_resolution(free_filtration(sp, QQ, [1] * sp.n))
    assert rep.terminated and rep.length == 0 and rep.exact
    assert len(rep.stages) == 1


def test_path_kernel_resolution():
    sc = path3_kernel()
    K = kernel(sc.maps["phi"])
    rep = build_resolution(K.filtration)
    assert rep.terminated and rep.exact
    js = rep.to_json()
    assert js["cover"] == "reduced" and js["stages"][0]["kernel_rank"] == 0


def test_cycle_resolution_is_exact_and_composites_vanish():
    sc = Scenario.from_json(cycle_equivariant(6).to_json(), ring="QQ")
    rep = build_resolution(sc.filtration("F1"), kernel_constants=False)
    assert rep.terminated
    assert rep.composites_vanish()
    assert all(s.exact for s in rep.stages)
    assert rep.length == len(rep.stages) - 1


def test_full_cover_may_stall_but_reports_it():
    sc = Scenario.from_json(cycle_equivariant(6).to_json(), ring="QQ")
    rep = build_resolution(sc.filtration("kernel:phi"), max_length=3, reduced=False, kernel_constants=False)
    assert not rep.terminated or rep.exact
    assert len(rep.stages) <= 3
    assert rep.to_json()["cover"] == "full"


def test_admissible_presentation():
    sc = path3_kernel()
    pres = build_admissible_presentation(sc.filtrations["F1"])
    assert pres.exact_at_f0
    js = pres.to_json()
    assert js["f0_rank"] == 2 and js["f1_rank"] == 0
    sp = parse_space("zball:2")
    F = random_lean_module(sp, GF5, np.random.default_rng(4), rank=2)
    pres = build_admissible_presentation(F)
    assert pres.exact_at_f0


def test_integer_resolution_with_torsion_cokernel():
    # F/F' has torsion (Z/2 and Z/3 at two points), yet kernels of free ZZ maps stay free
    ZZ = Ring.integers()
    sp = parse_space("zball:2")
    F = GeneratedFiltration(sp, ZZ, [((2,), sp.mask([0])), ((3,), sp.mask([1]))])
    rep = build_resolution(F, 4, kernel_constants=False)
    assert rep.terminated and rep.exact and rep.length == 1
    assert [s.cover.rank for s in rep.stages] == [2, 1]
