"""Acceptance run: one test per criterion, each printing a PASS/FAIL line.

The lines are printed in the terminal summary (see ``conftest.py``) of any
pytest run that includes this file, and also by ``python tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from coarsealg.checks import run_check
from coarsealg.exactlinalg import Ring
from coarsealg.filtered import insular_constant, split_constant
from coarsealg.morphism import control_report, kernel
from coarsealg.resolution import build_cover_epi, build_resolution
from coarsealg.scenario import load_scenario, path3_kernel, random_lean_module
from coarsealg.metric import parse_space
from coarsealg.suites import run_suite, shipped_path, shipped_scenarios

LINES = []


def _emit(n, ok, text, seconds):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}  {seconds:7.1f}s  {text}"
    LINES.append(line)
    assert ok, line


def _suite(name, **kw):
    res = run_suite(name, **kw)
    return res, res.seconds


def test_criterion_01_kernel_split_bound():
    res, sec = _suite("tkobbis", count=200, covers=50)
    d = res.details
    ok = res.ok and d["bound_ok"] == 200 and d["split_ok"] == 200 and sec < 60
    _emit(1, ok, res.summary, sec)


def test_criterion_02_tightness_on_the_path():
    t0 = time.perf_counter()
    sc = path3_kernel()
    phi = sc.maps["phi"]
    delta = split_constant(phi.source).value
    b = control_report(phi).bicontrol.value
    d = insular_constant(phi.target).value
    ks = kernel(phi).constant("split").value
    ok = (delta, b, d) == (0, 1, 0) and ks == delta + 2 * b + d == 2
    _emit(2, ok, f"delta={delta} b={b} d={d} kernel split={ks}", time.perf_counter() - t0)


def test_criterion_03_disjoint_family_distribution():
    res, sec = _suite("cvbbtd", count=100)
    d = res.details
    ok = res.ok and d["exact_ok"] == 100 and d["counterexample"]["outcome"] == "pass"
    _emit(3, ok, res.summary, sec)


def test_criterion_04_lean_decomposition_pipelines():
    res, sec = _suite("cvbbcc")
    pipes = res.details["pipelines"]
    ok = res.ok and sec < 120 and len(pipes) == 2
    for det in pipes.values():
        ok &= det["max_certified_radius"] <= det["claimed_bound"]
    ns = sorted(det["n"] for det in pipes.values())
    ok &= ns == [1, 2]
    _emit(4, ok, res.summary, sec)


def test_criterion_05_idempotents():
    t0 = time.perf_counter()
    res = run_suite("classical", count=100)
    ok = res.ok and "100/100" in res.summary
    _emit(5, ok, res.summary, time.perf_counter() - t0)


def test_criterion_06_geometry():
    res, sec = _suite("geometry", count=1000)
    _emit(6, res.ok, res.summary, sec)


def test_criterion_07_linear_algebra_oracle():
    res, sec = _suite("linalg-oracle", count=500, zcount=200)
    ok = res.ok and sec < 10
    _emit(7, ok, res.summary, sec)


def test_criterion_08_game():
    res, sec = _suite("game")
    _emit(8, res.ok, res.summary, sec)


def test_criterion_09_presentations():
    t0 = time.perf_counter()
    cover = run_suite("cover", count=50)
    res = run_suite("resolution")
    shipped = set(shipped_scenarios())
    covered = {row["scenario"] for row in res.details["modules"]}
    ok = cover.ok and res.ok and covered == shipped
    _emit(9, ok, f"{cover.summary}; {res.summary}", time.perf_counter() - t0)


def test_criterion_10_equivariance():
    res, sec = _suite("equivariance")
    ok = res.ok and res.details["witness"] is not None
    _emit(10, ok, res.summary, sec)


if __name__ == "__main__":
    sys.exit(pytest.main(["-q", __file__]))
