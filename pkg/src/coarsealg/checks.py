"""Named checks that a scenario can request, and the scenario runner.

Every check returns an outcome of ``pass``, ``fail`` or ``n/a`` together
with the computed constants, the evaluation modes used and any witness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exactlinalg import contains
from .filtered import (INF, Caps, check_equivariance, generate_group, insular_constant, lean_constant,
                       property_constant, split_constant)
from .metric import bits
from .morphism import (HypothesisViolation, KernelSplitter, classical_facts, control_report,
                       decompose_kernel_over_disjoint_family, kernel, lean_decompose_kernel)
from .resolution import build_admissible_presentation, build_resolution
from .scenario import Scenario, ScenarioError

REPORT_SCHEMA = "coarsealg-report/1"

__all__ = ["REPORT_SCHEMA", "CheckResult", "CHECKS", "run_check", "run_scenario", "random_cover", "js"]


def js(v):
    """JSON form of a constant: integers stay integers, infinity becomes ``"inf"``."""
    return "inf" if v == INF else int(v)


@dataclass
class CheckResult:
    check: str
    outcome: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"check": self.check, "outcome": self.outcome, **self.detail}


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def random_cover(space, rng) -> tuple[int, int]:
    """Random ``(T, U)`` with ``T ∪ U = X``: a random set, its complement, and some overlap."""
    T = 0
    U = 0
    for i in range(space.n):
        r = rng.random()
        if r < 0.45:
            T |= 1 << i
        elif r < 0.9:
            U |= 1 << i
        else:
            T |= 1 << i
            U |= 1 << i
    return T, U


# ---------------------------------------------------------------------------


def _check_control(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    rep = control_report(phi, mode, caps)
    detail = {"map": spec["map"], **rep.to_json()}
    expect = spec.get("expect")
    if expect:
        got = {"control": js(rep.control.value), "bicontrol": js(rep.bicontrol.value)}
        ok = all(got[k] == v for k, v in expect.items())
        detail["expected"] = expect
    else:
        ok = rep.control.finite
    return CheckResult("control", _verdict(ok), detail)


def _split_bound(sc: Scenario, phi, mode: str, caps: Caps):
    delta = split_constant(phi.source, mode if mode != "generator-reduced" else "auto", caps)
    rep = control_report(phi, mode, caps)
    d = insular_constant(phi.target, mode if mode != "generator-reduced" else "auto", caps)
    return delta, rep, d


def _check_kernel_split_bound(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    delta, rep, d = _split_bound(sc, phi, mode, caps)
    b = rep.bicontrol
    K = kernel(phi)
    kmode = "auto" if mode == "generator-reduced" else mode
    ks = K.constant("split", kmode, caps)
    detail = {"map": spec["map"], "delta": delta.to_json(), "bicontrol": b.to_json(), "insular": d.to_json(),
              "kernel_split": ks.to_json(), "kernel_rank": K.rank, "rank_nullity": K.rank_nullity_holds(),
              "surjective": rep.surjective}
    if not (delta.finite and b.finite and d.finite and rep.surjective):
        detail["reason"] = "hypotheses not met (need finite constants and an epimorphism)"
        return CheckResult("kernel-split-bound", "n/a", detail)
    bound = delta.value + 2 * b.value + d.value
    detail["bound"] = bound
    ok = ks.value <= bound and K.rank_nullity_holds()
    if spec.get("expect_equal"):
        ok = ok and ks.value == bound
        detail["attained"] = ks.value == bound
    return CheckResult("kernel-split-bound", _verdict(ok), detail)


def _check_split_elements(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    sp = sc.space
    delta, rep, d = _split_bound(sc, phi, mode, caps)
    if not (delta.finite and rep.bicontrol.finite and d.finite):
        return CheckResult("split-kernel-elements", "n/a", {"reason": "infinite constants"})
    dl, b, dd = int(delta.value), int(rep.bicontrol.value), int(d.value)
    covers = [(sp.mask(T), sp.mask(U)) for T, U in spec.get("covers", [])]
    rng = np.random.default_rng(caps.seed)
    covers += [random_cover(sp, rng) for _ in range(int(spec.get("sampled_covers", 0)))]
    K = kernel(phi)
    done = 0
    for T, U in covers:
        splitter = KernelSplitter(phi, T, U, dl, b, dd)
        local = K.filtration.eval(T | U)
        try:
            splitter.split_rows(local.rows)
        except HypothesisViolation:
            # redo one element at a time to report the first failing element
            for z in local.basis:
                try:
                    splitter.split(z)
                except HypothesisViolation as e:
                    return CheckResult("split-kernel-elements", "fail",
                                       {"map": spec["map"], "T": sp.labels_of(T), "U": sp.labels_of(U),
                                        "element": [str(x) for x in z], "error": str(e), "splits": done})
                done += 1
        done += local.rank
    return CheckResult("split-kernel-elements", "pass",
                       {"map": spec["map"], "covers": len(covers), "splits": done,
                        "radius": dl + 2 * b + dd, "constants": {"delta": dl, "b": b, "d": dd}})


def disjoint_family_run(phi, family, D: int, b: int, d: int):
    """Decompose every basis element of ``K(⋃ family)``; returns ``(ok, elements, error)``."""
    sp = phi.space
    union = 0
    for P in family:
        union |= P
    K = kernel(phi)
    elems = K.filtration.eval(union).basis
    for k in elems:
        try:
            parts = decompose_kernel_over_disjoint_family(phi, k, family, D, b, d, check_disjointness=False)
        except HypothesisViolation as e:
            return False, len(elems), str(e)
        for a, part in parts:
            if any(phi.apply(part)) or not contains(phi.source.eval(sp.enlarge(family[a], D)), part):
                return False, len(elems), f"part {a} fails its membership"
    return True, len(elems), None


def _check_disjoint_family(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    from .metric import disjointness_violation
    phi = sc.map(spec["map"])
    sp = sc.space
    family = [sp.mask(P) for P in spec["family"]]
    lmode = "auto" if mode == "generator-reduced" else mode
    D = lean_constant(phi.source, lmode, caps)
    rep = control_report(phi, mode, caps)
    d = insular_constant(phi.target, lmode, caps)
    if not (D.finite and rep.control.finite and d.finite):
        return CheckResult("disjoint-family", "n/a", {"reason": "infinite constants"})
    Dv, bv, dv = int(D.value), int(rep.control.value), int(d.value)
    need = 2 * Dv + 2 * bv + 2 * dv
    pre = disjointness_violation(sp, family, need) is None
    ok, count, err = disjoint_family_run(phi, family, Dv, bv, dv)
    expect = spec.get("expect", "pass")
    detail = {"map": spec["map"], "constants": {"D": Dv, "b": bv, "d": dv}, "required_disjointness": need,
              "precondition_holds": pre, "elements": count, "decomposed": ok, "expected": expect}
    if err:
        detail["error"] = err
    return CheckResult("disjoint-family", _verdict(ok == (expect == "pass")), detail)


def _declared(sc: Scenario, phi, mode: str, caps: Caps) -> dict:
    lmode = "auto" if mode == "generator-reduced" else mode
    out = {"D": lean_constant(phi.source, lmode, caps), "b": control_report(phi, mode, caps).bicontrol,
           "d": insular_constant(phi.target, lmode, caps), "delta": split_constant(phi.source, lmode, caps)}
    return out


def _check_declared(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    comp = _declared(sc, phi, mode, caps)
    rows = {}
    ok = True
    for key, val in sc.declared.items():
        if key not in comp:
            continue
        c = comp[key]
        good = c.value <= val
        ok &= good
        rows[key] = {"declared": val, "computed": c.to_json(), "covers_computed": good}
    return CheckResult("declared-constants", _verdict(ok), {"map": spec["map"], "constants": rows})


def _check_lean_decompose(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    decl = sc.declared
    if not all(k in decl for k in ("D", "b", "d")):
        comp = _declared(sc, phi, mode, caps)
        decl = {k: (decl[k] if k in decl else int(comp[k].value)) for k in ("D", "b", "d")}
    D, b, d = int(decl["D"]), int(decl["b"]), int(decl["d"])
    chain = sc.chain(spec["chain"], D, b, d)
    K = kernel(phi)
    cache: dict = {}
    table = []
    worst_cert = worst_track = 0
    guaranteed = True
    claimed = chain.mesh_bound + 2 * chain.n * D
    for i, k in enumerate(K.basis):
        try:
            res = lean_decompose_kernel(phi, k, chain, D, b, d, kernel_module=K, cache=cache)
        except HypothesisViolation as e:
            return CheckResult("lean-decompose", "fail", {"element": i, "error": str(e)})
        worst_cert = max(worst_cert, res.certified)
        worst_track = max(worst_track, res.max_tracked)
        guaranteed &= res.proof_guaranteed
        table.append({"element": i, "summands": len(res.summands), "max_tracked_radius": res.max_tracked,
                      "certified_radius": js(res.certified)})
    detail = {
        "map": spec["map"], "chain": spec["chain"], "radii": list(chain.radii), "n": chain.n,
        "mesh": chain.mesh_bound, "constants": {"D": D, "b": b, "d": d}, "kernel_rank": K.rank,
        "claimed_bound": claimed, "max_certified_radius": js(worst_cert),
        "max_tracked_radius": worst_track, "tracker_bound": chain.mesh_bound + worst_track,
        "all_steps_guaranteed": guaranteed, "table": table,
    }
    return CheckResult("lean-decompose", _verdict(worst_cert <= claimed), detail)


def _check_idempotent(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    if not phi.is_idempotent():
        return CheckResult("idempotent", "n/a", {"reason": "matrix is not idempotent"})
    rep = control_report(phi, mode, caps)
    ok = rep.control.finite and rep.bicontrol.value <= rep.control.value
    return CheckResult("idempotent", _verdict(ok), {"map": spec["map"], **rep.to_json()})


def _actions_for(sc: Scenario, phi, name: Optional[str]):
    if not name:
        return None, None, None
    acts = sc.action(name)
    src = acts.get(sc._name_of(phi.source))
    tgt = acts.get(sc._name_of(phi.target))
    group = generate_group([src]) if src is not None else None
    return src, tgt, group


def _check_classical(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    phi = sc.map(spec["map"])
    src, tgt, group = _actions_for(sc, phi, spec.get("action"))
    base = sc.space.index(spec["basepoint"]) if "basepoint" in spec else 0
    facts = classical_facts(phi, src, tgt, group, base, mode, caps,
                            image_facts=bool(spec.get("image_facts", True)))
    ok = all(f.outcome != "fail" for f in facts)
    return CheckResult("classical-facts", _verdict(ok), {"map": spec["map"], "facts": [f.to_json() for f in facts]})


def _check_equivariance(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    F = sc.filtration(spec["filtration"])
    act = sc.action(spec["action"]).get(spec["filtration"])
    if act is None:
        raise ScenarioError(f"action {spec['action']!r}", f"no matrix for filtration {spec['filtration']!r}")
    emode = mode if mode in ("exhaustive", "sampled") else "auto"
    res = check_equivariance(F, act, emode, caps)
    expect = spec.get("expect", "pass")
    detail = {"filtration": spec["filtration"], "action": spec["action"], "equivariant": res.ok,
              "mode": res.mode, "tested": res.tested, "expected": expect}
    if res.witness:
        detail["witness"] = res.witness
    return CheckResult("equivariance", _verdict(res.ok == (expect == "pass")), detail)


def _check_resolution(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    F = sc.filtration(spec["filtration"])
    rep = build_resolution(F, int(spec.get("max_length", 8)), caps, reduced=spec.get("cover", "reduced") == "reduced")
    detail = {"filtration": spec["filtration"], **rep.to_json()}
    if spec.get("compare_full"):
        full = build_resolution(F, int(spec.get("max_length", 8)), caps, kernel_constants=False, reduced=False)
        detail["full_cover"] = {"terminated": full.terminated, "length": full.length, "exact": full.exact,
                                "ranks": [[s.cover.rank, s.kernel.rank] for s in full.stages]}
    return CheckResult("resolution", _verdict(rep.terminated and rep.exact), detail)


def _check_presentation(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    F = sc.filtration(spec["filtration"])
    rep = build_admissible_presentation(F, caps)
    ok = rep.exact_at_f0 and rep.control0.bicontrol.finite and (rep.control1 is None or rep.control1.bicontrol.finite)
    return CheckResult("presentation", _verdict(ok), {"filtration": spec["filtration"], **rep.to_json()})


def _check_constants(sc: Scenario, spec: dict, mode: str, caps: Caps) -> CheckResult:
    F = sc.filtration(spec["filtration"])
    out = {}
    for kind in spec.get("kinds", ["lean", "split", "insular"]):
        out[kind] = property_constant(F, kind, mode, caps).to_json()
    expect = spec.get("expect", {})
    ok = all(out[k]["value"] == v for k, v in expect.items())
    return CheckResult("constants", _verdict(ok), {"filtration": spec["filtration"], "constants": out})


CHECKS: dict[str, Callable] = {
    "control": _check_control,
    "kernel-split-bound": _check_kernel_split_bound,
    "split-kernel-elements": _check_split_elements,
    "disjoint-family": _check_disjoint_family,
    "declared-constants": _check_declared,
    "lean-decompose": _check_lean_decompose,
    "idempotent": _check_idempotent,
    "classical-facts": _check_classical,
    "equivariance": _check_equivariance,
    "resolution": _check_resolution,
    "presentation": _check_presentation,
    "constants": _check_constants,
}


def run_check(sc: Scenario, spec: dict, mode: str = "auto", caps: Optional[Caps] = None) -> CheckResult:
    caps = caps or sc.caps
    name = spec.get("check")
    fn = CHECKS.get(name)
    if fn is None:
        raise ScenarioError("checks", f"unknown check {name!r}")
    t0 = time.perf_counter()
    try:
        res = fn(sc, spec, mode, caps)
    except KeyError as e:
        raise ScenarioError(f"checks.{name}", f"missing or unknown reference {e}") from None
    except ValueError as e:
        if isinstance(e, ScenarioError):
            raise
        res = CheckResult(name, "n/a", {"reason": str(e)})
    res.seconds = time.perf_counter() - t0
    return res


def run_scenario(sc: Scenario, mode: str = "auto", caps: Optional[Caps] = None,
                 timings: Optional[list] = None) -> dict:
    """Run every check in order; the report is deterministic given scenario, mode and caps.

    Wall-clock seconds per check go into ``timings`` (kept out of the report).
    """
    caps = caps or sc.caps
    results = [run_check(sc, spec, mode, caps) for spec in sc.checks]
    outcome = "fail" if any(r.outcome == "fail" for r in results) else "pass"
    sp = sc.space
    report = {
        "schema": REPORT_SCHEMA,
        "scenario": sc.name,
        "space": sc.space_expr,
        "points": sp.n,
        "ring": str(sc.ring),
        "mode": mode,
        "caps": {"subset": caps.subset, "pair": caps.pair, "trials": caps.trials, "seed": caps.seed},
        "outcome": outcome,
        "checks": [r.to_json() for r in results],
    }
    if sp.group is not None and sp.radius is not None:
        report["truncation_radius"] = sp.radius
        report["notice"] = f"finite surrogate: Cayley ball of radius {sp.radius}"
    if timings is not None:
        timings.extend(r.seconds for r in results)
    return report
