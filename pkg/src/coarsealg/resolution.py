"""Admissible presentations and finite resolutions built from point-by-point covers.

A cover of ``F`` at scale ``D`` gives every point ``x`` a free summand
``F_x`` mapping onto ``F(x[D])``.  Iterating on kernels yields a resolution
whose stage maps are recorded with their computed constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exactlinalg import canonicalize, contains, submodule_sum
from .filtered import (Caps, ConstantResult, FilteredModule, GeneratedFiltration, candidate_constants,
                       insular_constant, lean_constant)
from .morphism import ControlReport, FilteredMap, KernelModule, control_report, kernel

__all__ = ["CoverModule", "Stage", "ResolutionReport", "PresentationReport",
           "build_cover_epi", "build_admissible_presentation", "build_resolution"]


class PreconditionError(ValueError):
    pass


@dataclass
class CoverModule:
    """``F0 = ⊕_x F_x`` with singleton supports and the covering map ``φ0: F0 -> F``."""

    module: GeneratedFiltration
    map: FilteredMap
    point_ranks: list
    D: int

    @property
    def rank(self) -> int:
        return sum(self.point_ranks)


def _reduced_rows(F: FilteredModule, D: int, x: int, chosen: dict):
    """Canonical generators of ``F(x[D])`` not produced by earlier points within ``D``.

    Earlier points ``y < x`` with ``d(x, y) <= D`` lie in ``x[D]``, so
    ``F(x[D])`` stays inside the image of ``F0(x[D])`` and the cover keeps
    image containment within ``D``.
    """
    sp = F.space
    near = [chosen[y] for y in range(x) if sp.dist[x, y] <= D and len(chosen[y])]
    acc = canonicalize(np.vstack(near), F.ring, F.ambient_rank) if near else None
    picked = []
    for r in F.local(x, D).rows:
        v = tuple(r.tolist())
        if acc is not None and contains(acc, v):
            continue
        picked.append(r)
        row = canonicalize([v], F.ring, F.ambient_rank)
        acc = row if acc is None else submodule_sum(acc, row)
    return np.array(picked, dtype=F.ring.dtype).reshape(len(picked), F.ambient_rank)


def build_cover_epi(F: FilteredModule, D: Optional[int] = None, caps: Optional[Caps] = None,
                    lean: Optional[ConstantResult] = None, reduced: bool = False) -> CoverModule:
    """Cover ``F`` at scale ``D``; ``D`` defaults to the computed lean constant.

    With ``reduced`` each ``F_x`` only receives the generators of ``F(x[D])``
    missing from the summands of earlier points within distance ``D``.
    """
    sp, ring = F.space, F.ring
    if lean is None:
        lean = lean_constant(F, caps=caps)
    if D is None:
        if not lean.finite:
            raise PreconditionError("module is not lean at any scale")
        D = int(lean.value)
    elif lean.value > D:
        raise PreconditionError(f"module is not {D}-lean (computed lean constant {lean.value})")
    gens, ranks, chosen = [], [], {}
    for x in range(sp.n):
        rows = _reduced_rows(F, D, x, chosen) if reduced else F.local(x, D).rows
        chosen[x] = rows
        ranks.append(rows.shape[0])
        gens.extend((tuple(r.tolist()), 1 << x) for r in rows)
    total = len(gens)
    unit = []
    for i, (_, m) in enumerate(gens):
        e = [0] * total
        e[i] = 1
        unit.append((tuple(e), m))
    F0 = GeneratedFiltration(sp, ring, unit, total)
    cols = [g for g, _ in gens]
    matrix = np.array(cols, dtype=ring.dtype).T if cols else np.zeros((F.ambient_rank, 0), dtype=ring.dtype)
    phi = FilteredMap(F0, F, matrix)
    if not phi.is_epimorphism:
        raise PreconditionError("cover map is not onto the total module")
    return CoverModule(F0, phi, ranks, D)


@dataclass
class Stage:
    index: int
    cover: CoverModule
    control: ControlReport
    kernel: KernelModule
    kernel_lean: Optional[ConstantResult] = None
    kernel_insular: Optional[ConstantResult] = None

    def to_json(self) -> dict:
        out = {
            "stage": self.index,
            "scale": self.cover.D,
            "rank": self.cover.rank,
            "image_rank": self.cover.map.total_image.rank,
            "kernel_rank": self.kernel.rank,
            "control": self.control.to_json(),
        }
        if self.kernel_lean is not None:
            out["kernel_lean"] = self.kernel_lean.to_json()
        if self.kernel_insular is not None:
            out["kernel_insular"] = self.kernel_insular.to_json()
        return out

    @property
    def exact(self) -> bool:
        """Exactness by rank arithmetic: ``rank im + rank ker = rank source``."""
        return self.kernel.rank_nullity_holds()


@dataclass
class PresentationReport:
    cover0: CoverModule
    control0: ControlReport
    cover1: Optional[CoverModule]
    control1: Optional[ControlReport]
    psi1: Optional[ControlReport]

    @property
    def exact_at_f0(self) -> bool:
        K = kernel(self.cover0.map)
        if self.cover1 is None:
            return K.rank == 0
        return self.cover1.map.total_image == K.sub and K.rank_nullity_holds()

    def to_json(self) -> dict:
        out = {"f0_rank": self.cover0.rank, "phi0": self.control0.to_json(),
               "f1_rank": self.cover1.rank if self.cover1 else 0}
        if self.control1 is not None:
            out["phi1"] = self.control1.to_json()
            out["psi1"] = self.psi1.to_json()
        out["exact_at_f0"] = self.exact_at_f0
        return out


def build_admissible_presentation(F: FilteredModule, caps: Optional[Caps] = None) -> PresentationReport:
    ins = insular_constant(F, caps=caps)
    if not ins.finite:
        raise PreconditionError("module is not insular")
    c0 = build_cover_epi(F, caps=caps)
    r0 = control_report(c0.map, caps=caps)
    K = kernel(c0.map)
    if K.rank == 0:
        return PresentationReport(c0, r0, None, None, None)
    c1 = build_cover_epi(K.filtration, caps=caps)
    r1 = control_report(c1.map, caps=caps)
    psi = FilteredMap(c1.module, c0.module, c1.map.matrix)
    return PresentationReport(c0, r0, c1, r1, control_report(psi, caps=caps))


@dataclass
class ResolutionReport:
    stages: list = field(default_factory=list)
    terminated: bool = False
    max_length: int = 8
    reduced: bool = True
    failure: Optional[str] = None

    @property
    def length(self) -> int:
        """Number of stages with a nonzero kernel (a free singleton module has length 0)."""
        return sum(1 for s in self.stages if s.kernel.rank)

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.stages) and self.composites_vanish()

    def composites_vanish(self) -> bool:
        for a, b in zip(self.stages, self.stages[1:]):
            prod = a.cover.map.ring.normalize(a.cover.map.matrix.dot(b.cover.map.matrix))
            if prod.any():
                return False
        return True

    def to_json(self) -> dict:
        return {"terminated": self.terminated, "length": self.length, "max_length": self.max_length,
                "cover": "reduced" if self.reduced else "full",
                "exact": self.exact, "failure": self.failure, "stages": [s.to_json() for s in self.stages]}


def covering_scale(F: FilteredModule) -> int:
    """Least ``D`` with ``Σ_x F(x[D]) = F(X)``: below it no cover is onto."""
    sp = F.space
    cands = candidate_constants(sp)
    total = F.total

    def onto(D):
        mods = [F.local(x, D) for x in range(sp.n)]
        mods = [M for M in mods if M.rank]
        return total.rank == 0 or (bool(mods) and submodule_sum(*mods) == total)

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if onto(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def build_resolution(F: FilteredModule, max_length: int = 8, caps: Optional[Caps] = None,
                     kernel_constants: bool = True, reduced: bool = True) -> ResolutionReport:
    """Cover, take the kernel, repeat; stops at a zero kernel or after ``max_length`` stages.

    Kernel filtrations have one point set per subset of points, so lean
    constants (including the input's) are searched exhaustively only up to
    10 points and sampled beyond.  A sampled value can be too small; the scale used is never
    below the covering scale, so every stage map is still onto.
    """
    caps = caps or Caps()
    stage_caps = Caps(min(caps.subset, 10), min(caps.pair, 8), caps.trials, caps.seed)
    report = ResolutionReport(max_length=max_length, reduced=reduced)
    current = F
    lean = lean_constant(F, caps=stage_caps)
    for i in range(max_length):
        D = int(max(lean.value, covering_scale(current))) if lean.finite else None
        try:
            cover = build_cover_epi(current, D, caps=caps, lean=lean, reduced=reduced)
        except PreconditionError as e:
            report.failure = f"stage {i}: {e}"
            return report
        K = kernel(cover.map)
        stage = Stage(i, cover, control_report(cover.map, caps=stage_caps), K)
        report.stages.append(stage)
        if K.rank == 0:
            report.terminated = True
            return report
        lean = K.constant("lean", caps=stage_caps)
        if kernel_constants:
            stage.kernel_lean = lean
            stage.kernel_insular = K.constant("insular", caps=stage_caps)
        current = K.filtration
    return report
