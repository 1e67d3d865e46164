"""End-to-end isolation of the real roots of a square polynomial system.

Approximate zeros (from the tracker or a file) are filtered for obviously
non-real candidates, wrapped in Kantorovich initial boxes, verified with
the Krawczyk operator, made pairwise disjoint, and narrowed below a target
radius.  Every surviving box carries a strict Krawczyk certificate.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .certify import (
    CertificationError,
    KantorovichData,
    empirical_radius,
    init_width,
    iscomplex,
)
from .homotopy import ApproxZero, TrackerConfig, solve_all
from .interval import Box, Interval
from .krawczyk import (
    BisectionBudget,
    Certificate,
    VerifyStatus,
    divide,
    krawczyk_verify,
)
from .poly import PolySystem

_OFF_CENTER_SHIFT = 1.0 / 16.0


@dataclass(frozen=True)
class CandidateDiagnostics:
    """Per-candidate mirror of the initial-box quantities."""

    path_id: int
    outcome: str  # filtered-nonreal | verified | unverified:<reason>
    empirical_rad: Optional[float]
    kantorovich: Optional[KantorovichData]
    verify_seconds: float = 0.0


@dataclass
class IsolationReport:
    certificates: list[Certificate]
    nreal: int
    total_candidates: int
    rejected_nonreal: int
    unverified: list[tuple[ApproxZero, str]]
    timings: dict[str, float]
    diagnostics: list[CandidateDiagnostics] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    tau: float = 0.0


def _certificate_key(cert: Certificate):
    return tuple(v for c in cert.box for v in (c.lo, c.hi))


def _dedup_priority(cert: Certificate):
    # Candidates closest to the real axis first: when two certificates
    # enclose the same root, the survivor must not depend on whether the
    # run also certified projections of complex candidates, or enabling
    # the non-real filter would change the output boxes.
    if cert.source_zero is not None:
        imag = float(np.max(np.abs(np.asarray(cert.source_zero.point).imag)))
    else:
        imag = math.inf
    return (imag, _certificate_key(cert))


def disjoint_process(
    system: PolySystem,
    certificates: Sequence[Certificate],
    budget: BisectionBudget | None = None,
) -> tuple[list[Certificate], list[str]]:
    """Make the certified boxes pairwise disjoint.

    Overlap handling runs the verifier on the overlap box: a verified
    overlap means both boxes enclose the same root, so the newcomer is a
    duplicate; a root-free overlap is trimmed off both boxes along the
    coordinate with the largest overlap extent; an undecided overlap drops
    the newcomer with a warning rather than risk a double count.
    """
    budget = budget or BisectionBudget()
    kept: list[Certificate] = []
    warnings: list[str] = []
    for cert in sorted(certificates, key=_dedup_priority):
        candidate = cert
        duplicate = False
        for i, other in enumerate(list(kept)):
            overlap = candidate.box.intersect(other.box)
            if overlap is None:
                continue
            result = krawczyk_verify(system, overlap, budget)
            if result.status is VerifyStatus.VERIFIED:
                duplicate = True
                break
            if result.status is VerifyStatus.UNDECIDED:
                warnings.append(
                    "dropped a candidate box whose overlap could not be decided"
                )
                duplicate = True
                break
            trimmed_new = _trim_off(system, candidate, overlap, budget)
            trimmed_old = _trim_off(system, other, overlap, budget)
            if trimmed_new is None or trimmed_old is None:
                warnings.append(
                    "dropped a candidate box after an overlap trim failed to re-verify"
                )
                duplicate = True
                break
            candidate = trimmed_new
            kept[i] = trimmed_old
        if not duplicate:
            kept.append(candidate)
    kept.sort(key=_certificate_key)
    return kept, warnings


def _trim_off(
    system: PolySystem,
    cert: Certificate,
    overlap: Box,
    budget: BisectionBudget,
) -> Certificate | None:
    """Shrink cert.box by cutting away the overlap slab along the
    coordinate with the largest overlap extent, then re-verify so the
    certificate stays valid.  None when the trimmed box cannot be
    re-certified (caller treats that conservatively)."""
    box = cert.box
    image = cert.krawczyk_image
    axis = int(np.argmax(overlap.widths()))
    target = box[axis]
    cut = overlap[axis]
    if cut.lo <= target.lo and cut.hi >= target.hi:
        return None  # overlap covers the whole extent; nothing to keep
    if cut.lo <= target.lo:
        trimmed = Interval(cut.hi, target.hi)
    elif cut.hi >= target.hi:
        trimmed = Interval(target.lo, cut.lo)
    else:
        # interior slab: keep the side the root (the Krawczyk image) is on
        if image[axis].hi <= cut.lo:
            trimmed = Interval(target.lo, cut.lo)
        elif image[axis].lo >= cut.hi:
            trimmed = Interval(cut.hi, target.hi)
        else:
            return None
    new_box = Box(
        tuple(trimmed if j == axis else c for j, c in enumerate(box))
    )
    result = krawczyk_verify(system, new_box, budget, source=cert.source_zero)
    if result.status is not VerifyStatus.VERIFIED or len(result.certificates) != 1:
        return None
    fresh = result.certificates[0]
    return replace(
        cert,
        box=fresh.box,
        krawczyk_image=fresh.krawczyk_image,
    )


def _effective_tau(tau: float, box: Box) -> float:
    scale = max(1.0, max(abs(c.mid) for c in box))
    return max(tau, 4.0 * math.ulp(scale))


def narrowing(
    system: PolySystem,
    certificates: Sequence[Certificate],
    tau: float,
    budget: BisectionBudget | None = None,
) -> tuple[list[Certificate], list[str]]:
    """Bisect each certified box, keeping the verified half, until every
    coordinate radius is at most tau.  A cut through the root makes both
    halves fail; the cut is then retried slightly off-center.  If neither
    cut certifies, the smallest certified box is kept and flagged."""
    if tau <= 0.0 or not math.isfinite(tau):
        raise ValueError("tau must be a positive finite width")
    budget = budget or BisectionBudget()
    out: list[Certificate] = []
    warnings: list[str] = []
    for cert in certificates:
        current = cert
        target = _effective_tau(tau, cert.box)
        while float(np.max(current.box.rad_outer())) > target:
            step = _narrow_step(system, current, budget)
            if step is None:
                warnings.append(
                    "tolerance not met: kept the smallest certifiable box"
                )
                current = replace(current, tolerance_met=False)
                break
            current = step
        out.append(current)
    return out, warnings


def _narrow_step(
    system: PolySystem, cert: Certificate, budget: BisectionBudget
) -> Certificate | None:
    """One bisection round: try the midpoint cut, then an off-center cut."""
    for shift in (0.0, _OFF_CENTER_SHIFT):
        picked = _try_cut(system, cert, budget, shift)
        if picked is not None:
            return picked
    return None


def _try_cut(
    system: PolySystem, cert: Certificate, budget: BisectionBudget, shift: float
) -> Certificate | None:
    box = cert.box
    widths = box.widths()
    axis = int(np.argmax(widths))
    if widths[axis] == 0.0:
        return None
    target = box[axis]
    cut = target.lo + (0.5 + shift) * target.width
    if not (target.lo < cut < target.hi):
        return None
    halves = (
        Box(tuple(Interval(c.lo, cut) if j == axis else c for j, c in enumerate(box))),
        Box(tuple(Interval(cut, c.hi) if j == axis else c for j, c in enumerate(box))),
    )
    for half in halves:
        result = krawczyk_verify(system, half, budget, source=cert.source_zero)
        if result.status is VerifyStatus.VERIFIED and len(result.certificates) == 1:
            fresh = result.certificates[0]
            return replace(
                cert,
                box=fresh.box,
                krawczyk_image=fresh.krawczyk_image,
                bisections_used=cert.bisections_used,
                krawczyk_steps=cert.krawczyk_steps,
            )
    return None


def real_root_isolate(
    system: PolySystem,
    zeros: Sequence[ApproxZero] | None = None,
    tau: float = 1e-10,
    cfg: TrackerConfig | None = None,
    budget: BisectionBudget | None = None,
    complex_filter: bool = True,
) -> IsolationReport:
    """Run the full isolation pipeline.  When ``zeros`` is None the
    total-degree tracker supplies the candidates using ``cfg``."""
    budget = budget or BisectionBudget()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if zeros is None:
        zeros = solve_all(system, cfg or TrackerConfig())
    timings["homotopy"] = time.perf_counter() - t0

    certificates: list[Certificate] = []
    unverified: list[tuple[ApproxZero, str]] = []
    diagnostics: list[CandidateDiagnostics] = []
    rejected = 0

    t0 = time.perf_counter()
    for zero in zeros:
        t_cand = time.perf_counter()
        point = np.asarray(zero.point, dtype=complex)
        emp_rad = empirical_radius(system, point)
        if complex_filter and iscomplex(system, point):
            rejected += 1
            diagnostics.append(
                CandidateDiagnostics(
                    zero.path_id,
                    "filtered-nonreal",
                    emp_rad,
                    None,
                    time.perf_counter() - t_cand,
                )
            )
            continue
        try:
            data = init_width(system, point)
        except CertificationError as exc:
            unverified.append((zero, exc.reason))
            diagnostics.append(
                CandidateDiagnostics(
                    zero.path_id,
                    f"unverified:{exc.reason}",
                    emp_rad,
                    None,
                    time.perf_counter() - t_cand,
                )
            )
            continue
        initial_box = Box.midrad(data.refined_center, data.radius)
        result = krawczyk_verify(system, initial_box, budget, source=zero)
        if result.status is VerifyStatus.VERIFIED:
            certificates.extend(result.certificates)
            outcome = "verified"
        else:
            reason = (
                "krawczyk-no-root"
                if result.status is VerifyStatus.NO_ROOT
                else "krawczyk-undecided"
            )
            unverified.append((zero, reason))
            outcome = f"unverified:{reason}"
        diagnostics.append(
            CandidateDiagnostics(
                zero.path_id, outcome, emp_rad, data, time.perf_counter() - t_cand
            )
        )
    timings["certify_verify"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    certificates, overlap_warnings = disjoint_process(system, certificates, budget)
    timings["disjoint"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    certificates, narrow_warnings = narrowing(system, certificates, tau, budget)
    timings["narrowing"] = time.perf_counter() - t0

    certificates.sort(key=_certificate_key)
    timings["total"] = math.fsum(timings.values())

    return IsolationReport(
        certificates=certificates,
        nreal=len(certificates),
        total_candidates=len(zeros),
        rejected_nonreal=rejected,
        unverified=unverified,
        timings=timings,
        diagnostics=diagnostics,
        warnings=overlap_warnings + narrow_warnings,
        tau=tau,
    )
