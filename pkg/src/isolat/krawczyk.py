"""Krawczyk interval-Newton verification of root enclosures.

The operator in Moore form,

    K(X) = m - Y f(m) + (I - Y F'(X)) (X - m),   m = mid(X),

is evaluated with Y the floating inverse of the midpoint of the interval
Jacobian and (X - m) replaced by rad(X) * [-1, 1].  Its fixed-point
properties drive the verifier: a root of f in X lies in K(X); empty
K(X) & X proves absence; K(X) in the interior of X proves existence and
uniqueness of a root in X.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .homotopy import ApproxZero
from .interval import (
    Box,
    Interval,
    SingularMatrixError,
    eval_jacobian_interval,
    invert,
)
from .poly import PolySystem

_INFLATION_FRACTION = 0.1


class CannotDivideError(ValueError):
    """All components of the box are points; there is nothing to split."""


class VerifyStatus(enum.Enum):
    VERIFIED = "verified"
    NO_ROOT = "no-root"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class BisectionBudget:
    """Caps on the work one verification call may spend."""

    max_depth: int = 64
    min_width_ulps: float = 4.0
    max_steps: int = 128

    def too_narrow_to_split(self, box: Box) -> bool:
        scale = max(1.0, max(abs(c.mid) for c in box))
        return float(np.max(box.widths())) <= self.min_width_ulps * math.ulp(scale)


@dataclass(frozen=True)
class Certificate:
    """A box proven to contain exactly one root."""

    box: Box
    krawczyk_image: Box
    source_zero: Optional[ApproxZero]
    bisections_used: int
    krawczyk_steps: int
    tolerance_met: bool = True


@dataclass(frozen=True)
class VerifyResult:
    status: VerifyStatus
    certificates: tuple[Certificate, ...]
    bisections: int
    krawczyk_steps: int
    last_box: Box  # deepest box examined; informative for UNDECIDED

    @property
    def verified(self) -> bool:
        return self.status is VerifyStatus.VERIFIED


def _tight_interval(value: Fraction) -> Interval:
    """Smallest float interval around an exact rational, at most 1 ulp wide.
    Raises OverflowError when doubles cannot enclose the value at all."""
    nearest = float(value)
    if not math.isfinite(nearest):
        raise OverflowError("residual exceeds double range")
    rounded = Fraction(nearest)
    if rounded == value:
        return Interval.point(nearest)
    if rounded < value:
        return Interval(nearest, math.nextafter(nearest, math.inf))
    return Interval(math.nextafter(nearest, -math.inf), nearest)


def _exact_residual_enclosures(system: PolySystem, mid: np.ndarray) -> list[Interval]:
    """Enclosures of f(mid) computed exactly in rational arithmetic.  Floats
    are exact rationals, so the only rounding is the final conversion back."""
    coords = [Fraction(float(v)) for v in mid]
    max_exp = [0] * len(coords)
    for poly in system.polys:
        for term in poly.terms:
            for j, e in enumerate(term.exponents):
                if e > max_exp[j]:
                    max_exp[j] = e
    powers = []
    for j, c in enumerate(coords):
        col = [Fraction(1)]
        for _ in range(max_exp[j]):
            col.append(col[-1] * c)
        powers.append(col)
    out = []
    for poly in system.polys:
        total = Fraction(0)
        for term in poly.terms:
            acc = Fraction(term.coefficient)
            for j, e in enumerate(term.exponents):
                if e:
                    acc *= powers[j][e]
            total += acc
        out.append(_tight_interval(total))
    return out


def krawczyk_image(system: PolySystem, box: Box) -> Box | None:
    """One Krawczyk operator evaluation; None when the midpoint Jacobian is
    numerically singular (the caller is expected to split the box)."""
    if system.nvars != len(box):
        raise ValueError("box dimension does not match system")
    n = system.nvars
    jac_int = eval_jacobian_interval(system, box)
    try:
        y = invert(jac_int.mid_matrix())
    except SingularMatrixError:
        return None
    mid = box.mid()
    # f(mid) must be a rigorous enclosure: a plain float evaluation carries
    # rounding error of order ulp(term magnitude), and Y amplifies it by the
    # inverse-Jacobian norm, which can displace the image by many box widths
    # and turn an empty intersection into an unsound no-root verdict.  The
    # naive interval evaluation is rigorous but just as wide as that error,
    # so the residual is computed exactly over the rationals instead and
    # rounded outward once.
    try:
        f_mid = _exact_residual_enclosures(system, mid)
    except OverflowError:
        return None
    rad = box.rad_outer()

    components = []
    for i in range(n):
        # m_i - sum_j Y_ij f_j
        acc = Interval.point(mid[i])
        for j in range(n):
            acc = acc - Interval.point(y[i, j]) * f_mid[j]
        # + sum_j (I - Y F'(X))_ij * rad_j * [-1, 1]
        spread = Interval.point(0.0)
        for j in range(n):
            entry = Interval.point(1.0 if i == j else 0.0)
            for k in range(n):
                entry = entry - Interval.point(y[i, k]) * jac_int[k][j]
            if rad[j] != 0.0:
                spread = spread + entry * Interval(-rad[j], rad[j])
        components.append(acc + spread)
    return Box(tuple(components))


def divide(box: Box) -> tuple[Box, Box]:
    """Split at the midpoint of the widest component (lowest index wins
    ties), returning the lower and upper halves."""
    widths = box.widths()
    axis = int(np.argmax(widths))
    if widths[axis] == 0.0:
        raise CannotDivideError("cannot divide a point box")
    target = box[axis]
    cut = target.mid
    lower = Box(
        tuple(Interval(c.lo, cut) if j == axis else c for j, c in enumerate(box))
    )
    upper = Box(
        tuple(Interval(cut, c.hi) if j == axis else c for j, c in enumerate(box))
    )
    return lower, upper


@dataclass
class _Work:
    """Step and split counters shared by every box in one verification."""

    steps: int = 0
    bisections: int = 0


def krawczyk_verify(
    system: PolySystem,
    box: Box,
    budget: BisectionBudget | None = None,
    source: ApproxZero | None = None,
    _depth: int = 0,
    _work: _Work | None = None,
) -> VerifyResult:
    """Iterate X <- K(X) & X until the image proves existence (strict
    interior inclusion), proves absence (empty intersection), or stalls.
    A stalled iteration splits the box and verifies both halves.  Boundary
    contact gets one epsilon-inflation retry before iterating on.  The
    budget caps the total work of the call, splits included."""
    budget = budget or BisectionBudget()
    work = _work if _work is not None else _Work()
    inflated = False
    current = box

    def split_and_recurse(target: Box) -> VerifyResult:
        if _depth >= budget.max_depth or budget.too_narrow_to_split(target):
            return VerifyResult(
                VerifyStatus.UNDECIDED, (), work.bisections, work.steps, target
            )
        try:
            lower, upper = divide(target)
        except CannotDivideError:
            return VerifyResult(
                VerifyStatus.UNDECIDED, (), work.bisections, work.steps, target
            )
        work.bisections += 1
        first = krawczyk_verify(system, lower, budget, source, _depth + 1, work)
        second = krawczyk_verify(system, upper, budget, source, _depth + 1, work)
        certificates = first.certificates + second.certificates
        if certificates:
            status = VerifyStatus.VERIFIED
        elif VerifyStatus.UNDECIDED in (first.status, second.status):
            status = VerifyStatus.UNDECIDED
        else:
            status = VerifyStatus.NO_ROOT
        deepest = second.last_box if second.status is not VerifyStatus.NO_ROOT else first.last_box
        return VerifyResult(
            status, certificates, work.bisections, work.steps, deepest
        )

    while work.steps < budget.max_steps:
        image = krawczyk_image(system, current)
        work.steps += 1
        if image is None:
            # singular midpoint Jacobian: only a split can make progress
            return split_and_recurse(current)
        intersection = image.intersect(current)
        if intersection is None:
            return VerifyResult(
                VerifyStatus.NO_ROOT, (), work.bisections, work.steps, current
            )
        if image.is_interior_of(current):
            certificate = Certificate(
                box=current,
                krawczyk_image=image,
                source_zero=source,
                bisections_used=work.bisections,
                krawczyk_steps=work.steps,
            )
            return VerifyResult(
                VerifyStatus.VERIFIED,
                (certificate,),
                work.bisections,
                work.steps,
                current,
            )
        if image.is_subset(current):
            # contained but touching the boundary
            if not inflated:
                current = current.inflate(_INFLATION_FRACTION)
                inflated = True
                continue
            if intersection == current:
                # no shrink left; only a split can decide
                return split_and_recurse(current)
            current = intersection
            continue
        if current.is_subset(image):
            # stall: the operator cannot shrink this box any further
            return split_and_recurse(current)
        current = intersection

    return VerifyResult(
        VerifyStatus.UNDECIDED, (), work.bisections, work.steps, current
    )
