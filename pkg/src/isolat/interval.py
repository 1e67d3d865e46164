"""Closed interval arithmetic with outward rounding, boxes, interval matrices.

Endpoints are doubles.  Every primitive operation computes in double
precision and then widens the result by one unit in the last place in the
outward direction, so the returned interval always encloses the exact
result.  This is the portable substitute for hardware directed rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, ROUND_CEILING, ROUND_FLOOR
from typing import Iterable, Sequence

import numpy as np

from .poly import Polynomial, PolySystem

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


class IntervalDivisionError(ZeroDivisionError):
    """Division by an interval containing zero."""


class SingularMatrixError(ArithmeticError):
    """Pivot fell below the singularity threshold during elimination."""


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of machine reals."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @staticmethod
    def point(value: float) -> "Interval":
        return Interval(float(value), float(value))

    @staticmethod
    def midrad(mid: float, rad: float) -> "Interval":
        if rad < 0:
            raise ValueError("negative radius")
        if rad == 0:
            return Interval.point(mid)
        return Interval(_down(mid - rad), _up(mid + rad))

    # ------------------------------------------------------------------
    # measures
    # ------------------------------------------------------------------

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return m

    @property
    def rad(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def rad_outer(self) -> float:
        """Radius guaranteed to cover both one-sided distances from mid."""
        m = self.mid
        return max(_up(self.hi - m), _up(m - self.lo))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mag(self) -> float:
        """max |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __mul__(self, other: "Interval") -> "Interval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(_down(min(products)), _up(max(products)))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.contains_zero():
            raise IntervalDivisionError(f"division by {other} which contains zero")
        quotients = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def scale(self, factor: float) -> "Interval":
        a = factor * self.lo
        b = factor * self.hi
        if a > b:
            a, b = b, a
        return Interval(_down(a), _up(b))

    def pow_int(self, exponent: int) -> "Interval":
        """x^k with the even-power sharpening: sign information is kept, so
        squares of sign-crossing intervals start at zero instead of going
        negative."""
        if exponent < 0:
            raise ValueError("negative exponent")
        if exponent == 0:
            return Interval(1.0, 1.0)
        if exponent == 1:
            return self
        if exponent % 2 == 1 or self.lo >= 0.0:
            # odd powers and non-negative bases are monotone increasing
            return Interval(_pow_directed(self.lo, exponent, -1), _pow_directed(self.hi, exponent, +1))
        if self.hi <= 0.0:
            # even power of a non-positive interval is decreasing
            return Interval(_pow_directed(self.hi, exponent, -1), _pow_directed(self.lo, exponent, +1))
        # even power across zero
        return Interval(0.0, _pow_directed(self.mag, exponent, +1))

    def widen_ulp(self) -> "Interval":
        return Interval(_down(self.lo), _up(self.hi))

    # ------------------------------------------------------------------
    # lattice
    # ------------------------------------------------------------------

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def is_subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def is_interior_of(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def __str__(self) -> str:
        return f"[{format_endpoint(self.lo, 'down')}, {format_endpoint(self.hi, 'up')}]"


def _pow_directed(base: float, exponent: int, direction: int) -> float:
    """base**exponent by repeated multiplication, each step rounded outward
    in the requested direction (direction < 0 gives a lower bound)."""
    sign = 1.0
    mag = base
    if base < 0:
        mag = -base
        if exponent % 2 == 1:
            sign = -1.0
            direction = -direction  # bound on the magnitude flips
    acc = mag
    for _ in range(exponent - 1):
        acc = acc * mag
        acc = _up(acc) if direction > 0 else max(_down(acc), 0.0)
    return sign * acc


def format_endpoint(value: float, direction: str) -> str:
    """Decimal rendering with 17 significant digits, rounded down for lower
    endpoints and up for upper ones.  Precision is raised in the rare case
    where 17 digits would not parse back to the identical double."""
    rounding = ROUND_FLOOR if direction == "down" else ROUND_CEILING
    d = Decimal(value)
    for digits in (17, 18, 19, 20):
        adjusted = d.adjusted()
        quantum = Decimal(1).scaleb(adjusted - digits + 1)
        text = str(d.quantize(quantum, rounding=rounding))
        if float(text) == value:
            return text
    return repr(value)


# ----------------------------------------------------------------------
# boxes
# ----------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Box:
    """Axis-aligned product of intervals."""

    components: tuple[Interval, ...]

    @staticmethod
    def from_intervals(intervals: Iterable[Interval]) -> "Box":
        return Box(tuple(intervals))

    @staticmethod
    def from_point(point: Sequence[float]) -> "Box":
        return Box(tuple(Interval.point(float(v)) for v in point))

    @staticmethod
    def midrad(center: Sequence[float], radius) -> "Box":
        center = [float(v) for v in center]
        if np.ndim(radius) == 0:
            radii = [float(radius)] * len(center)
        else:
            radii = [float(r) for r in radius]
        return Box(tuple(Interval.midrad(c, r) for c, r in zip(center, radii)))

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Interval:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def mid(self) -> np.ndarray:
        return np.array([c.mid for c in self.components], dtype=float)

    def rad_outer(self) -> np.ndarray:
        return np.array([c.rad_outer for c in self.components], dtype=float)

    def widths(self) -> np.ndarray:
        return np.array([c.width for c in self.components], dtype=float)

    def max_rad(self) -> float:
        return max(c.rad_outer for c in self.components)

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(c.contains(float(v)) for c, v in zip(self.components, point))

    def intersect(self, other: "Box") -> "Box | None":
        out = []
        for a, b in zip(self.components, other.components):
            piece = a.intersect(b)
            if piece is None:
                return None
            out.append(piece)
        return Box(tuple(out))

    def is_subset(self, other: "Box") -> bool:
        return all(a.is_subset(b) for a, b in zip(self.components, other.components))

    def is_interior_of(self, other: "Box") -> bool:
        return all(a.is_interior_of(b) for a, b in zip(self.components, other.components))

    def overlaps(self, other: "Box") -> bool:
        return self.intersect(other) is not None

    def inflate(self, fraction: float) -> "Box":
        """Pad every component by ``fraction`` of its radius; point
        components get a few-ulp pad so inflation always grows the box."""
        out = []
        for c in self.components:
            pad = fraction * c.rad
            if pad == 0.0:
                pad = 4.0 * math.ulp(max(abs(c.mid), 1.0))
            out.append(Interval(_down(c.lo - pad), _up(c.hi + pad)))
        return Box(tuple(out))

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.components)


# ----------------------------------------------------------------------
# interval matrices
# ----------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class IntervalMatrix:
    rows: tuple[tuple[Interval, ...], ...]

    @staticmethod
    def from_rows(rows: Iterable[Iterable[Interval]]) -> "IntervalMatrix":
        return IntervalMatrix(tuple(tuple(row) for row in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, i: int) -> tuple[Interval, ...]:
        return self.rows[i]

    def mid_matrix(self) -> np.ndarray:
        return np.array([[e.mid for e in row] for row in self.rows], dtype=float)

    def mag_inf_norm(self) -> float:
        """Max row sum of entry magnitudes."""
        return max(math.fsum(e.mag for e in row) for row in self.rows)


# ----------------------------------------------------------------------
# evaluation of polynomials over boxes
# ----------------------------------------------------------------------


def eval_interval(poly: Polynomial, box: Box) -> Interval:
    """Natural interval extension: per-variable integer powers with the
    even-power sharpening, products left to right, terms summed in the
    polynomial's canonical order."""
    if poly.nvars != len(box):
        raise ValueError("box dimension does not match polynomial")
    total = Interval.point(0.0)
    for term in poly.terms:
        acc = Interval.point(term.coefficient)
        for j, e in enumerate(term.exponents):
            if e:
                acc = acc * box[j].pow_int(e)
        total = total + acc
    return total


def eval_jacobian_interval(system: PolySystem, box: Box) -> IntervalMatrix:
    return IntervalMatrix.from_rows(
        tuple(eval_interval(entry, box) for entry in row) for row in system.jacobian
    )


def eval_hessian_interval(system: PolySystem, i: int, box: Box) -> IntervalMatrix:
    return IntervalMatrix.from_rows(
        tuple(eval_interval(entry, box) for entry in row) for row in system.hessians[i]
    )


# ----------------------------------------------------------------------
# point linear algebra used by the certification steps
# ----------------------------------------------------------------------


def inf_norm_vec(v) -> float:
    arr = np.asarray(v)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def inf_norm_mat(m) -> float:
    arr = np.asarray(m)
    return float(np.max(np.sum(np.abs(arr), axis=1)))


def invert(matrix: np.ndarray, pivot_rtol: float = 1e-12) -> np.ndarray:
    """Gauss-Jordan inversion with partial pivoting.  A pivot smaller than
    pivot_rtol times the largest row norm raises SingularMatrixError."""
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    threshold = pivot_rtol * max(float(np.max(np.sum(np.abs(a), axis=1))), 1e-300)
    inv = np.eye(n)
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        pivot = a[pivot_row, col]
        if abs(pivot) <= threshold:
            raise SingularMatrixError(f"pivot {pivot:.3e} below threshold {threshold:.3e}")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            inv[[col, pivot_row]] = inv[[pivot_row, col]]
        scale = 1.0 / pivot
        a[col] *= scale
        inv[col] *= scale
        for r in range(n):
            if r != col and a[r, col] != 0.0:
                factor = a[r, col]
                a[r] -= factor * a[col]
                inv[r] -= factor * inv[col]
    return inv
