"""Kantorovich-style construction of initial boxes around approximate zeros.

Given an approximate zero, a short Newton refinement is run on its real
part.  At the refined point the quantities

    B   =  inf-norm of the inverse Jacobian
    eta =  inf-norm of the Newton step
    K   =  a Lipschitz bound on the Jacobian over a trial box
    h   =  B * K * eta

are assembled; h <= 1/2 guarantees a root within the Kantorovich radius of
the refined point, which becomes the initial box handed to interval
verification.  A cheap point-arithmetic variant of the radius estimate is
used to reject candidates whose imaginary parts are too large to be
rounding artifacts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interval import (
    Box,
    SingularMatrixError,
    eval_hessian_interval,
    inf_norm_mat,
    inf_norm_vec,
    invert,
)
from .poly import PolySystem


class CertificationError(Exception):
    """Initial-box construction failed; reason is one of
    'singular-jacobian' or 'max-retries-exceeded'."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}{': ' + detail if detail else ''}")
        self.reason = reason


@dataclass(frozen=True)
class KantorovichData:
    """Diagnostics of a successful initial-box construction."""

    inv_jac_norm: float        # B
    newton_step_norm: float    # eta
    lipschitz: float           # K over the trial box
    h: float                   # B * K * eta, at most 1/2 on success
    radius: float              # certified enclosure radius (floored, see below)
    refined_center: np.ndarray
    newton_iters: int


def lipschitz_constant(system: PolySystem, box: Box) -> float:
    """Bound on the Jacobian's variation over ``box``: the worst equation's
    sum over columns of the largest Hessian-entry magnitude in that column,
    all entries evaluated in interval arithmetic."""
    n = system.nvars
    worst = 0.0
    for i in range(n):
        hess = eval_hessian_interval(system, i, box)
        column_sum = math.fsum(
            max(hess[k][j].mag for k in range(n)) for j in range(n)
        )
        worst = max(worst, column_sum)
    return worst


# Two kinds of rounding noise bound the radius from below.  The Krawczyk
# image of a box X accumulates one outward rounding per interval operation
# per coordinate, about 2n+2 ulps of the center's magnitude; a box tighter
# than that can never contain its own image.  And eta itself is a float
# quantity, so the true root can sit a few ulps beyond the nominal radius.
# A pad of a few dozen ulps covers both, so it is added, not maxed.
_RADIUS_FLOOR_ULPS = 32.0


def _radius_floor(center: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(center))) if center.size else 0.0)
    return _RADIUS_FLOOR_ULPS * math.ulp(scale)


def init_width(system: PolySystem, x0, max_retries: int = 20) -> KantorovichData:
    """Newton-refine the real part of ``x0`` until the Kantorovich test
    h = B*K*eta passes, then return the certified radius

        r = 2*eta / (1 + sqrt(1 - 2h))

    (the stable form of (1 - sqrt(1 - 2h))/h * eta).  A pad of a few ulps
    of the center absorbs evaluation noise and keeps the box off a point."""
    c = np.real(np.asarray(x0, dtype=complex)).astype(float)
    try:
        for iteration in range(1, max_retries + 1):
            jac = system.eval_jacobian(c)
            jac_inv = invert(jac)
            c = c - jac_inv @ system.eval_real(c)

            jac = system.eval_jacobian(c)
            jac_inv = invert(jac)
            b_norm = inf_norm_mat(jac_inv)
            step = jac_inv @ system.eval_real(c)
            eta = inf_norm_vec(step)
            omega = 2.0 * eta
            trial_box = Box.midrad(c, omega)
            k_lip = lipschitz_constant(system, trial_box)
            h = b_norm * k_lip * eta
            if h <= 0.5:
                radius = 2.0 * eta / (1.0 + math.sqrt(1.0 - 2.0 * h))
                radius = radius + _radius_floor(c)
                return KantorovichData(
                    inv_jac_norm=b_norm,
                    newton_step_norm=eta,
                    lipschitz=k_lip,
                    h=h,
                    radius=radius,
                    refined_center=c,
                    newton_iters=iteration,
                )
    except SingularMatrixError as exc:
        raise CertificationError("singular-jacobian", str(exc)) from exc
    raise CertificationError(
        "max-retries-exceeded", f"h stayed above 1/2 after {max_retries} Newton updates"
    )


def _point_lipschitz(system: PolySystem, x: np.ndarray) -> float:
    """The lipschitz_constant formula collapsed to a point (complex allowed)."""
    n = system.nvars
    is_complex = np.iscomplexobj(x)
    pt = [complex(v) for v in x] if is_complex else [float(v) for v in x]
    worst = 0.0
    for i in range(n):
        hess = system.hessians[i]
        total = 0.0
        for j in range(n):
            col_max = 0.0
            for k in range(n):
                entry = hess[k][j]
                value = entry.eval_complex(pt) if is_complex else entry.eval_real(pt)
                col_max = max(col_max, abs(value))
            total += col_max
        worst = max(worst, total)
    return worst


def empirical_radius(system: PolySystem, x0) -> float | None:
    """Point-arithmetic estimate of the distance from ``x0`` to the root it
    approximates:

        r' = B * ||F|| / (1 - lambda * B^2 * ||F||)

    with all norms at x0.  None means the estimate is unbounded (the
    denominator was not positive or the Jacobian was singular)."""
    x = np.asarray(x0)
    x = x.astype(complex) if np.iscomplexobj(x) else x.astype(float)
    pt = list(x)
    try:
        values = (
            system.eval_complex(pt) if np.iscomplexobj(x) else system.eval_real(pt)
        )
        jac = system.eval_jacobian(x)
        jac_inv = np.linalg.inv(jac)
    except np.linalg.LinAlgError:
        return None
    b_norm = float(np.max(np.sum(np.abs(jac_inv), axis=1)))
    f_norm = float(np.max(np.abs(values))) if len(values) else 0.0
    lam = _point_lipschitz(system, x)
    denominator = 1.0 - lam * b_norm * b_norm * f_norm
    if not math.isfinite(denominator) or denominator <= 0.0:
        return None
    return b_norm * f_norm / denominator


def iscomplex(system: PolySystem, z) -> bool:
    """True when some imaginary part of ``z`` clearly exceeds the empirical
    radius, i.e. the candidate cannot be a real root seen through rounding
    noise.  An unbounded estimate answers False so no candidate is discarded
    on shaky evidence.

    Two guards keep the test off its knife edge for a real root carrying
    imaginary dust y.  First, F(z) is then dominated by i*y*J(x), so the
    radius estimate itself comes out within rounding of |y| and a bare
    comparison would flip on the last ulp; the factor 2 absorbs that.
    Second, a fully converged candidate can have F(z) = 0 exactly while y
    keeps a few (possibly subnormal) junk bits, collapsing the estimate to
    zero; the noise floor of a few ulps of the coordinate scale covers any
    rounding-born imaginary part.  Genuine non-real candidates sit orders
    of magnitude above both guards, so they cost nothing there."""
    point = np.asarray(z, dtype=complex)
    radius = empirical_radius(system, point)
    if radius is None:
        return False
    noise = 16.0 * math.ulp(max(1.0, float(np.max(np.abs(point)))))
    return bool(np.any(np.abs(point.imag) > max(2.0 * radius, noise)))
