"""Total-degree homotopy continuation front end.

Start system g_i = x_i^{d_i} - 1, start points all combinations of the
d_i-th roots of unity, and the convex combination

    H(x, t) = gamma * (1 - t) * G(x) + t * F(x)

with a seeded random unit-circle gamma.  Paths are advanced by an Euler
predictor and a short Newton corrector with adaptive step halving and
doubling, then polished at t = 1 with plain Newton on F.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .poly import Polynomial, PolySystem

_CORRECTOR_TOL = 1e-8
_POLISH_ITERS = 20
_STEP_GROWTH_AFTER = 3


class RootsFileError(ValueError):
    """Malformed external zeros file."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TrackerConfig:
    gamma: complex = complex(math.cos(0.6), math.sin(0.6))
    initial_step: float = 0.1
    min_step: float = 1e-7
    max_newton_iters_per_step: int = 3
    divergence_norm: float = 1e8
    residual_tolerance: float = 1e-10
    endpoint_cluster_tolerance: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.min_step <= self.initial_step <= 1.0):
            raise ValueError("need 0 < min_step <= initial_step <= 1")
        if abs(abs(self.gamma) - 1.0) > 1e-12:
            raise ValueError("gamma must lie on the unit circle")

    @staticmethod
    def from_seed(seed: int, **overrides) -> "TrackerConfig":
        rng = np.random.default_rng(seed)
        angle = 2.0 * math.pi * rng.random()
        cfg = TrackerConfig(gamma=complex(math.cos(angle), math.sin(angle)))
        return replace(cfg, **overrides) if overrides else cfg


@dataclass(frozen=True, eq=False)
class ApproxZero:
    """One approximate complex zero with its recomputed residual."""

    point: np.ndarray
    residual: float
    path_id: int
    converged: bool

    def __post_init__(self):
        self.point.setflags(write=False)

    @staticmethod
    def for_system(system: PolySystem, point: Sequence[complex], path_id: int,
                   residual_tolerance: float = 1e-10) -> "ApproxZero":
        pt = np.asarray(point, dtype=complex).copy()
        residual = _residual(_CompiledSystem.for_system(system), pt)
        return ApproxZero(pt, residual, path_id, residual <= residual_tolerance)


# ----------------------------------------------------------------------
# compiled evaluation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class _CompiledPolyBlock:
    """A stack of polynomials flattened to coefficient/exponent arrays.

    Evaluation builds a per-variable power table and gathers from it, so
    the cost per point is a handful of vectorized operations regardless of
    how many terms the block holds.
    """

    n_polys: int
    nvars: int
    coeffs: np.ndarray        # (T,) float
    exponents: np.ndarray     # (T, nvars) int
    segments: np.ndarray      # (n_polys,) offsets into the term arrays
    max_degree: int

    @staticmethod
    def from_polys(polys: Sequence[Polynomial], nvars: int) -> "_CompiledPolyBlock":
        coeffs: list[float] = []
        exps: list[tuple[int, ...]] = []
        segments = [0]
        for p in polys:
            if p.terms:
                for t in p.terms:
                    coeffs.append(t.coefficient)
                    exps.append(t.exponents)
            else:
                # reduceat yields vals[s_i], not 0, for an empty segment, so
                # a zero polynomial gets one explicit zero term
                coeffs.append(0.0)
                exps.append((0,) * nvars)
            segments.append(len(coeffs))
        exp_arr = np.array(exps, dtype=np.int64) if exps else np.zeros((0, nvars), dtype=np.int64)
        max_degree = int(exp_arr.max()) if exp_arr.size else 0
        return _CompiledPolyBlock(
            n_polys=len(polys),
            nvars=nvars,
            coeffs=np.array(coeffs, dtype=float),
            exponents=exp_arr,
            segments=np.array(segments[:-1], dtype=np.int64),
            max_degree=max_degree,
        )

    def eval(self, z: np.ndarray) -> np.ndarray:
        if self.coeffs.size == 0:
            return np.zeros(self.n_polys, dtype=complex)
        powers = np.ones((self.nvars, self.max_degree + 1), dtype=complex)
        for d in range(1, self.max_degree + 1):
            powers[:, d] = powers[:, d - 1] * z
        vals = self.coeffs.astype(complex)
        for j in range(self.nvars):
            vals = vals * powers[j, self.exponents[:, j]]
        return np.add.reduceat(vals, self.segments)

    def eval_mag(self, z: np.ndarray) -> np.ndarray:
        """Sum of term magnitudes at |z|; the natural residual scale."""
        if self.coeffs.size == 0:
            return np.zeros(self.n_polys)
        az = np.abs(z)
        powers = np.ones((self.nvars, self.max_degree + 1))
        for d in range(1, self.max_degree + 1):
            powers[:, d] = powers[:, d - 1] * az
        vals = np.abs(self.coeffs)
        for j in range(self.nvars):
            vals = vals * powers[j, self.exponents[:, j]]
        return np.add.reduceat(vals, self.segments)


@dataclass(frozen=True)
class _CompiledSystem:
    nvars: int
    f_block: _CompiledPolyBlock
    j_block: _CompiledPolyBlock

    @staticmethod
    def for_system(system: PolySystem) -> "_CompiledSystem":
        n = system.nvars
        f_block = _CompiledPolyBlock.from_polys(system.polys, n)
        j_polys = [entry for row in system.jacobian for entry in row]
        j_block = _CompiledPolyBlock.from_polys(j_polys, n)
        return _CompiledSystem(n, f_block, j_block)

    def f(self, z: np.ndarray) -> np.ndarray:
        return self.f_block.eval(z)

    def jac(self, z: np.ndarray) -> np.ndarray:
        return self.j_block.eval(z).reshape(self.nvars, self.nvars)


def _residual(compiled: _CompiledSystem, z: np.ndarray) -> float:
    """Backward-error style residual: |f_i(z)| relative to the magnitude of
    the terms that produced it, so large-magnitude roots are not rejected
    for carrying proportionally large rounding noise."""
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(compiled.f(z))
        scale = np.maximum(1.0, compiled.f_block.eval_mag(z))
        norm = float(np.max(vals / scale)) if vals.size else 0.0
    return norm if math.isfinite(norm) else math.inf


# ----------------------------------------------------------------------
# start system
# ----------------------------------------------------------------------


def total_degree_start(system: PolySystem) -> tuple[PolySystem, list[np.ndarray]]:
    """Start system x_i^{d_i} - 1 and its full grid of roots of unity.

    The number of start points is the product of the total degrees.  A
    constant or zero equation has no meaningful degree and is rejected.
    """
    n = system.nvars
    degrees = system.total_degrees()
    if any(d < 1 for d in degrees):
        raise ValueError("every equation must have total degree at least 1")
    polys = []
    for i, d in enumerate(degrees):
        coeffs = {
            tuple(d if j == i else 0 for j in range(n)): 1.0,
            (0,) * n: -1.0,
        }
        polys.append(Polynomial.from_dict(n, coeffs))
    start_system = PolySystem.from_polys(polys, system.var_names)
    unity_roots = [
        [complex(math.cos(2.0 * math.pi * k / d), math.sin(2.0 * math.pi * k / d)) for k in range(d)]
        for d in degrees
    ]
    start_points = [np.array(combo, dtype=complex) for combo in itertools.product(*unity_roots)]
    return start_system, start_points


# ----------------------------------------------------------------------
# path tracking
# ----------------------------------------------------------------------


def _start_values(degrees: Sequence[int], z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """G(z) and diagonal of G'(z) for the start system x^d - 1."""
    g = np.array([z[i] ** d - 1.0 for i, d in enumerate(degrees)], dtype=complex)
    gprime = np.array([d * z[i] ** (d - 1) for i, d in enumerate(degrees)], dtype=complex)
    return g, gprime


def track_path(
    system: PolySystem,
    start_point: Sequence[complex],
    cfg: TrackerConfig,
    path_id: int = 0,
    compiled: "_CompiledSystem | None" = None,
    degrees: Sequence[int] | None = None,
) -> ApproxZero | None:
    """Track one start point from t = 0 to t = 1; None means the path
    diverged (norm blow-up or the step shrank below min_step)."""
    if compiled is None:
        compiled = _CompiledSystem.for_system(system)
    if degrees is None:
        degrees = system.total_degrees()
    gamma = complex(cfg.gamma)
    x = np.asarray(start_point, dtype=complex).copy()
    t = 0.0
    dt = cfg.initial_step
    successes = 0

    def h_and_jac(z: np.ndarray, tt: float) -> tuple[np.ndarray, np.ndarray]:
        g, gp = _start_values(degrees, z)
        fv = compiled.f(z)
        h = gamma * (1.0 - tt) * g + tt * fv
        hj = tt * compiled.jac(z)
        diag = gamma * (1.0 - tt) * gp
        hj[np.arange(len(z)), np.arange(len(z))] += diag
        return h, hj

    with np.errstate(over="ignore", invalid="ignore"):
        while t < 1.0:
            step = min(dt, 1.0 - t)
            t_new = 1.0 if 1.0 - t <= step * (1.0 + 1e-12) else t + step
            # Euler predictor along dx/dt = -Hx^{-1} dH/dt
            g, _ = _start_values(degrees, x)
            fv = compiled.f(x)
            ht = fv - gamma * g
            _, hx = h_and_jac(x, t)
            try:
                dx = np.linalg.solve(hx, -ht)
                x_pred = x + step * dx
            except np.linalg.LinAlgError:
                x_pred = x
            # Newton corrector at t_new
            xc = x_pred
            ok = False
            for _ in range(cfg.max_newton_iters_per_step):
                h, hj = h_and_jac(xc, t_new)
                try:
                    delta = np.linalg.solve(hj, h)
                except np.linalg.LinAlgError:
                    break
                xc = xc - delta
                if not np.all(np.isfinite(xc.view(float))):
                    break
                if float(np.max(np.abs(delta))) <= _CORRECTOR_TOL * (1.0 + float(np.max(np.abs(xc)))):
                    ok = True
                    break
            if ok:
                x = xc
                t = t_new
                successes += 1
                if successes >= _STEP_GROWTH_AFTER and dt < cfg.initial_step:
                    dt = min(2.0 * dt, cfg.initial_step)
                    successes = 0
            else:
                successes = 0
                dt = 0.5 * dt
                if dt < cfg.min_step:
                    return None
            if float(np.max(np.abs(x))) > cfg.divergence_norm:
                return None

        # endpoint polish with plain Newton on F
        best = x
        best_res = _residual(compiled, x)
        for _ in range(_POLISH_ITERS):
            try:
                jac = compiled.jac(x)
                delta = np.linalg.solve(jac, compiled.f(x))
            except np.linalg.LinAlgError:
                break
            x = x - delta
            if not np.all(np.isfinite(x.view(float))):
                break
            res = _residual(compiled, x)
            if res < best_res:
                best, best_res = x, res
            else:
                break
        if float(np.max(np.abs(best))) > cfg.divergence_norm:
            return None

    return ApproxZero(
        point=best,
        residual=best_res,
        path_id=path_id,
        converged=best_res <= cfg.residual_tolerance,
    )


# ----------------------------------------------------------------------
# the full solve
# ----------------------------------------------------------------------

_WORKER_STATE: dict = {}


def _init_worker(system: PolySystem, cfg: TrackerConfig):
    _WORKER_STATE["system"] = system
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["compiled"] = _CompiledSystem.for_system(system)
    _WORKER_STATE["degrees"] = system.total_degrees()


def _track_indexed(args: tuple[int, np.ndarray]) -> tuple[int, "ApproxZero | None"]:
    path_id, point = args
    zero = track_path(
        _WORKER_STATE["system"],
        point,
        _WORKER_STATE["cfg"],
        path_id=path_id,
        compiled=_WORKER_STATE["compiled"],
        degrees=_WORKER_STATE["degrees"],
    )
    return path_id, zero


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ISOLAT_THREADS", "1")))
    except ValueError:
        return 1


def solve_all(
    system: PolySystem,
    cfg: TrackerConfig | None = None,
    workers: int | None = None,
) -> list[ApproxZero]:
    """Track every total-degree start point and return the deduplicated,
    converged endpoints in a canonical order."""
    cfg = cfg or TrackerConfig()
    workers = default_workers() if workers is None else max(1, workers)
    _, start_points = total_degree_start(system)

    if workers > 1 and len(start_points) > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(system, cfg)
        ) as pool:
            chunk = max(1, len(start_points) // (8 * workers))
            indexed = pool.map(_track_indexed, enumerate(start_points), chunksize=chunk)
            results = [zero for _, zero in sorted(indexed, key=lambda pair: pair[0])]
    else:
        compiled = _CompiledSystem.for_system(system)
        degrees = system.total_degrees()
        results = [
            track_path(system, pt, cfg, path_id=i, compiled=compiled, degrees=degrees)
            for i, pt in enumerate(start_points)
        ]

    endpoints = [z for z in results if z is not None and z.converged]
    return _dedupe(endpoints, cfg.endpoint_cluster_tolerance)


def _canonical_key(zero: ApproxZero):
    return tuple(v for z in zero.point for v in (z.real, z.imag))


def _dedupe(zeros: list[ApproxZero], tolerance: float) -> list[ApproxZero]:
    """Cluster endpoints closer than ``tolerance`` in the max norm, keeping
    the representative with the smallest residual.  Input order does not
    matter: candidates are visited in a canonical sort order."""
    kept: list[ApproxZero] = []
    kept_points: list[np.ndarray] = []
    for z in sorted(zeros, key=_canonical_key):
        match = None
        if kept_points:
            dists = np.max(np.abs(np.vstack(kept_points) - z.point), axis=1)
            nearest = int(np.argmin(dists))
            if float(dists[nearest]) < tolerance:
                match = nearest
        if match is None:
            kept.append(z)
            kept_points.append(z.point)
        elif z.residual < kept[match].residual:
            kept[match] = z
            kept_points[match] = z.point
    return kept


# ----------------------------------------------------------------------
# external zeros files
# ----------------------------------------------------------------------


def load_zeros(path, nvars: int, system: PolySystem | None = None) -> list[ApproxZero]:
    """Read zeros from a text file: one zero per line, 2*nvars decimal
    numbers (re im re im ...), '#' comments.  When ``system`` is given the
    residuals are recomputed against it; otherwise they are set to inf."""
    compiled = _CompiledSystem.for_system(system) if system is not None else None
    zeros: list[ApproxZero] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            cut = raw.find("#")
            text = raw[:cut] if cut >= 0 else raw
            parts = text.split()
            if not parts:
                continue
            if len(parts) != 2 * nvars:
                raise RootsFileError(
                    f"expected {2 * nvars} numbers (re im per variable), got {len(parts)}",
                    line_no,
                )
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise RootsFileError(str(exc), line_no) from None
            point = np.array(
                [complex(values[2 * i], values[2 * i + 1]) for i in range(nvars)], dtype=complex
            )
            if compiled is not None:
                residual = _residual(compiled, point)
                converged = residual <= 1e-10
            else:
                residual = math.inf
                converged = False
            zeros.append(
                ApproxZero(point=point, residual=residual, path_id=len(zeros), converged=converged)
            )
    return zeros
