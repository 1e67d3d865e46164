"""Independent real-root reference for univariate polynomials.

Roots come from the companion-matrix eigenvalues of the coefficient
vector and are polished with Newton iteration, giving an oracle that
shares no code path with the interval machinery it is used to check.
"""
from __future__ import annotations

import numpy as np

from .poly import Polynomial


class OracleInapplicableError(ValueError):
    """The polynomial has a (numerically) multiple root, so simple-root
    reference counts are not well defined."""


def _coefficient_vector(poly: Polynomial) -> np.ndarray:
    """Dense descending-degree coefficients, np.roots convention."""
    if poly.nvars != 1:
        raise ValueError("oracle handles univariate polynomials only")
    deg = poly.degree()
    if deg < 1:
        raise ValueError("oracle needs degree >= 1")
    coeffs = np.zeros(deg + 1)
    for mono in poly.terms:
        coeffs[deg - mono.exponents[0]] += mono.coefficient
    return coeffs


def _polish(coeffs: np.ndarray, z: complex, iters: int = 50) -> complex:
    dcoeffs = np.polyder(coeffs)
    best = z
    best_res = abs(np.polyval(coeffs, z))
    for _ in range(iters):
        dp = np.polyval(dcoeffs, z)
        if dp == 0:
            break
        z = z - np.polyval(coeffs, z) / dp
        res = abs(np.polyval(coeffs, z))
        if res < best_res:
            best, best_res = z, res
        if res == 0.0:
            break
    return best


def real_roots(
    poly: Polynomial,
    imag_tolerance: float = 1e-8,
    separation: float = 1e-7,
) -> list[float]:
    """Distinct real roots in increasing order.

    Raises OracleInapplicableError when polished roots cluster closer
    than ``separation`` (relative) or the derivative vanishes at a root,
    both signs of a multiple root.
    """
    coeffs = _coefficient_vector(poly)
    roots = [_polish(coeffs, z) for z in np.roots(coeffs)]
    scale = max(1.0, max(abs(z) for z in roots))
    for i, a in enumerate(roots):
        for b in roots[i + 1 :]:
            if abs(a - b) < separation * scale:
                raise OracleInapplicableError(
                    "root cluster detected; polynomial is not squarefree "
                    "to working precision"
                )
    dcoeffs = np.polyder(coeffs)
    real = []
    for z in roots:
        if abs(z.imag) > imag_tolerance * scale:
            continue
        x = z.real
        if abs(np.polyval(dcoeffs, x)) < 1e-8 * max(
            1.0, abs(np.polyval(dcoeffs, scale))
        ):
            raise OracleInapplicableError(
                "derivative vanishes at a root; root is not simple"
            )
        real.append(float(x))
    real.sort()
    return real


def random_polynomial(
    rng: np.random.Generator, max_degree: int = 8
) -> Polynomial:
    """Random dense univariate polynomial with nonzero leading term."""
    deg = int(rng.integers(1, max_degree + 1))
    coeffs = rng.uniform(-2.0, 2.0, size=deg + 1)
    while coeffs[0] == 0.0:
        coeffs[0] = rng.uniform(-2.0, 2.0)
    terms = {(deg - i,): float(c) for i, c in enumerate(coeffs) if c != 0.0}
    return Polynomial.from_dict(1, terms)
