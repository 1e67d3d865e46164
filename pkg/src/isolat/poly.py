"""Sparse multivariate polynomials over machine reals.

Polynomials are stored as canonically ordered term lists so that two
polynomials built from the same monomials compare equal regardless of the
order in which they were assembled.  Formal differentiation is exact on the
coefficients; evaluation follows one fixed scheme (binary powering per
variable, products and sums in canonical term order) so repeated evaluation
of the same polynomial at the same point is bit-for-bit reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Exponents = tuple[int, ...]


class EvaluationError(ArithmeticError):
    """Evaluation produced a non-finite value (overflow at the given point)."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class NonSquareSystemError(ValueError):
    """The number of equations does not match the number of variables."""


def _ipow(base, exponent: int):
    """Binary powering; works for float and complex alike."""
    result = None
    acc = base
    e = exponent
    while e > 0:
        if e & 1:
            result = acc if result is None else result * acc
        e >>= 1
        if e:
            acc = acc * acc
    return 1.0 if result is None else result


@dataclass(frozen=True)
class Monomial:
    coefficient: float
    exponents: Exponents

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _grlex_key(exponents: Exponents):
    # graded lexicographic, highest degree first
    return (-sum(exponents), tuple(-e for e in exponents))


@dataclass(frozen=True)
class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    nvars: int
    terms: tuple[Monomial, ...]

    @staticmethod
    def from_dict(nvars: int, coeffs: dict[Exponents, float]) -> "Polynomial":
        terms = tuple(
            Monomial(float(c), e)
            for e, c in sorted(coeffs.items(), key=lambda item: _grlex_key(item[0]))
            if c != 0.0
        )
        return Polynomial(nvars, terms)

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, ())

    @staticmethod
    def constant(nvars: int, value: float) -> "Polynomial":
        if value == 0.0:
            return Polynomial.zero(nvars)
        return Polynomial(nvars, (Monomial(float(value), (0,) * nvars),))

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} variables")
        exps = tuple(1 if j == index else 0 for j in range(nvars))
        return Polynomial(nvars, (Monomial(1.0, exps),))

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(t.degree for t in self.terms)

    def coefficient_dict(self) -> dict[Exponents, float]:
        return {t.exponents: t.coefficient for t in self.terms}

    def used_variables(self) -> tuple[int, ...]:
        used = set()
        for t in self.terms:
            for j, e in enumerate(t.exponents):
                if e:
                    used.add(j)
        return tuple(sorted(used))

    # ------------------------------------------------------------------
    # arithmetic (used by the parser and by differentiation helpers)
    # ------------------------------------------------------------------

    def _check_compatible(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomials have different variable counts")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        coeffs = dict(self.coefficient_dict())
        for e, c in other.coefficient_dict().items():
            coeffs[e] = coeffs.get(e, 0.0) + c
        return Polynomial.from_dict(self.nvars, coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, tuple(Monomial(-t.coefficient, t.exponents) for t in self.terms))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        coeffs: dict[Exponents, float] = {}
        for a in self.terms:
            for b in other.terms:
                e = tuple(x + y for x, y in zip(a.exponents, b.exponents))
                coeffs[e] = coeffs.get(e, 0.0) + a.coefficient * b.coefficient
        return Polynomial.from_dict(self.nvars, coeffs)

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("polynomial exponents must be non-negative integers")
        result = Polynomial.constant(self.nvars, 1.0)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor: float) -> "Polynomial":
        if factor == 0.0:
            return Polynomial.zero(self.nvars)
        return Polynomial(
            self.nvars, tuple(Monomial(t.coefficient * factor, t.exponents) for t in self.terms)
        )

    # ------------------------------------------------------------------
    # calculus and evaluation
    # ------------------------------------------------------------------

    def differentiate(self, var: int) -> "Polynomial":
        """Exact formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range for {self.nvars} variables")
        coeffs: dict[Exponents, float] = {}
        for t in self.terms:
            e = t.exponents[var]
            if e == 0:
                continue
            exps = tuple(x - 1 if j == var else x for j, x in enumerate(t.exponents))
            coeffs[exps] = coeffs.get(exps, 0.0) + t.coefficient * e
        return Polynomial.from_dict(self.nvars, coeffs)

    def _eval(self, x):
        total = None
        for t in self.terms:
            v = t.coefficient
            for j, e in enumerate(t.exponents):
                if e:
                    v = v * _ipow(x[j], e)
            total = v if total is None else total + v
        return 0.0 if total is None else total

    def eval_real(self, x: Sequence[float]) -> float:
        """Evaluate at a real point; raises EvaluationError on overflow."""
        value = self._eval([float(v) for v in x])
        if not math.isfinite(value):
            raise EvaluationError("polynomial evaluation overflowed", point=tuple(x))
        return float(value)

    def eval_complex(self, z: Sequence[complex]) -> complex:
        """Evaluate at a complex point with the same scheme as eval_real."""
        value = self._eval([complex(v) for v in z])
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise EvaluationError("polynomial evaluation overflowed", point=tuple(z))
        return value

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def render(self, var_names: Sequence[str]) -> str:
        """Canonical text form; parses back to a structurally equal polynomial."""
        if len(var_names) != self.nvars:
            raise ValueError("wrong number of variable names")
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for k, t in enumerate(self.terms):
            c = t.coefficient
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = []
            for name, e in zip(var_names, t.exponents):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors or mag != 1.0:
                coeff_text = repr(int(mag)) if mag == int(mag) and mag < 1e16 else repr(mag)
                factors.insert(0, coeff_text)
            body = "*".join(factors)
            if k == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)


def _differentiate_pair(p: Polynomial, j: int, k: int) -> Polynomial:
    return p.differentiate(j).differentiate(k)


@dataclass(frozen=True)
class PolySystem:
    """Square system of polynomials with precomputed Jacobian and Hessians.

    ``jacobian[i][j]`` is d polys[i] / d x_j.  ``hessians[i]`` is the n-by-n
    matrix of second partials of polys[i]; it is built symmetrically so that
    hessians[i][j][k] is hessians[i][k][j] by construction.
    """

    polys: tuple[Polynomial, ...]
    var_names: tuple[str, ...]
    jacobian: tuple[tuple[Polynomial, ...], ...]
    hessians: tuple[tuple[tuple[Polynomial, ...], ...], ...]

    @classmethod
    def from_polys(
        cls, polys: Iterable[Polynomial], var_names: Sequence[str] | None = None
    ) -> "PolySystem":
        polys = tuple(polys)
        if not polys:
            raise ValueError("empty system")
        nvars = polys[0].nvars
        if any(p.nvars != nvars for p in polys):
            raise ValueError("all polynomials must share one variable set")
        if len(polys) != nvars:
            raise NonSquareSystemError(
                f"system has {len(polys)} equations in {nvars} variables"
            )
        if var_names is None:
            var_names = tuple(f"x{i+1}" for i in range(nvars))
        else:
            var_names = tuple(var_names)
            if len(var_names) != nvars:
                raise ValueError("wrong number of variable names")
        jacobian = tuple(
            tuple(p.differentiate(j) for j in range(nvars)) for p in polys
        )
        hessians = []
        for i, row in enumerate(jacobian):
            upper = {}
            for j in range(nvars):
                for k in range(j, nvars):
                    upper[(j, k)] = row[j].differentiate(k)
            hessians.append(
                tuple(
                    tuple(upper[(min(j, k), max(j, k))] for k in range(nvars))
                    for j in range(nvars)
                )
            )
        return cls(polys, var_names, jacobian, tuple(hessians))

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    def total_degrees(self) -> tuple[int, ...]:
        return tuple(p.degree() for p in self.polys)

    def eval_real(self, x: Sequence[float]) -> np.ndarray:
        return np.array([p.eval_real(x) for p in self.polys], dtype=float)

    def eval_complex(self, z: Sequence[complex]) -> np.ndarray:
        return np.array([p.eval_complex(z) for p in self.polys], dtype=complex)

    def eval_jacobian(self, x) -> np.ndarray:
        """Jacobian matrix at a point; complex input yields a complex matrix."""
        arr = np.asarray(x)
        if np.iscomplexobj(arr):
            pt = [complex(v) for v in arr]
            return np.array(
                [[q.eval_complex(pt) for q in row] for row in self.jacobian], dtype=complex
            )
        pt = [float(v) for v in arr]
        return np.array([[q.eval_real(pt) for q in row] for row in self.jacobian], dtype=float)

    def render(self) -> str:
        lines = ["vars: " + " ".join(self.var_names)]
        lines.extend(p.render(self.var_names) for p in self.polys)
        return "\n".join(lines) + "\n"
