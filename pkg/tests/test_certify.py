"""Kantorovich initial boxes, the radius estimate, and the non-real filter."""
import math

import numpy as np
import pytest

from isolat.certify import (
    CertificationError,
    KantorovichData,
    empirical_radius,
    init_width,
    iscomplex,
    lipschitz_constant,
)
from isolat.homotopy import TrackerConfig, solve_all
from isolat.interval import Box
from isolat.parser import parse_system


def _newton_limit(system, start, iters=60):
    x = np.array(start, dtype=float)
    for _ in range(iters):
        step = np.linalg.solve(system.eval_jacobian(x), system.eval_real(x))
        x = x - step
        if float(np.max(np.abs(step))) < 1e-15:
            break
    return x


class TestLipschitz:
    def test_univariate_quadratic(self):
        # f = x^2 - 2, f'' = 2 everywhere
        system = parse_system("vars: x\nx^2 - 2\n")
        box = Box.midrad([1.4], 0.1)
        assert lipschitz_constant(system, box) == pytest.approx(2.0)

    def test_cubic_grows_with_box(self):
        # f = x^3, f'' = 6x: bound is 6 * max|x| over the box
        system = parse_system("vars: x\nx^3\n")
        assert lipschitz_constant(system, Box.midrad([1.0], 0.5)) >= 9.0
        small = lipschitz_constant(system, Box.midrad([1.0], 0.01))
        large = lipschitz_constant(system, Box.midrad([1.0], 0.5))
        assert small < large

    def test_bivariate_hand_value(self):
        # f1 = x^2*y: H = [[2y, 2x], [2x, 0]]; at the unit box around (1,1)
        # column maxima are 2*|y|max and 2*|x|max
        system = parse_system("vars: x y\nx^2*y\nx + y\n")
        box = Box.midrad([1.0, 1.0], 0.5)
        value = lipschitz_constant(system, box)
        assert value == pytest.approx(2 * 1.5 + 2 * 1.5, rel=1e-12)


class TestInitWidth:
    def test_sqrt2_quantities(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        data = init_width(system, [1.4142])
        root = math.sqrt(2)
        # the loop returns as soon as h passes, here after one Newton update
        assert abs(data.refined_center[0] - root) <= data.radius
        assert abs(data.refined_center[0] - root) < 1e-7
        assert data.h <= 0.5
        # B ~ 1/(2 sqrt 2), K ~ 2
        assert data.inv_jac_norm == pytest.approx(1.0 / (2.0 * root), rel=1e-6)
        assert data.lipschitz == pytest.approx(2.0, rel=1e-9)
        assert data.radius >= data.newton_step_norm
        assert data.radius <= 2.0 * data.newton_step_norm + 1e-13

    def test_root_within_radius(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        data = init_width(system, [1.41])
        assert abs(data.refined_center[0] - math.sqrt(2)) <= data.radius

    def test_invariants_radius_vs_eta(self):
        # radius <= 2 eta plus the ulp pad
        system = parse_system("vars: x y\nx^2 + y^2 - 4\nx*y - 1\n")
        data = init_width(system, [1.93, 0.52])
        pad = 32.0 * math.ulp(max(1.0, float(np.max(np.abs(data.refined_center)))))
        assert data.radius <= 2.0 * data.newton_step_norm + pad
        assert data.h <= 0.5

    def test_complex_input_uses_real_part(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        data = init_width(system, [1.414 + 1e-9j])
        assert abs(data.refined_center[0] - math.sqrt(2)) <= data.radius
        assert data.refined_center.dtype == np.dtype(float)

    def test_singular_jacobian_reported(self):
        system = parse_system("vars: x\nx^2\n")
        with pytest.raises(CertificationError) as err:
            init_width(system, [0.0])
        assert err.value.reason == "singular-jacobian"

    def test_retry_budget_exhaustion(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        with pytest.raises(CertificationError) as err:
            init_width(system, [1.4], max_retries=0)
        assert err.value.reason == "max-retries-exceeded"

    def test_kantorovich_soundness_random_univariate(self):
        """Newton's limit from the refined center stays inside the radius."""
        rng = np.random.default_rng(314)
        checked = 0
        while checked < 50:
            coeffs = rng.uniform(-3, 3, size=4)
            roots = np.roots(coeffs)
            real = [r.real for r in roots if abs(r.imag) < 1e-10]
            if not real:
                continue
            target = real[int(rng.integers(0, len(real)))]
            terms = {(3 - k,): float(coeffs[k]) for k in range(4) if coeffs[k] != 0.0}
            body = " + ".join(
                f"({c})*x^{e[0]}" if e[0] else f"({c})" for e, c in terms.items()
            )
            system = parse_system(f"vars: x\n{body}\n")
            start = target + rng.uniform(-1e-4, 1e-4)
            try:
                data = init_width(system, [start])
            except CertificationError:
                continue
            limit = _newton_limit(system, data.refined_center)
            assert float(np.max(np.abs(limit - data.refined_center))) <= data.radius
            checked += 1

    def test_kantorovich_soundness_random_bivariate(self):
        rng = np.random.default_rng(2718)
        checked = 0
        while checked < 50:
            a = float(rng.uniform(0.5, 4.0))
            b = float(rng.uniform(0.1, 0.9))
            system = parse_system(f"vars: x y\nx^2 + y^2 - {a}\nx*y - {b}\n")
            zeros = [
                z
                for z in solve_all(system, TrackerConfig.from_seed(checked))
                if float(np.max(np.abs(z.point.imag))) < 1e-9
            ]
            if not zeros:
                continue
            zero = zeros[int(rng.integers(0, len(zeros)))]
            start = zero.point.real + rng.uniform(-1e-6, 1e-6, size=2)
            try:
                data = init_width(system, start)
            except CertificationError:
                continue
            limit = _newton_limit(system, data.refined_center)
            assert float(np.max(np.abs(limit - data.refined_center))) <= data.radius
            checked += 1


class TestEmpiricalRadius:
    def test_hand_value_quadratic(self):
        # at x0 = 1.5 for x^2 - 2: B = 1/3, |F| = 1/4, lambda = 2
        # r' = (1/3)(1/4) / (1 - 2*(1/9)*(1/4)) = (1/12)/(17/18) = 3/34
        system = parse_system("vars: x\nx^2 - 2\n")
        value = empirical_radius(system, [1.5])
        assert value == pytest.approx(3.0 / 34.0, rel=1e-12)

    def test_overestimates_true_distance_near_root(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        for offset in (1e-3, 1e-6, 1e-9):
            value = empirical_radius(system, [math.sqrt(2) + offset])
            assert value is not None
            assert value >= offset * 0.5

    def test_unbounded_returns_none(self):
        # near the critical point of f the denominator goes non-positive
        system = parse_system("vars: x\nx^2 - 2\n")
        assert empirical_radius(system, [0.1]) is None

    def test_singular_returns_none(self):
        system = parse_system("vars: x\nx^2\n")
        assert empirical_radius(system, [0.0]) is None


class TestIsComplex:
    def test_real_candidate_with_rounding_noise_kept(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        assert not iscomplex(system, [math.sqrt(2) + 1e-13j])

    def test_genuinely_complex_flagged(self):
        system = parse_system("vars: x\nx^2 + 1\n")
        assert iscomplex(system, [1j])
        assert iscomplex(system, [-1j])

    def test_unbounded_estimate_keeps_candidate(self):
        # 0.5 + 0.5i is far from both roots of x^2 - 2; the radius estimate
        # blows up, and the filter must answer False rather than discard
        system = parse_system("vars: x\nx^2 - 2\n")
        assert empirical_radius(system, [0.5 + 0.5j]) is None
        assert not iscomplex(system, [0.5 + 0.5j])

    def test_demo_style_mixed_system(self):
        system = parse_system(
            "vars: x y\nx^2 + y^2 - 4\nx*y - 1\n"
        )
        zeros = solve_all(system, TrackerConfig.from_seed(0))
        flags = [iscomplex(system, z.point) for z in zeros]
        assert sum(flags) == 0  # all four intersections are real


class TestKantorovichData:
    def test_frozen(self):
        system = parse_system("vars: x\nx^2 - 2\n")
        data = init_width(system, [1.4])
        assert isinstance(data, KantorovichData)
        with pytest.raises(AttributeError):
            data.radius = 0.0
