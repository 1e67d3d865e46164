"""End-to-end isolation pipeline: filtering, disjointness, narrowing."""
import math

import numpy as np
import pytest

from isolat.homotopy import ApproxZero, TrackerConfig, solve_all
from isolat.interval import Box, Interval
from isolat.isolate import (
    IsolationReport,
    disjoint_process,
    narrowing,
    real_root_isolate,
)
from isolat.krawczyk import BisectionBudget, VerifyStatus, krawczyk_verify
from isolat.parser import parse_system


SQRT2 = math.sqrt(2)


def _sys(text):
    return parse_system(text)


class TestRealRootIsolate:
    def test_sqrt2_end_to_end(self):
        system = _sys("vars: x\nx^2 - 2\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        assert report.nreal == 2 == len(report.certificates)
        assert report.total_candidates == 2
        assert report.rejected_nonreal == 0
        values = sorted(c.box[0].mid for c in report.certificates)
        assert values[0] == pytest.approx(-SQRT2, abs=1e-9)
        assert values[1] == pytest.approx(SQRT2, abs=1e-9)
        for cert in report.certificates:
            assert all(iv.rad <= report.tau for iv in cert.box)
            assert cert.tolerance_met

    def test_complex_candidates_rejected(self):
        system = _sys("vars: x\nx^2 + 1\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        assert report.nreal == 0
        assert report.total_candidates == 2
        assert report.rejected_nonreal == 2
        assert not report.unverified

    def test_mixed_real_and_complex(self):
        # x^4 = 1: two real roots, two purely imaginary
        system = _sys("vars: x\nx^4 - 1\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        assert report.total_candidates == 4
        assert report.nreal == 2
        assert report.rejected_nonreal == 2

    def test_boxes_pairwise_disjoint(self):
        system = _sys("vars: x y\nx^2 + y^2 - 4\nx*y - 1\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        assert report.nreal == 4
        boxes = [c.box for c in report.certificates]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                assert boxes[i].intersect(boxes[j]) is None

    def test_duplicate_zeros_collapse_to_one_box(self):
        system = _sys("vars: x\nx^2 - 2\n")
        zero = ApproxZero.for_system(system, [SQRT2 + 0j], path_id=0)
        clone = ApproxZero.for_system(system, [SQRT2 + 1e-13 + 0j], path_id=1)
        report = real_root_isolate(system, zeros=[zero, clone])
        assert report.nreal == 1
        assert report.total_candidates == 2
        assert report.certificates[0].box[0].contains(SQRT2)

    def test_width_respects_coarse_tau(self):
        system = _sys("vars: x\nx^2 - 2\n")
        report = real_root_isolate(
            system, cfg=TrackerConfig.from_seed(0), tau=1e-3
        )
        for cert in report.certificates:
            assert all(iv.rad <= 1e-3 for iv in cert.box)

    def test_filter_off_keeps_certificates_identical(self):
        system = _sys("vars: x\nx^4 - 1\n")
        zeros = solve_all(system, TrackerConfig.from_seed(0))
        with_filter = real_root_isolate(system, zeros=zeros)
        without = real_root_isolate(system, zeros=zeros, complex_filter=False)
        assert without.rejected_nonreal == 0
        a = [(iv.lo, iv.hi) for c in with_filter.certificates for iv in c.box]
        b = [(iv.lo, iv.hi) for c in without.certificates for iv in c.box]
        assert a == b

    def test_diagnostics_cover_every_candidate(self):
        system = _sys("vars: x\nx^4 - 1\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        assert len(report.diagnostics) == report.total_candidates
        outcomes = {d.outcome for d in report.diagnostics}
        assert "verified" in outcomes and "filtered-nonreal" in outcomes

    def test_timings_present(self):
        system = _sys("vars: x\nx^2 - 2\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        for key in ("homotopy", "certify_verify", "disjoint", "narrowing", "total"):
            assert key in report.timings
            assert report.timings[key] >= 0.0

    def test_invalid_tau_rejected(self):
        system = _sys("vars: x\nx^2 - 2\n")
        with pytest.raises(ValueError):
            real_root_isolate(system, zeros=[], tau=0.0)
        with pytest.raises(ValueError):
            real_root_isolate(system, zeros=[], tau=-1.0)

    def test_unverified_reported_not_dropped(self):
        # a zero far from any root cannot be certified; it must be listed
        system = _sys("vars: x\nx^2 - 2\n")
        bogus = ApproxZero.for_system(system, [0.02 + 0j], path_id=7)
        report = real_root_isolate(system, zeros=[bogus])
        assert report.nreal <= 1
        # either the Newton refinement pulls it to a root, or it is recorded
        assert report.nreal + len(report.unverified) == 1


class TestNarrowing:
    def _certificate(self, system, center, rad):
        result = krawczyk_verify(system, Box.midrad(center, rad))
        assert result.status is VerifyStatus.VERIFIED
        return result.certificates[0]

    def test_narrows_to_target(self):
        system = _sys("vars: x\nx^2 - 2\n")
        cert = self._certificate(system, [1.414], 0.05)
        narrowed, warnings = narrowing(system, [cert], 1e-8)
        assert not warnings
        assert len(narrowed) == 1
        box = narrowed[0].box
        assert box[0].contains(SQRT2)
        assert box[0].rad_outer <= 1e-8

    def test_already_narrow_untouched(self):
        system = _sys("vars: x\nx^2 - 2\n")
        cert = self._certificate(system, [1.4142135623730951], 1e-12)
        narrowed, warnings = narrowing(system, [cert], 1e-10)
        assert narrowed[0].box == cert.box
        assert not warnings

    def test_bad_tau_rejected(self):
        system = _sys("vars: x\nx^2 - 2\n")
        with pytest.raises(ValueError):
            narrowing(system, [], math.nan)

    def test_tolerance_met_flag_survives_replace(self):
        system = _sys("vars: x\nx^2 - 2\n")
        cert = self._certificate(system, [1.414], 0.05)
        narrowed, _ = narrowing(system, [cert], 1e-6)
        assert all(c.tolerance_met for c in narrowed)


class TestDisjointProcess:
    def test_disjoint_inputs_pass_through(self):
        system = _sys("vars: x\nx^2 - 2\n")
        left = krawczyk_verify(system, Box.midrad([-1.414], 0.01)).certificates[0]
        right = krawczyk_verify(system, Box.midrad([1.414], 0.01)).certificates[0]
        kept, warnings = disjoint_process(system, [left, right], BisectionBudget())
        assert len(kept) == 2 and not warnings

    def test_overlapping_same_root_deduplicated(self):
        system = _sys("vars: x\nx^2 - 2\n")
        a = krawczyk_verify(system, Box.midrad([1.414], 0.02)).certificates[0]
        b = krawczyk_verify(system, Box.midrad([1.4145], 0.02)).certificates[0]
        assert a.box.overlaps(b.box)
        kept, warnings = disjoint_process(system, [a, b], BisectionBudget())
        # same root seen twice is deduplicated quietly
        assert len(kept) == 1 and not warnings
        assert kept[0].box[0].contains(SQRT2)

    def test_output_sorted_and_disjoint(self):
        system = _sys("vars: x y\nx^2 + y^2 - 4\nx*y - 1\n")
        report = real_root_isolate(system, cfg=TrackerConfig.from_seed(0))
        lows = [tuple(iv.lo for iv in c.box) for c in report.certificates]
        assert lows == sorted(lows)
