"""Tests for the sampling verifier and the finite-difference oracle."""

import math

import pytest

from subelliptic.polyring import parse_poly
from subelliptic.domain import (
    DomainSpec,
    flat_domain,
    cross_power_domain,
    borderline_domain,
)
from subelliptic.numcheck import (
    BoundarySolveError,
    SampleReport,
    boundary_pseudoconvexity,
    finite_diff_levi,
    hypothesis_holds,
    polydisc_points,
    sample_hypo,
    verify_levi_bound,
)


def spec_of(f, g=(), name="test"):
    return DomainSpec(
        name=name,
        f=tuple(parse_poly(s) for s in f),
        g=tuple(parse_poly(s) for s in g),
    )


class TestPolydiscPoints:
    def test_points_stay_in_the_polydisc(self):
        for z, w in polydisc_points(0.3, 500, seed=7):
            assert abs(z) <= 0.3 and abs(w) <= 0.3

    def test_stream_is_nested(self):
        short = polydisc_points(0.2, 100, seed=11)
        long = polydisc_points(0.2, 300, seed=11)
        assert long[:100] == short

    def test_seed_determinism(self):
        assert polydisc_points(0.1, 50, seed=3) == polydisc_points(0.1, 50, seed=3)
        assert polydisc_points(0.1, 50, seed=3) != polydisc_points(0.1, 50, seed=4)


class TestSampleHypo:
    def test_empty_g_gives_zero(self):
        report = sample_hypo(flat_domain(), radius=0.3, n=200)
        assert report.delta_hat == 0.0
        assert report.violations == []

    def test_quarter_ratio_domain(self):
        """||f_w||^2 = 1 + |z|^2 and ||g_w||^2 = 1/4, so delta <= 0.25."""
        spec = spec_of(["w", "z*w"], g=["1/2*w"])
        report = sample_hypo(spec, radius=0.3, n=500)
        assert 0.2 < report.delta_hat <= 0.25
        assert hypothesis_holds(report)

    def test_borderline_domain_fails_the_gate(self):
        report = sample_hypo(borderline_domain(), radius=0.01, n=1000, seed=42)
        assert report.delta_hat >= 0.99
        assert not hypothesis_holds(report)

    def test_degenerate_f_with_live_g_is_infinite(self):
        """With f = (z*w) the derivative f_w = z is below the degeneracy
        threshold on the whole radius-1e-9 polydisc while g_w = 1 is not,
        so no finite delta can work."""
        spec = spec_of(["z*w"], g=["w"])
        report = sample_hypo(spec, radius=1e-9, n=50)
        assert report.delta_hat == math.inf
        assert report.degenerate == 50
        assert report.violations

    def test_monotone_in_n(self):
        spec = borderline_domain()
        small = sample_hypo(spec, radius=0.01, n=200, seed=42)
        large = sample_hypo(spec, radius=0.01, n=1000, seed=42)
        assert small.delta_hat <= large.delta_hat

    def test_determinism(self):
        a = sample_hypo(borderline_domain(), radius=0.05, n=300, seed=9)
        b = sample_hypo(borderline_domain(), radius=0.05, n=300, seed=9)
        assert a == b


class TestVerifyLeviBound:
    def test_flat_ratio_is_exactly_one(self):
        report = verify_levi_bound(flat_domain(), radius=0.5, n=500)
        assert report.c_hat == 1.0
        assert report.violations == []

    def test_single_component_identity(self):
        """For one pure square lambda equals ||f_w||^2 as polynomials, so
        the sampled ratio can differ from 1 only by rounding."""
        report = verify_levi_bound(cross_power_domain(3, 2, 5), radius=0.05, n=500)
        assert abs(report.c_hat - 1.0) <= 1e-12

    def test_borderline_stays_nonnegative(self):
        report = verify_levi_bound(borderline_domain(), radius=0.05, n=500)
        assert report.c_hat >= 0.0
        assert report.violations == []


class TestBoundaryPseudoconvexity:
    def test_flat_boundary(self):
        report = boundary_pseudoconvexity(flat_domain(), radius=0.3, n=100)
        assert report.min_lambda_on_boundary == 1.0

    @pytest.mark.parametrize(
        "spec,radius",
        [
            (borderline_domain(), 0.1),
            (cross_power_domain(3, 2, 5), 0.1),
            (cross_power_domain(4, 3, 6), 0.1),
        ],
        ids=["borderline", "325", "436"],
    )
    def test_sampled_boundary_is_pseudoconvex(self, spec, radius):
        report = boundary_pseudoconvexity(spec, radius=radius, n=200, seed=42)
        assert report.min_lambda_on_boundary >= -1e-10
        assert report.violations == []

    def test_divergent_solve_reports_radius(self):
        steep = spec_of(["4*z"])
        with pytest.raises(BoundarySolveError, match="smaller radius"):
            boundary_pseudoconvexity(steep, radius=0.5, n=50)

    def test_determinism(self):
        a = boundary_pseudoconvexity(flat_domain(), radius=0.2, n=50, seed=5)
        b = boundary_pseudoconvexity(flat_domain(), radius=0.2, n=50, seed=5)
        assert a == b


class TestFiniteDifferenceOracle:
    def test_flat_is_machine_precision(self):
        points = polydisc_points(0.5, 20, seed=1)
        assert finite_diff_levi(flat_domain(), points) <= 1e-8

    @pytest.mark.parametrize(
        "spec",
        [
            cross_power_domain(3, 2, 4),
            cross_power_domain(3, 2, 5),
            cross_power_domain(3, 2, 6),
            cross_power_domain(4, 3, 6),
            borderline_domain(),
        ],
        ids=["324", "325", "326", "436", "borderline"],
    )
    def test_symbolic_matches_numeric(self, spec):
        points = polydisc_points(0.5, 100, seed=42)
        assert finite_diff_levi(spec, points, h=1e-4) <= 1e-5

    def test_step_size_is_validated(self):
        points = polydisc_points(0.1, 1, seed=0)
        with pytest.raises(ValueError):
            finite_diff_levi(flat_domain(), points, h=0.01)
        with pytest.raises(ValueError):
            finite_diff_levi(flat_domain(), points, h=1e-9)


class TestReportSerialization:
    def test_infinities_are_encoded(self):
        report = SampleReport(radius=0.1, n_samples=5, seed=1, delta_hat=math.inf)
        encoded = report.as_dict()
        assert encoded["delta_hat"] == "infinity"
        assert encoded["c_hat"] is None

    def test_plain_fields_pass_through(self):
        report = sample_hypo(flat_domain(), radius=0.2, n=10)
        encoded = report.as_dict()
        assert encoded["delta_hat"] == 0.0
        assert encoded["n_samples"] == 10
        assert encoded["seed"] == 42
