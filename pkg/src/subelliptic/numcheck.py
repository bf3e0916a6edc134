"""Floating-point sampling checks for the analytic side of the engine.

The symbolic chain certifies orders exactly; what it cannot certify is the
pointwise inequalities its hypotheses assert near the origin (domination of
the g-derivatives by the f-derivatives, pseudoconvexity of the boundary,
the Levi lower bound).  This module samples those inequalities on seeded
polydiscs and cross-validates the symbolic Levi determinant against finite
differences.  Reports are deterministic for a fixed seed and never override
a symbolic result; at most they gate whether the effective chain may call
its hypothesis verified.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .domain import DomainSpec, expand_r

DEGENERATE_TOL = 1e-14
FIXED_POINT_TOL = 1e-12
FIXED_POINT_CAP = 100
HYPO_GATE = 0.99


class BoundarySolveError(RuntimeError):
    """The fixed-point solve for the boundary point did not converge."""


@dataclass
class SampleReport:
    """Outcome of one sampling pass; fields unused by a check stay None."""

    radius: float
    n_samples: int
    seed: int
    delta_hat: Optional[float] = None
    c_hat: Optional[float] = None
    min_lambda_on_boundary: Optional[float] = None
    degenerate: int = 0
    violations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        def encode(value):
            if isinstance(value, float) and math.isinf(value):
                return "infinity"
            return value

        return {
            "radius": self.radius,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "delta_hat": encode(self.delta_hat),
            "c_hat": encode(self.c_hat),
            "min_lambda_on_boundary": encode(self.min_lambda_on_boundary),
            "degenerate": self.degenerate,
            "violations": self.violations,
        }


def _disc_point(rng: random.Random, radius: float) -> complex:
    rho = radius * math.sqrt(rng.random())
    angle = 2.0 * math.pi * rng.random()
    return complex(rho * math.cos(angle), rho * math.sin(angle))


def polydisc_points(radius: float, n: int, seed: int) -> list[tuple[complex, complex]]:
    """Uniform points with |z|, |w| <= radius, as one nested seeded stream.

    The first n points for a given seed are a prefix of the first n' > n
    points, so sample statistics are monotone in n.
    """
    rng = random.Random(seed)
    return [(_disc_point(rng, radius), _disc_point(rng, radius)) for _ in range(n)]


def _squared_norm(evaluators: Sequence[Callable], z: complex, w: complex) -> float:
    return sum(abs(h(z, w)) ** 2 for h in evaluators)


def _point_record(z: complex, w: complex, value: float) -> dict:
    return {"z": [z.real, z.imag], "w": [w.real, w.imag], "value": value}


def sample_hypo(
    spec: DomainSpec,
    radius: Optional[float] = None,
    n: int = 1000,
    seed: int = 42,
) -> SampleReport:
    """Estimate the smallest delta with ||g_w||^2 <= delta*||f_w||^2.

    delta_hat is the maximum sampled ratio.  Points where ||f_w||^2 falls
    below the degenerate threshold are counted separately; if g_w does not
    vanish there too, no finite delta works and the ratio is infinite.
    Points whose ratio reaches 1 are reported as violations since the
    hypothesis requires delta < 1.
    """
    radius = spec.sample_radius if radius is None else radius
    f_w = [c.wirtinger("w").compiled() for c in spec.f]
    g_w = [c.wirtinger("w").compiled() for c in spec.g]
    report = SampleReport(radius=radius, n_samples=n, seed=seed, delta_hat=0.0)
    for z, w in polydisc_points(radius, n, seed):
        fw2 = _squared_norm(f_w, z, w)
        gw2 = _squared_norm(g_w, z, w)
        if fw2 < DEGENERATE_TOL:
            report.degenerate += 1
            if gw2 > DEGENERATE_TOL:
                report.delta_hat = math.inf
                report.violations.append(_point_record(z, w, math.inf))
            continue
        ratio = gw2 / fw2
        report.delta_hat = max(report.delta_hat, ratio)
        if ratio >= 1.0:
            report.violations.append(_point_record(z, w, ratio))
    return report


def hypothesis_holds(report: SampleReport) -> bool:
    """Gate used by the effective chain: the sampled delta stays below 0.99."""
    return report.delta_hat is not None and report.delta_hat < HYPO_GATE


def verify_levi_bound(
    spec: DomainSpec,
    radius: Optional[float] = None,
    n: int = 1000,
    seed: int = 42,
) -> SampleReport:
    """Sample the constant in lambda >= c*||f_w||^2 near the origin.

    c_hat is the smallest ratio over non-degenerate samples; any
    non-positive ratio is a violation.  For a single pure-square component
    the ratio is identically 1, which makes this a sharp cross-check of the
    symbolic Levi determinant.
    """
    radius = spec.sample_radius if radius is None else radius
    data = expand_r(spec)
    lam = data.lam.compiled()
    f_w = [c.wirtinger("w").compiled() for c in spec.f]
    report = SampleReport(radius=radius, n_samples=n, seed=seed, c_hat=math.inf)
    for z, w in polydisc_points(radius, n, seed):
        fw2 = _squared_norm(f_w, z, w)
        if fw2 < DEGENERATE_TOL:
            report.degenerate += 1
            continue
        ratio = lam(z, w).real / fw2
        report.c_hat = min(report.c_hat, ratio)
        if ratio <= 0.0:
            report.violations.append(_point_record(z, w, ratio))
    return report


def boundary_pseudoconvexity(
    spec: DomainSpec,
    radius: Optional[float] = None,
    n: int = 200,
    seed: int = 42,
) -> SampleReport:
    """Minimum of lambda over sampled points of the actual boundary.

    For each sampled (w, Im z) the boundary equation r = 0 is solved for
    Re z by fixed-point iteration; since r_z(0) = 1 the map is a
    contraction for small radii.  Failure to converge means the radius is
    too large for the normalization to dominate and is reported as such.
    """
    radius = spec.sample_radius if radius is None else radius
    data = expand_r(spec)
    lam = data.lam.compiled()
    f_ev = [c.compiled() for c in spec.f]
    g_ev = [c.compiled() for c in spec.g]
    rng = random.Random(seed)
    report = SampleReport(
        radius=radius, n_samples=n, seed=seed, min_lambda_on_boundary=math.inf
    )
    for _ in range(n):
        w = _disc_point(rng, radius)
        y = rng.uniform(-radius, radius)
        divergence = BoundarySolveError(
            f"solving 2*Re(z) = -(|f|^2 - |g|^2) did not converge in "
            f"{FIXED_POINT_CAP} iterations at radius {radius}; "
            f"retry with a smaller radius"
        )
        x = 0.0
        for _ in range(FIXED_POINT_CAP):
            z = complex(x, y)
            try:
                target = -0.5 * (
                    _squared_norm(f_ev, z, w) - _squared_norm(g_ev, z, w)
                )
            except OverflowError:
                raise divergence from None
            if not math.isfinite(target):
                raise divergence
            if abs(target - x) < FIXED_POINT_TOL:
                x = target
                break
            x = target
        else:
            raise divergence
        z = complex(x, y)
        value = lam(z, w).real
        report.min_lambda_on_boundary = min(report.min_lambda_on_boundary, value)
        if value < -FIXED_POINT_TOL:
            report.violations.append(_point_record(z, w, value))
    return report


def finite_diff_levi(
    spec: DomainSpec,
    points: Sequence[tuple[complex, complex]],
    h: float = 1e-4,
) -> float:
    """Maximum relative gap between symbolic and finite-difference lambda.

    All second-order Wirtinger derivatives of r are rebuilt from central
    differences in the four real coordinates and assembled into the same
    tangential Hessian pairing the symbolic side uses.  The result is
    max |lam_num - lam_sym| / (1 + |lam_sym|) over the points.
    """
    if not (1e-6 <= h <= 1e-3):
        raise ValueError(f"step h={h} outside the supported range [1e-6, 1e-3]")
    data = expand_r(spec)
    r = data.r.compiled()
    lam = data.lam.compiled()
    worst = 0.0
    for z0, w0 in points:
        numeric = _levi_by_differences(r, z0, w0, h)
        reference = lam(z0, w0).real
        worst = max(worst, abs(numeric - reference) / (1.0 + abs(reference)))
    return worst


def _levi_by_differences(r, z0: complex, w0: complex, h: float) -> float:
    x, y, u, v = z0.real, z0.imag, w0.real, w0.imag

    def at(dx=0.0, dy=0.0, du=0.0, dv=0.0) -> float:
        return r(complex(x + dx, y + dy), complex(u + du, v + dv)).real

    center = at()

    def first(axis: str) -> float:
        return (at(**{axis: h}) - at(**{axis: -h})) / (2.0 * h)

    def pure(axis: str) -> float:
        return (at(**{axis: h}) - 2.0 * center + at(**{axis: -h})) / (h * h)

    def mixed(a: str, b: str) -> float:
        return (
            at(**{a: h, b: h})
            - at(**{a: h, b: -h})
            - at(**{a: -h, b: h})
            + at(**{a: -h, b: -h})
        ) / (4.0 * h * h)

    r_z = 0.5 * complex(first("dx"), -first("dy"))
    r_w = 0.5 * complex(first("du"), -first("dv"))
    r_zzb = 0.25 * (pure("dx") + pure("dy"))
    r_wwb = 0.25 * (pure("du") + pure("dv"))
    r_zwb = 0.25 * complex(
        mixed("dx", "du") + mixed("dy", "dv"),
        mixed("dx", "dv") - mixed("dy", "du"),
    )
    return (
        r_wwb * abs(r_z) ** 2
        + r_zzb * abs(r_w) ** 2
        - 2.0 * (r_zwb * r_w * r_z.conjugate()).real
    )
