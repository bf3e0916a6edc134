"""Effective multiplier chain built from derivatives of one component.

Instead of closing radicals step by step, this variant selects the component
of f with the smallest vanishing order tau along the vertical curve (0, t)
and differentiates it in w until a unit appears.  Each derivative halves the
certified order, so the run always ends after tau steps with order
2^(-(tau+1)), at the price of requiring the comparison hypothesis between
f and g to hold near the origin.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .polyring import Curve, Poly, canonical_str, substitute_curve
from .domain import DomainSpec
from .kohn import KohnResult, Outcome


class EffectiveError(RuntimeError):
    """Base class for failures of the effective procedure."""


class InfiniteTypeError(EffectiveError):
    """Every component vanishes identically along the vertical curve."""


class HypothesisFailedError(EffectiveError):
    """The comparison hypothesis failed and --force was not given."""


class HypoStatus(enum.Enum):
    VERIFIED = "verified"
    ASSERTED = "asserted"
    FAILED = "failed"


@dataclass(frozen=True)
class ZetaStep:
    index: int
    poly: Poly
    order: Fraction


@dataclass(frozen=True)
class EffectiveResult:
    component_index: int
    tau: int
    multiple_minima: bool
    chain: tuple[ZetaStep, ...]
    final_order: Fraction
    hypothesis: HypoStatus
    sound: bool

    def summary(self) -> str:
        tag = "" if self.sound else " (UNSOUND: hypothesis failed, forced)"
        return (
            f"unit found, component {self.component_index}, tau {self.tau}, "
            f"order {self.final_order}{tag}"
        )


def select_component(spec: DomainSpec) -> tuple[int, int, bool]:
    """Index and vanishing order of the best component, with a tie flag.

    The vanishing order of f_j(0, t) at t = 0 is computed for every
    component; the smallest order tau wins and ties go to the smallest
    index.  A flag reports whether the minimum was attained more than once,
    since then the selection is a genuine choice.
    """
    vertical = Curve.vertical()
    orders = []
    for component in spec.f:
        pullback = substitute_curve(component, vertical)
        orders.append(None if pullback.is_zero() else pullback.vanishing_order())
    finite = [o for o in orders if o is not None]
    if not finite:
        raise InfiniteTypeError(
            "every component of f vanishes identically along (0, t); "
            "the origin has infinite type in the vertical direction"
        )
    tau = min(finite)
    index = orders.index(tau)
    multiple = sum(1 for o in orders if o == tau) > 1
    return index, int(tau), multiple


def zeta_chain(
    spec: DomainSpec,
    hypothesis: HypoStatus,
    force: bool = False,
) -> EffectiveResult:
    """Differentiate the selected component until a unit appears.

    zeta_1 = d/dw of the component carries order 1/4 and every further
    derivative halves the order; after tau steps the chain must reach a
    nonvanishing constant, anything else indicates the selection was
    inconsistent.  With a failed hypothesis the run refuses unless force is
    set, in which case the result is labeled unsound.
    """
    if hypothesis is HypoStatus.FAILED and not force:
        raise HypothesisFailedError(
            "comparison hypothesis failed on samples; pass force to run anyway "
            "(the certified order would be unsound)"
        )
    index, tau, multiple = select_component(spec)
    component = spec.f[index]
    chain: list[ZetaStep] = []
    zeta = component
    for j in range(1, tau + 1):
        zeta = zeta.wirtinger("w")
        chain.append(ZetaStep(index=j, poly=zeta, order=Fraction(1, 2 ** (j + 1))))
    last = chain[-1].poly
    if last.constant_term().is_zero():
        raise EffectiveError(
            f"internal inconsistency: zeta_{tau} = {canonical_str(last)} is not a "
            f"unit although component {index} vanishes to order {tau} along (0, t)"
        )
    return EffectiveResult(
        component_index=index,
        tau=tau,
        multiple_minima=multiple,
        chain=tuple(chain),
        final_order=Fraction(1, 2 ** (tau + 1)),
        hypothesis=hypothesis,
        sound=hypothesis is not HypoStatus.FAILED,
    )


def compare_orders(
    spec: DomainSpec,
    classic: Optional[KohnResult],
    effective: Optional[EffectiveResult],
) -> dict:
    """Side-by-side orders: type, the optimal bound 1/type, both runs."""
    _, tau, _ = select_component(spec)
    row = {
        "type": 2 * tau,
        "optimal": Fraction(1, 2 * tau),
        "classic": classic.final_order
        if classic is not None and classic.outcome is Outcome.SUCCESS
        else None,
        "effective": effective.final_order if effective is not None else None,
    }
    return row
