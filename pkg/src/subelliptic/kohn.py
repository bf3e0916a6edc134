"""Exact multiplier-ideal chain computation on model domains.

Starting from the defining function r (order 1) and the Levi determinant
lambda (order 1/2), the chain alternates two moves:

  * a radical step that closes the current ideal under sound real-radical
    certificates, each new multiplier inheriting an order of subellipticity
    from its certificate rule, and
  * a row step that applies the tangential field L (plus the d/dw shortcut
    when r_w already belongs to the ideal), children inheriting half of the
    parent order.

The run succeeds at the step where the ideal contains a unit; the order of
subellipticity certified by the run is the minimum order in the multiplier
ledger at that point.  Every move is recorded in a serializable trace that
can be replayed bit-for-bit and audited rule by rule.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .polyring import Poly, canonical_str
from .localideal import (
    DEFAULT_ORDER_CAP,
    DEFAULT_STEP_BUDGET,
    LocalIdeal,
    Membership,
    monic_key,
    radical_extend,
)
from .domain import DomainSpec, expand_r, apply_L


class KohnError(RuntimeError):
    """Raised when a run reaches an internally inconsistent state."""


class Outcome(enum.Enum):
    SUCCESS = "success"
    STALLED = "stalled"


@dataclass(frozen=True)
class Multiplier:
    """A subelliptic multiplier with its certified order and derivation."""

    poly: Poly
    order: Fraction
    provenance: str


@dataclass
class KohnResult:
    outcome: Outcome
    steps_used: int
    final_order: Optional[Fraction]
    max_radical_order: int
    multipliers: dict[str, Multiplier]
    unit_witness: Optional[str]
    reason: str
    events: list[dict]

    def summary(self) -> str:
        if self.outcome is Outcome.SUCCESS:
            return (
                f"unit found, step {self.steps_used}, order {self.final_order}, "
                f"max radical order {self.max_radical_order}"
            )
        return f"stalled after {self.steps_used} steps ({self.reason})"


def _unit_generator(ideal: LocalIdeal) -> Optional[Poly]:
    for g in ideal.generators:
        if not g.constant_term().is_zero():
            return g
    return None


class _Ledger:
    """Multiplier registry keyed by scalar-normalized canonical form."""

    def __init__(self):
        self.entries: dict[str, Multiplier] = {}

    def add(self, poly: Poly, order: Fraction, provenance: str) -> Multiplier:
        key = monic_key(poly)
        existing = self.entries.get(key)
        if existing is not None and existing.order >= order:
            return existing
        entry = Multiplier(poly=poly, order=Fraction(order), provenance=provenance)
        self.entries[key] = entry
        return entry

    def order_of(self, poly: Poly) -> Fraction:
        key = monic_key(poly)
        if key not in self.entries:
            raise KohnError(f"no ledger entry for {canonical_str(poly)}")
        return self.entries[key].order

    def min_order(self) -> Fraction:
        return min(entry.order for entry in self.entries.values())


def _cert_event(cert, multiplier_order: Fraction) -> dict:
    return {
        "element": canonical_str(cert.element),
        "order": cert.order,
        "rule": cert.rule,
        "witness": cert.witness,
        "source": canonical_str(cert.source) if cert.source is not None else None,
        "multiplier_order": str(multiplier_order),
        "probe_ideal": list(cert.probe_ideal) if cert.probe_ideal is not None else None,
        "probe_log": [list(entry) for entry in cert.probe_log]
        if cert.probe_log is not None
        else None,
    }


def run_kohn(
    spec: DomainSpec,
    max_steps: int = 16,
    radical_cap: int = DEFAULT_ORDER_CAP,
    power_candidates: Sequence[Poly] = (),
    step_budget: int = DEFAULT_STEP_BUDGET,
    probe_budget: int = 20_000,
) -> KohnResult:
    """Run the multiplier chain on spec until a unit appears or it stalls."""
    data = expand_r(spec)
    ledger = _Ledger()
    ledger.add(data.r, Fraction(1), "defining function")
    ledger.add(data.lam, Fraction(1, 2), "Levi determinant")
    events: list[dict] = [
        {
            "kind": "init",
            "step": 0,
            "domain": spec.name,
            "r": canonical_str(data.r),
            "lambda": canonical_str(data.lam),
        }
    ]
    max_radical_order = 0
    saw_undecided = False

    current = LocalIdeal([data.r, data.lam], step_budget=step_budget)

    def finish_success(step: int, witness: Poly) -> KohnResult:
        order = ledger.min_order()
        events.append(
            {
                "kind": "outcome",
                "outcome": "success",
                "step": step,
                "order": str(order),
                "max_radical_order": max_radical_order,
                "witness": canonical_str(witness),
            }
        )
        return KohnResult(
            outcome=Outcome.SUCCESS,
            steps_used=step,
            final_order=order,
            max_radical_order=max_radical_order,
            multipliers=dict(ledger.entries),
            unit_witness=canonical_str(witness),
            reason="unit found",
            events=events,
        )

    def check_unit(step: int, stage: str, ideal: LocalIdeal) -> Optional[Poly]:
        witness = _unit_generator(ideal)
        events.append(
            {
                "kind": "unit-check",
                "step": step,
                "stage": stage,
                "found": witness is not None,
                "witness": canonical_str(witness) if witness is not None else None,
            }
        )
        return witness

    witness = check_unit(1, "pre-loop", current)
    if witness is not None:
        return finish_success(1, witness)

    for step in range(1, max_steps + 1):
        # -- radical step: entry orders are frozen before any commit
        epsilon = min(ledger.order_of(g) for g in current.generators)
        certificates = radical_extend(
            current,
            order_cap=radical_cap,
            power_candidates=power_candidates,
            step_budget=step_budget,
            probe_budget=probe_budget,
        )
        cert_events = []
        for cert in certificates:
            if cert.rule in ("conjugation", "hermitian-square"):
                multiplier_order = ledger.order_of(cert.source) / cert.order
            else:
                multiplier_order = epsilon / cert.order
            ledger.add(
                cert.element,
                multiplier_order,
                f"{cert.rule} certificate of order {cert.order} at step {step}",
            )
            max_radical_order = max(max_radical_order, cert.order)
            if cert.probe_log is not None and any(
                status == "undecided" for _, status in cert.probe_log
            ):
                saw_undecided = True
            cert_events.append(_cert_event(cert, multiplier_order))
        events.append(
            {
                "kind": "radical",
                "step": step,
                "epsilon": str(epsilon),
                "certificates": cert_events,
            }
        )
        if certificates:
            current = current.with_extra([c.element for c in certificates])
        if current.basis is None:
            saw_undecided = True

        witness = check_unit(step, "after-radical", current)
        if witness is not None:
            return finish_success(step, witness)

        # -- row step: L(h) for every known multiplier, plus the d/dw
        #    shortcut when r_w itself already lies inside.  Under the
        #    shortcut, L(h) = r_z*h_w - r_w*h_z generates the same ideal
        #    as h_w alone, so the trace records it as subsumed and only
        #    h_w enters the pool; a subsumed child never carries its own
        #    ledger entry.
        shortcut = current.membership(data.r_w) is Membership.YES
        child_events = []
        kept: list[Poly] = []
        kept_keys: set[str] = set()
        for parent in current.generators:
            parent_order = ledger.order_of(parent)
            child_order = parent_order / 2
            moves = [("L", apply_L(parent, data))]
            if shortcut:
                moves.append(("dw", parent.wirtinger("w")))
            for via, child in moves:
                record = {
                    "parent": canonical_str(parent),
                    "via": via,
                    "child": None,
                    "status": "zero",
                    "order": None,
                }
                if not child.is_zero():
                    record["child"] = canonical_str(child)
                    if via == "L" and shortcut:
                        record["status"] = "subsumed"
                        record["order"] = str(child_order)
                        child_events.append(record)
                        continue
                    answer = current.membership(child)
                    if answer is Membership.YES:
                        record["status"] = "absorbed"
                    else:
                        if answer is Membership.UNDECIDED:
                            saw_undecided = True
                        key = monic_key(child)
                        ledger.add(
                            child,
                            child_order,
                            f"row child via {via} of {canonical_str(parent)} at step {step}",
                        )
                        record["status"] = (
                            "kept" if answer is Membership.NO else "kept-unverified"
                        )
                        record["order"] = str(ledger.order_of(child))
                        if key not in kept_keys:
                            kept_keys.add(key)
                            kept.append(child)
                child_events.append(record)
        events.append(
            {
                "kind": "row",
                "step": step,
                "h_w_shortcut": shortcut,
                "children": child_events,
            }
        )
        if kept:
            current = current.with_extra(kept)

        witness = check_unit(step, "after-row", current)
        if witness is not None:
            return finish_success(step, witness)

        if not certificates and not kept:
            reason = "ideal chain reached a fixpoint without a unit"
            if saw_undecided:
                reason += "; some memberships were undecided under the budget"
            events.append(
                {
                    "kind": "outcome",
                    "outcome": "stalled",
                    "step": step,
                    "reason": reason,
                }
            )
            return KohnResult(
                outcome=Outcome.STALLED,
                steps_used=step,
                final_order=None,
                max_radical_order=max_radical_order,
                multipliers=dict(ledger.entries),
                unit_witness=None,
                reason=reason,
                events=events,
            )

    reason = f"no unit within {max_steps} steps"
    if saw_undecided:
        reason += "; some memberships were undecided under the budget"
    events.append(
        {"kind": "outcome", "outcome": "stalled", "step": max_steps, "reason": reason}
    )
    return KohnResult(
        outcome=Outcome.STALLED,
        steps_used=max_steps,
        final_order=None,
        max_radical_order=max_radical_order,
        multipliers=dict(ledger.entries),
        unit_witness=None,
        reason=reason,
        events=events,
    )


def serialize_trace(result: KohnResult) -> str:
    """Canonical JSON for the run trace; equal runs serialize identically."""
    return json.dumps(result.events, sort_keys=True, indent=2)


def replay_matches(spec: DomainSpec, result: KohnResult, **kwargs) -> bool:
    """Re-run the algorithm and compare traces byte for byte."""
    again = run_kohn(spec, **kwargs)
    return serialize_trace(again) == serialize_trace(result)


def report_radical_orders(result: KohnResult) -> list[dict]:
    """Per-step radical summary with the algebraic floor per root variable.

    Each entry reports the largest certificate order used at that step and,
    for every variable extracted by a monomial-root certificate, the power
    that was actually needed (its probe log shows every smaller power
    failing).  Runs that never needed a radical step (for example when the
    Levi determinant is already a unit) report an empty list.
    """
    report = []
    for event in result.events:
        if event["kind"] != "radical" or not event["certificates"]:
            continue
        max_order = 0
        floors: dict[str, int] = {}
        for cert in event["certificates"]:
            max_order = max(max_order, cert["order"])
            if cert["rule"] == "monomial-root":
                floors[cert["element"]] = cert["order"]
        report.append(
            {
                "step": event["step"],
                "max_order": max_order,
                "algebraic_floor": floors,
            }
        )
    return report


def audit_trace(result: KohnResult) -> list[str]:
    """Check every recorded order against the rule that produced it.

    Returns human-readable violations; an empty list means the ledger
    arithmetic in the trace is internally consistent.
    """
    problems: list[str] = []
    orders: dict[str, Fraction] = {}
    for event in result.events:
        if event["kind"] == "init":
            orders[event["r"]] = Fraction(1)
            orders[event["lambda"]] = Fraction(1, 2)
        elif event["kind"] == "radical":
            epsilon = Fraction(event["epsilon"])
            for cert in event["certificates"]:
                claimed = Fraction(cert["multiplier_order"])
                if cert["rule"] in ("conjugation", "hermitian-square"):
                    source = cert["source"]
                    if source is None or source not in orders:
                        problems.append(
                            f"certificate for {cert['element']} cites an unknown "
                            f"source {source}"
                        )
                        continue
                    expected = orders[source] / cert["order"]
                else:
                    expected = epsilon / cert["order"]
                if claimed != expected:
                    problems.append(
                        f"{cert['rule']} certificate for {cert['element']}: claimed "
                        f"order {claimed}, rule gives {expected}"
                    )
                previous = orders.get(cert["element"])
                if previous is None or claimed > previous:
                    orders[cert["element"]] = claimed
        elif event["kind"] == "row":
            for child in event["children"]:
                if child["status"] not in ("kept", "kept-unverified", "subsumed"):
                    continue
                parent_order = orders.get(child["parent"])
                if parent_order is None:
                    problems.append(
                        f"row child {child['child']} cites an unknown parent "
                        f"{child['parent']}"
                    )
                    continue
                claimed = Fraction(child["order"])
                expected = parent_order / 2
                if child["status"] == "subsumed":
                    if claimed != expected:
                        problems.append(
                            f"subsumed row child {child['child']}: claimed order "
                            f"{claimed}, rule gives {expected}"
                        )
                    continue
                if claimed < expected:
                    problems.append(
                        f"row child {child['child']}: claimed order {claimed} "
                        f"is below the inherited {expected}"
                    )
                previous = orders.get(child["child"])
                if previous is None or claimed > previous:
                    orders[child["child"]] = claimed
    return problems
