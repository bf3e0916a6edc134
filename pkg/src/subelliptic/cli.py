"""Command line front end: spec files in, certified orders and checks out.

A spec file is a JSON object carrying the holomorphic data of one model
domain near the origin of C^2:

    {
      "name": "cross-power(3,2,5)",
      "f": ["w^3 + z^5*w^2"],
      "g": [],
      "sample_radius": 0.1
    }

Component strings use the variables z and w only; conjugates never appear
in input because the defining function builds them internally.  Instead of
an explicit list "f" the file may carry {"params": {"tau": 3, "l": 2,
"k": 5}}, which expands to the single component w^tau + z^k*w^l before
anything else runs.  Exponents outside the window k > tau > l > 0 with
tau > 2 are accepted for experimentation but draw a warning, since the
order comparisons are only certified inside it.

Certified orders are printed as exact fractions, never as decimals.  Exit
status is the machine interface: 0 for success, 1 for malformed input,
2 when a run stalls or a check remains undecided, and 3 when the requested
computation is refused because its hypothesis failed on samples.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .polyring import ParseError, canonical_str, parse_poly
from .domain import DomainError, DomainSpec, expand_r, type_lower_bound
from .kohn import KohnError, Outcome, run_kohn
from .effective import (
    HypoStatus,
    HypothesisFailedError,
    InfiniteTypeError,
    compare_orders,
    zeta_chain,
)
from .numcheck import (
    HYPO_GATE,
    BoundarySolveError,
    boundary_pseudoconvexity,
    finite_diff_levi,
    hypothesis_holds,
    polydisc_points,
    sample_hypo,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2
EXIT_REFUSED = 3

DEFAULT_SAMPLE_RADIUS = 0.1
FINITE_DIFF_TOL = 1e-5

_SPEC_KEYS = {"name", "f", "g", "params", "sample_radius"}


class SpecFileError(ValueError):
    """A spec file could not be turned into a domain description."""


def _parse_components(values, label: str) -> tuple:
    if not isinstance(values, list) or not all(isinstance(s, str) for s in values):
        raise SpecFileError(f"'{label}' must be a list of polynomial strings")
    components = []
    for idx, text in enumerate(values):
        try:
            components.append(parse_poly(text))
        except ParseError as exc:
            raise SpecFileError(f"{label}[{idx}]: {exc}") from None
    return tuple(components)


def _expand_family(params) -> tuple[str, dict]:
    """Turn {"tau", "l", "k"} into the component string w^tau + z^k*w^l."""
    if not isinstance(params, dict):
        raise SpecFileError("'params' must be an object with tau, l and k")
    extra = set(params) - {"tau", "l", "k"}
    if extra:
        raise SpecFileError(f"unknown family parameters: {', '.join(sorted(extra))}")
    try:
        tau, l, k = (int(params[key]) for key in ("tau", "l", "k"))
    except (KeyError, TypeError, ValueError):
        raise SpecFileError("'params' needs integer entries tau, l and k") from None
    if tau < 1 or k < 1 or l < 0:
        raise SpecFileError(
            f"family exponents out of range: tau={tau}, l={l}, k={k} "
            "(need tau >= 1, k >= 1, l >= 0)"
        )
    if not (k > tau > l > 0 and tau > 2):
        print(
            f"warning: parameters tau={tau}, l={l}, k={k} leave the window "
            "k > tau > l > 0, tau > 2; order comparisons are not certified here",
            file=sys.stderr,
        )
    text = f"w^{tau} + z^{k}" if l == 0 else f"w^{tau} + z^{k}*w^{l}"
    return text, {"tau": tau, "l": l, "k": k}


def spec_from_dict(data, default_name: str = "spec") -> DomainSpec:
    """Validate a decoded spec document and build the DomainSpec."""
    if not isinstance(data, dict):
        raise SpecFileError("spec file must hold a JSON object")
    unknown = set(data) - _SPEC_KEYS
    if unknown:
        raise SpecFileError(f"unknown spec keys: {', '.join(sorted(unknown))}")
    name = data.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise SpecFileError("'name' must be a nonempty string")
    params = None
    if "params" in data:
        if "f" in data:
            raise SpecFileError("give either 'f' or family 'params', not both")
        text, params = _expand_family(data["params"])
        f = (parse_poly(text),)
    elif "f" in data:
        f = _parse_components(data["f"], "f")
        if not f:
            raise SpecFileError("'f' must name at least one component")
    else:
        raise SpecFileError("spec needs 'f' components or family 'params'")
    g = _parse_components(data.get("g", []), "g")
    radius = data.get("sample_radius", DEFAULT_SAMPLE_RADIUS)
    if isinstance(radius, bool) or not isinstance(radius, (int, float)):
        raise SpecFileError("'sample_radius' must be a positive number")
    try:
        return DomainSpec(
            name=name, f=f, g=g, params=params, sample_radius=float(radius)
        )
    except (DomainError, ValueError) as exc:
        raise SpecFileError(str(exc)) from None


def load_spec(path: str) -> DomainSpec:
    """Read and validate a JSON spec file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: invalid JSON: {exc}") from None
    return spec_from_dict(data, default_name=Path(path).stem)


def spec_echo(spec: DomainSpec) -> dict:
    return {
        "name": spec.name,
        "f": [canonical_str(p) for p in spec.f],
        "g": [canonical_str(p) for p in spec.g],
        "params": spec.params,
        "sample_radius": spec.sample_radius,
    }


def trace_schema() -> dict:
    """The published schema for the kohn trace artifact."""
    text = resources.files("subelliptic").joinpath("trace_schema.json").read_text()
    return json.loads(text)


def _config_echo(args: argparse.Namespace) -> dict:
    config = {"command": args.command}
    for key in (
        "max_steps",
        "radical_cap",
        "curve_degree_cap",
        "samples",
        "seed",
        "radius",
        "assert_hypo",
        "force",
    ):
        if hasattr(args, key):
            config[key] = getattr(args, key)
    return config


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _float_text(value) -> str:
    if value is None:
        return "n/a"
    if math.isinf(value):
        return "infinity"
    return f"{value:.10g}"


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def _flatten_certificates(events) -> list[dict]:
    """Radical certificates from every step, tagged with their step index."""
    certs = []
    for event in events:
        if event.get("kind") != "radical":
            continue
        for cert in event.get("certificates", ()):
            entry = dict(cert)
            entry["step"] = event["step"]
            certs.append(entry)
    return certs


def _hypothesis_status(spec: DomainSpec, args) -> tuple[HypoStatus, Optional[object]]:
    """Sample the comparison hypothesis, or take it on faith with the flag."""
    if args.assert_hypo:
        print("hypothesis asserted by flag, sampling skipped")
        return HypoStatus.ASSERTED, None
    report = sample_hypo(spec, radius=args.radius, n=args.samples, seed=args.seed)
    holds = hypothesis_holds(report)
    verdict = "verified" if holds else "failed"
    print(
        f"hypothesis {verdict} on {report.n_samples} samples: "
        f"delta_hat = {_float_text(report.delta_hat)} (gate {HYPO_GATE})"
    )
    return (HypoStatus.VERIFIED if holds else HypoStatus.FAILED), report


def cmd_levi(spec: DomainSpec, args) -> int:
    lam = canonical_str(expand_r(spec).lam)
    print(lam)
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "lambda": lam,
                "summary": lam,
            },
        )
    return EXIT_OK


def cmd_type(spec: DomainSpec, args) -> int:
    bound = type_lower_bound(spec, degree_cap=args.curve_degree_cap)
    value = "infinity" if math.isinf(bound.value) else str(bound.value)
    line = f"type >= {value} (witness {bound.witness})"
    print(line)
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "type": {"value": value, "witness": str(bound.witness)},
                "summary": line,
            },
        )
    return EXIT_OK


def cmd_kohn(spec: DomainSpec, args) -> int:
    result = run_kohn(spec, max_steps=args.max_steps, radical_cap=args.radical_cap)
    print(result.summary())
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "events": list(result.events),
                "certificates": _flatten_certificates(result.events),
                "summary": result.summary(),
            },
        )
    return EXIT_OK if result.outcome is Outcome.SUCCESS else EXIT_UNDECIDED


def cmd_effective(spec: DomainSpec, args) -> int:
    status, report = _hypothesis_status(spec, args)
    try:
        result = zeta_chain(spec, status, force=args.force)
    except HypothesisFailedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    print(result.summary())
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "hypothesis": status.name.lower(),
                "delta_hat": None if report is None else report.as_dict()["delta_hat"],
                "chain": [
                    {"index": step.index, "poly": canonical_str(step.poly), "order": str(step.order)}
                    for step in result.chain
                ],
                "final_order": str(result.final_order),
                "sound": result.sound,
                "summary": result.summary(),
            },
        )
    return EXIT_OK


def cmd_check_hypo(spec: DomainSpec, args) -> int:
    report = sample_hypo(spec, radius=args.radius, n=args.samples, seed=args.seed)
    holds = hypothesis_holds(report)
    print(
        f"delta_hat = {_float_text(report.delta_hat)} over {report.n_samples} "
        f"samples (radius {_float_text(report.radius)}, seed {report.seed})"
    )
    if report.degenerate:
        print(f"degenerate points skipped: {report.degenerate}")
    print(f"hypothesis {'holds' if holds else 'fails'} (gate {HYPO_GATE})")
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "report": report.as_dict(),
                "summary": f"hypothesis {'holds' if holds else 'fails'}",
            },
        )
    return EXIT_OK if holds else EXIT_REFUSED


def cmd_verify(spec: DomainSpec, args) -> int:
    radius = args.radius if args.radius is not None else spec.sample_radius
    points = polydisc_points(radius, args.samples, args.seed)
    worst = finite_diff_levi(spec, points)
    print(
        f"finite difference check: max relative deviation {worst:.3e} "
        f"over {len(points)} points"
    )
    boundary = boundary_pseudoconvexity(
        spec, radius=args.radius, n=args.samples, seed=args.seed
    )
    print(f"boundary Levi minimum: {_float_text(boundary.min_lambda_on_boundary)}")
    problems = []
    if worst > FINITE_DIFF_TOL:
        problems.append(f"finite difference deviation above {FINITE_DIFF_TOL}")
    if boundary.violations:
        problems.append(
            f"pseudoconvexity violated on {len(boundary.violations)} boundary samples"
        )
    for line in problems:
        print(f"undecided: {line}", file=sys.stderr)
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "finite_diff_error": worst,
                "boundary": boundary.as_dict(),
                "summary": "checks passed" if not problems else "; ".join(problems),
            },
        )
    return EXIT_OK if not problems else EXIT_UNDECIDED


def cmd_compare(spec: DomainSpec, args) -> int:
    classic = run_kohn(spec, max_steps=args.max_steps, radical_cap=args.radical_cap)
    status, _ = _hypothesis_status(spec, args)
    effective = None
    note = None
    try:
        effective = zeta_chain(spec, status, force=args.force)
    except HypothesisFailedError:
        note = "effective run refused (hypothesis failed); pass --force to include it"
    row = compare_orders(spec, classic, effective)
    for label, key in (
        ("type", "type"),
        ("optimal order", "optimal"),
        ("classic order", "classic"),
        ("effective order", "effective"),
    ):
        print(f"{label:<16} {_cell(row[key])}")
    if note:
        print(note, file=sys.stderr)
    if args.json:
        _write_json(
            args.json,
            {
                "config": _config_echo(args),
                "spec": spec_echo(spec),
                "table": {key: _cell(value) for key, value in row.items()},
                "summary": f"classic {_cell(row['classic'])} vs "
                f"effective {_cell(row['effective'])}",
            },
        )
    return EXIT_OK


def _add_sampling_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--samples", type=int, default=1000, help="number of sample points"
    )
    parser.add_argument("--seed", type=int, default=42, help="sampling seed")
    parser.add_argument(
        "--radius",
        type=float,
        default=None,
        help="polydisc radius (defaults to the spec's sample_radius)",
    )


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--max-steps", type=int, default=16, help="step budget for the chain"
    )
    parser.add_argument(
        "--radical-cap", type=int, default=32, help="largest root power probed"
    )


def _add_hypo_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--assert-hypo",
        action="store_true",
        help="skip sampling and take the comparison hypothesis on faith",
    )
    parser.add_argument(
        "--force",
        action="store_true",
        help="run even when the hypothesis failed (result marked unsound)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subelliptic",
        description="Exact subellipticity certificates for model domains in C^2.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, help_text: str, func) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("spec", help="path to a JSON spec file")
        p.add_argument(
            "--json",
            metavar="PATH",
            default=None,
            help="also write a machine readable trace to PATH",
        )
        p.set_defaults(func=func)
        return p

    add("levi", "print the Levi determinant along the complex tangent", cmd_levi)

    p_type = add("type", "lower bound for the type at the origin", cmd_type)
    p_type.add_argument(
        "--curve-degree-cap", type=int, default=8, help="largest test curve degree"
    )

    p_kohn = add("kohn", "run the multiplier ideal chain to a unit", cmd_kohn)
    _add_run_flags(p_kohn)

    p_eff = add(
        "effective", "run the derivative chain on the selected component", cmd_effective
    )
    _add_sampling_flags(p_eff)
    _add_hypo_flags(p_eff)

    p_chk = add("check-hypo", "sample the comparison hypothesis", cmd_check_hypo)
    _add_sampling_flags(p_chk)

    p_ver = add("verify", "numerical cross checks of the symbolic data", cmd_verify)
    _add_sampling_flags(p_ver)

    p_cmp = add(
        "compare", "table of type, optimal, classic and effective orders", cmd_compare
    )
    _add_run_flags(p_cmp)
    _add_sampling_flags(p_cmp)
    _add_hypo_flags(p_cmp)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
    except SpecFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(spec, args)
    except BoundarySolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KohnError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except InfiniteTypeError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (DomainError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
