"""Ideal membership at the origin and restricted real-radical certificates.

Membership in ideals of germs is decided with a standard basis under a local
term order (anti-graded lex, so the constant monomial is the largest) and
Mora's normal form with the ecart rule.  All computations carry an explicit
reduction-step budget; exhausting it yields an honest "undecided", never a
wrong answer.

The radical machinery implements four sound certificate rules (conjugation,
hermitian squares via an exact rational LDL* decomposition of the Gram
matrix, monomial roots via ascending power probes, and algebraic powers) and
iterates them to a fixpoint.  Certificates record enough context (probe
ideal snapshots, membership logs) for traces to be replayed and audited.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .polyring import (
    GaussRational,
    Mono,
    MONO_ONE,
    Poly,
    canonical_str,
    display_key,
    mono_degree,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)

DEFAULT_STEP_BUDGET = 100_000
DEFAULT_ORDER_CAP = 32

VARIABLES = ("z", "w")


class Membership(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


class BudgetExhausted(Exception):
    """Raised internally when the reduction-step budget runs out."""


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, steps: int):
        self.remaining = steps

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise BudgetExhausted


# ---------------------------------------------------------------------------
# Local term order: lower total degree wins, ties by lex on exponents.


def local_key(m: Mono):
    """Sort key under which the leading monomial is the maximum."""
    return (-mono_degree(m), m)


def leading_term(p: Poly) -> tuple[Mono, GaussRational]:
    m = max(p.terms, key=local_key)
    return m, p.terms[m]


def leading_monomial(p: Poly) -> Mono:
    return max(p.terms, key=local_key)


def ecart(p: Poly) -> int:
    """Total degree minus the degree of the leading monomial."""
    lm = leading_monomial(p)
    return p.total_degree() - mono_degree(lm)


def monic(p: Poly) -> Poly:
    """Scale so the display-leading coefficient is 1 (for keys and bases)."""
    if p.is_zero():
        return p
    lead = min(p.terms, key=display_key)
    return p.scale(GaussRational.one() / p.terms[lead])


def monic_key(p: Poly) -> str:
    """Canonical identifier that ignores nonzero scalar multiples."""
    return canonical_str(monic(p))


# ---------------------------------------------------------------------------
# Mora weak normal form


def _reduce_once(h: Poly, g: Poly) -> Poly:
    """Cancel the leading term of h against g (LM(g) divides LM(h))."""
    mh, ch = leading_term(h)
    mg, cg = leading_term(g)
    quot = Poly.monomial(ch / cg, mono_div(mh, mg))
    return h - quot * g


def nf_mora(f: Poly, basis: Sequence[Poly], budget: _Budget) -> Poly:
    """Weak normal form of f against basis under the local order.

    There is a local unit u with u*f = (combination of basis) + result; the
    result is 0 exactly when f lies in the ideal generated by basis in the
    localized ring.  Intermediate remainders join the reducer set (Mora's
    trick), which guarantees termination despite the local order.
    """
    if f.is_zero():
        return f
    reducers = list(basis)
    h = f
    while not h.is_zero():
        lm_h = leading_monomial(h)
        candidates = [g for g in reducers if mono_divides(leading_monomial(g), lm_h)]
        if not candidates:
            return h
        budget.spend()
        g = min(candidates, key=ecart)
        if ecart(g) > ecart(h):
            reducers.append(h)
        h = _reduce_once(h, g)
    return h


def _spoly(f: Poly, g: Poly) -> Poly:
    mf, cf = leading_term(f)
    mg, cg = leading_term(g)
    gamma = mono_lcm(mf, mg)
    left = Poly.monomial(GaussRational.one() / cf, mono_div(gamma, mf)) * f
    right = Poly.monomial(GaussRational.one() / cg, mono_div(gamma, mg)) * g
    return left - right


def _buchberger(gens: Sequence[Poly], budget: _Budget) -> list[Poly]:
    basis = [p for p in gens if not p.is_zero()]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]

    def pair_key(ij):
        lcm = mono_lcm(leading_monomial(basis[ij[0]]), leading_monomial(basis[ij[1]]))
        return (mono_degree(lcm), lcm)

    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        mi, mj = leading_monomial(basis[i]), leading_monomial(basis[j])
        if mono_lcm(mi, mj) == mono_mul(mi, mj):
            continue  # product criterion: coprime leading monomials
        h = nf_mora(_spoly(basis[i], basis[j]), basis, budget)
        if not h.is_zero():
            basis.append(h)
            pairs.extend((t, len(basis) - 1) for t in range(len(basis) - 1))
    return basis


def _minimalize(basis: list[Poly]) -> list[Poly]:
    # Among elements sharing a leading monomial, prefer the sparsest and
    # lowest-degree representative; tails of the discarded ones carry junk.
    ordered = sorted(
        basis,
        key=lambda p: (
            mono_degree(leading_monomial(p)),
            leading_monomial(p),
            len(p.terms),
            p.total_degree(),
        ),
    )
    kept: list[Poly] = []
    for p in ordered:
        lm = leading_monomial(p)
        if any(mono_divides(leading_monomial(q), lm) for q in kept):
            continue
        kept.append(p)
    return [monic(p) for p in kept]


def _strip_by_monomials(p: Poly, monos: Sequence[Mono], keep_leading: bool) -> Poly:
    """Drop terms divisible by a monomial known to generate part of the ideal.

    Dropping such a term subtracts an exact multiple of a single-term ideal
    element, so the result differs from p by ideal members.  Unlike general
    tail reduction under a local order this always terminates.
    """
    lead = leading_monomial(p) if keep_leading else None
    terms = {
        m: c
        for m, c in p.terms.items()
        if m == lead or not any(mono_divides(mm, m) for mm in monos)
    }
    if len(terms) == len(p.terms):
        return p
    return Poly(terms)


def _tail_strip(basis: list[Poly]) -> list[Poly]:
    """Erase tail terms divisible by single-term basis elements.

    Leading monomials are untouched, so the result is still a standard basis
    of the same ideal; the point is to keep tails from dragging high-degree
    junk into later seeded completions.  Stripping can expose new single-term
    elements, so the pass iterates until the term count stops dropping.
    """
    out = list(basis)
    while True:
        monos = [leading_monomial(g) for g in out if len(g.terms) == 1]
        if not monos:
            return out
        stripped = [
            g if len(g.terms) == 1 else _strip_by_monomials(g, monos, True)
            for g in out
        ]
        if sum(len(g.terms) for g in stripped) == sum(len(g.terms) for g in out):
            return stripped
        out = stripped


# ---------------------------------------------------------------------------
# Local ideals


class LocalIdeal:
    """Finitely generated ideal in the local ring at the origin.

    The standard basis is computed lazily and cached; once computed the
    object is immutable.  A basis of None means the step budget ran out and
    membership queries answer UNDECIDED.
    """

    def __init__(
        self,
        generators: Iterable[Poly],
        step_budget: int = DEFAULT_STEP_BUDGET,
        _seed: Optional[tuple[Poly, ...]] = None,
    ):
        gens: list[Poly] = []
        seen: set[str] = set()
        for p in generators:
            if p.is_zero():
                continue
            key = canonical_str(p)
            if key in seen:
                continue
            seen.add(key)
            gens.append(p)
        self.generators: tuple[Poly, ...] = tuple(gens)
        self.step_budget = step_budget
        self._seed = _seed
        self._basis: Optional[tuple[Poly, ...]] = None
        self._basis_failed = False

    @property
    def basis(self) -> Optional[tuple[Poly, ...]]:
        if self._basis is None and not self._basis_failed:
            start = self.generators if self._seed is None else self._seed
            try:
                computed = _buchberger(start, _Budget(self.step_budget))
                self._basis = tuple(_tail_strip(_minimalize(computed)))
            except BudgetExhausted:
                self._basis_failed = True
        return self._basis

    def membership(self, p: Poly, step_budget: Optional[int] = None) -> Membership:
        basis = self.basis
        if basis is None:
            return Membership.UNDECIDED
        if p.is_zero():
            return Membership.YES
        try:
            nf = nf_mora(p, basis, _Budget(step_budget or self.step_budget))
        except BudgetExhausted:
            return Membership.UNDECIDED
        return Membership.YES if nf.is_zero() else Membership.NO

    def reduce_modulo(self, p: Poly, step_budget: Optional[int] = None) -> Poly:
        """Best-effort reduction: returns p minus ideal elements, never None.

        The leading term is normalized with Mora's form and the tail is
        stripped against single-term basis elements.  On a missing basis or
        an exhausted budget the input (or a partial reduction) comes back
        unchanged, which is always a sound answer.
        """
        basis = self.basis
        if basis is None or p.is_zero():
            return p
        try:
            h = nf_mora(p, basis, _Budget(step_budget or self.step_budget))
        except BudgetExhausted:
            h = p
        if h.is_zero():
            return h
        monos = [leading_monomial(g) for g in basis if len(g.terms) == 1]
        if monos:
            h = _strip_by_monomials(h, monos, False)
        return h

    def is_unit(self) -> Membership:
        # The local ring has a unique maximal ideal, so the ideal is the
        # whole ring exactly when some generator has a nonzero constant term
        # (otherwise every element vanishes at the origin).
        for g in self.generators:
            if not g.constant_term().is_zero():
                return Membership.YES
        return Membership.NO

    def with_extra(self, more: Iterable[Poly]) -> "LocalIdeal":
        """Extend by new generators, reusing the computed basis as a seed.

        Seeding Buchberger with an already-completed basis plus the new
        generators produces a standard basis of the enlarged ideal without
        rediscovering the old reductions.
        """
        more = list(more)
        seed = None
        if self._basis is not None:
            seed = tuple(list(self._basis) + more)
        return LocalIdeal(list(self.generators) + more, self.step_budget, _seed=seed)

    def generator_strings(self) -> tuple[str, ...]:
        return tuple(canonical_str(g) for g in self.generators)

    def __repr__(self) -> str:
        inner = ", ".join(self.generator_strings())
        return f"LocalIdeal({inner})"


def standard_basis(gens: Sequence[Poly], step_budget: int = DEFAULT_STEP_BUDGET) -> LocalIdeal:
    ideal = LocalIdeal(gens, step_budget)
    ideal.basis  # force computation so failures surface immediately
    return ideal


def membership(p: Poly, ideal: LocalIdeal) -> Membership:
    return ideal.membership(p)


def is_unit_ideal(ideal: LocalIdeal) -> Membership:
    return ideal.is_unit()


def min_algebraic_radical_order(g: Poly, ideal: LocalIdeal, cap: int) -> Optional[int]:
    """Smallest m <= cap with g**m in the ideal, or None.

    An undecided membership at some power stops the search for that and all
    larger powers (no certificate is issued on uncertain evidence).
    """
    power = Poly.one()
    for m in range(1, cap + 1):
        power = power * g
        answer = ideal.membership(power)
        if answer is Membership.YES:
            return m
        if answer is Membership.UNDECIDED:
            return None
    return None


# ---------------------------------------------------------------------------
# Hermitian square decomposition (exact rational LDL*)


def _hol_part(m: Mono) -> Mono:
    return (m[0], 0, m[2], 0)


def _antihol_conj(m: Mono) -> Mono:
    return (m[1], 0, m[3], 0)


def hermitian_square_rows(p: Poly) -> Optional[list[tuple[Fraction, Poly]]]:
    """Write p as a positive rational combination of hermitian squares.

    Every monomial z^a zb^b w^c wb^d factors uniquely as a holomorphic
    monomial times the conjugate of one, so a real p determines a unique
    Hermitian Gram matrix over the holomorphic monomials it involves.  The
    decomposition p = sum d_j * row_j * conj(row_j) with d_j > 0 rational
    exists iff that matrix is positive semidefinite, which the pivoted-free
    LDL* factorization decides exactly.  Returns None when p is not real or
    the matrix is not PSD.
    """
    if p.is_zero():
        return []
    if not p.is_conj_symmetric():
        return None
    cols: set[Mono] = set()
    for m in p.terms:
        cols.add(_hol_part(m))
        cols.add(_antihol_conj(m))
    order = sorted(cols, key=display_key)
    n = len(order)
    zero = GaussRational.zero()
    a = [
        [
            p.terms.get((order[s][0], order[t][0], order[s][2], order[t][2]), zero)
            for t in range(n)
        ]
        for s in range(n)
    ]
    rows: list[tuple[Fraction, Poly]] = []
    for j in range(n):
        d = a[j][j]
        if d.im:
            return None
        if d.re < 0:
            return None
        if not d.re:
            if any(not a[i][j].is_zero() for i in range(j + 1, n)):
                return None
            continue
        terms = {order[j]: GaussRational.one()}
        for i in range(j + 1, n):
            coeff = a[i][j] / d
            if not coeff.is_zero():
                terms[order[i]] = coeff
        rows.append((d.re, Poly(terms)))
        for i in range(j + 1, n):
            for t in range(j + 1, n):
                a[i][t] = a[i][t] - (a[i][j] * a[t][j].conj()) / d
    check = Poly.zero()
    for weight, row in rows:
        check = check + (row * row.conj()).scale(GaussRational.of(weight))
    if check != p:
        raise AssertionError("LDL* reconstruction mismatch")
    return rows


# ---------------------------------------------------------------------------
# Radical certificates


@dataclass(frozen=True)
class RadicalCertificate:
    """One sound step of real-radical closure.

    order is the certificate order (the exponent in the defining inequality
    |element|^order <= C * |witness data| near the origin); rule is one of
    conjugation, hermitian-square, monomial-root, algebraic-power.  source
    is the polynomial whose multiplier order the new element inherits from
    (None for rules whose bound runs through the whole ideal).  Probe rules
    keep a snapshot of the ideal they ran against and the per-power
    membership log, so traces can be audited and replayed.
    """

    element: Poly
    order: int
    rule: str
    witness: str
    source: Optional[Poly] = None
    probe_ideal: Optional[tuple[str, ...]] = None
    probe_log: Optional[tuple[tuple[int, str], ...]] = None


def _variable_probe(
    work: LocalIdeal,
    variables: Sequence[str],
    order_cap: int,
    probe_budget: int,
) -> tuple[Optional[int], list[str], dict[str, list[tuple[int, str]]]]:
    """Ascending-power sweep: find the smallest m with v^m in the ideal.

    All variables still uncertified are probed together, power by power, and
    the first power at which any of them succeeds wins; the cohort of
    variables succeeding at that power is returned along with the complete
    membership logs.  Probing cheapest-first keeps certificate orders (and
    hence the order ledger) as strong as the ideal allows.  An undecided
    membership (probe budget exhausted) retires the variable for this sweep;
    no certificate is ever issued on uncertain evidence.
    """
    logs: dict[str, list[tuple[int, str]]] = {v: [] for v in variables}
    powers = {v: Poly.one() for v in variables}
    alive = list(variables)
    for m in range(1, order_cap + 1):
        cohort = []
        for v in list(alive):
            powers[v] = powers[v] * Poly.variable(v)
            answer = work.membership(powers[v], step_budget=probe_budget)
            logs[v].append((m, answer.value))
            if answer is Membership.YES:
                cohort.append(v)
            elif answer is Membership.UNDECIDED:
                alive.remove(v)
        if cohort:
            return m, cohort, logs
        if not alive:
            break
    return None, [], logs


def _rebalance(row: Poly) -> list[tuple[str, Poly, int]]:
    """Factor a hermitian-square row as v^e * q with e >= 2, per variable.

    When |v^e * q|^2 is bounded by a generator, so is |v * q|^(2e) up to a
    constant (the extra factors of q are bounded near the origin), which
    trades a deep monomial factor for a certificate of higher order.
    """
    splits: list[tuple[str, Poly, int]] = []
    a, _, c, _ = row.monomial_content()
    if a >= 2:
        splits.append(("z", row.divide_monomial((a - 1, 0, 0, 0)), a))
    if c >= 2:
        splits.append(("w", row.divide_monomial((0, 0, c - 1, 0)), c))
    return splits


def radical_extend(
    ideal: LocalIdeal,
    order_cap: int = DEFAULT_ORDER_CAP,
    power_candidates: Sequence[Poly] = (),
    step_budget: int = DEFAULT_STEP_BUDGET,
    probe_budget: int = 20_000,
) -> list[RadicalCertificate]:
    """Certified elements of the restricted real radical of the ideal.

    Repeats four rules until nothing new appears: (1) monomial-root probes
    commit the cheapest available variable powers first; (2) conjugates of
    every known element join at order 1 (a conjugate of an ideal element is
    always in the real radical, so no membership pre-check is needed); (3)
    real generators that decompose into hermitian squares contribute their
    rows at order 2 (2e after rebalancing a pure power v^e); (4) explicit
    power candidates g with g(0) = 0 whose smallest power m <= order_cap
    lies in the ideal join at order 2m via Cauchy-Schwarz.  Each variable is
    certified at most once.  Probes run under their own smaller budget so a
    hopeless high-power sweep degrades to an honest "undecided" quickly.
    """
    work: list[Poly] = list(ideal.generators)
    keys: set[str] = {monic_key(p) for p in work}
    certificates: list[RadicalCertificate] = []
    certified_vars: set[str] = set()
    decomposed: set[str] = set()
    used_candidates: set[str] = set()
    current = ideal  # reuse its cached standard basis across commits

    def commit(cert: RadicalCertificate) -> None:
        nonlocal current
        certificates.append(cert)
        work.append(cert.element)
        keys.add(monic_key(cert.element))
        # The element and its reduction differ by members of the current
        # ideal, so either may stand in for the other as a new generator.
        # Committing the smaller of the two keeps standard bases from
        # swallowing high-degree tails; a reduction to zero means the element
        # is already inside and no rebuild is due at all.
        reduced = current.reduce_modulo(cert.element)
        if reduced.is_zero():
            return
        size = lambda p: (len(p.terms), p.total_degree())
        chosen = reduced if size(reduced) < size(cert.element) else cert.element
        current = current.with_extra([monic(chosen)])

    for _ in range(4 * (len(work) + len(VARIABLES) + len(power_candidates)) + 8):
        changed = False

        pending = [
            v for v in VARIABLES
            if v not in certified_vars and monic_key(Poly.variable(v)) not in keys
        ]
        if pending:
            m, cohort, logs = _variable_probe(current, pending, order_cap, probe_budget)
            if m is not None:
                snapshot = current.generator_strings()
                for v in cohort:
                    certified_vars.add(v)
                    commit(RadicalCertificate(
                        element=Poly.variable(v),
                        order=m,
                        rule="monomial-root",
                        witness=f"{v}^{m} reduces to 0 against the ideal; "
                                f"|{v}|^{m} <= C*sum|generators| near 0",
                        probe_ideal=snapshot,
                        probe_log=tuple(logs[v]),
                    ))
                changed = True

        for q in list(work):
            qc = q.conj()
            if qc == q:
                continue
            if monic_key(qc) in keys:
                continue
            commit(RadicalCertificate(
                element=qc,
                order=1,
                rule="conjugation",
                witness="|conjugate(q)| = |q| pointwise",
                source=q,
            ))
            changed = True

        for q in list(work):
            qkey = monic_key(q)
            if qkey in decomposed or not q.is_conj_symmetric():
                continue
            decomposed.add(qkey)
            rows = hermitian_square_rows(q)
            if not rows:
                continue
            for _weight, row in rows:
                if monic_key(row) not in keys:
                    commit(RadicalCertificate(
                        element=row,
                        order=2,
                        rule="hermitian-square",
                        witness="generator is a positive combination of hermitian "
                                "squares including |row|^2, so |row|^2 <= C*generator",
                        source=q,
                    ))
                    changed = True
                for v, reduced, e in _rebalance(row):
                    if monic_key(reduced) in keys:
                        continue
                    commit(RadicalCertificate(
                        element=reduced,
                        order=2 * e,
                        rule="hermitian-square",
                        witness=f"row factors as {v}^{e}*q, and |{v}*q|^{2*e} <= "
                                f"C*|{v}^{e}*q|^2 <= C'*generator near 0",
                        source=q,
                    ))
                    changed = True

        for g in power_candidates:
            gkey = monic_key(g)
            if gkey in keys or gkey in used_candidates:
                continue
            if not g.constant_term().is_zero():
                continue
            if current.membership(g, step_budget=step_budget) is Membership.YES:
                continue
            log: list[tuple[int, str]] = []
            found = None
            power = g
            for m in range(2, order_cap + 1):
                power = power * g
                answer = current.membership(power, step_budget=step_budget)
                log.append((m, answer.value))
                if answer is Membership.YES:
                    found = m
                    break
                if answer is Membership.UNDECIDED:
                    break
            if found is None:
                used_candidates.add(gkey)
                continue
            used_candidates.add(gkey)
            snapshot = current.generator_strings()
            commit(RadicalCertificate(
                element=g,
                order=2 * found,
                rule="algebraic-power",
                witness=f"g^{found} = sum a_i*f_i in the ideal; Cauchy-Schwarz gives "
                        f"|g|^{2*found} <= (sum|a_i|^2)(sum|f_i|^2)",
                probe_ideal=snapshot,
                probe_log=tuple(log),
            ))
            changed = True

        if not changed:
            break

    return certificates
