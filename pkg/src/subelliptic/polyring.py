"""Exact sparse polynomials in z, zb, w, wb over Gaussian rationals.

The four variables are formally independent; zb and wb play the role of the
complex conjugates of z and w.  A polynomial is "real" precisely when it is
fixed by the conjugation that swaps z with zb and w with wb while conjugating
coefficients.  All arithmetic is exact: coefficients are Gaussian rationals
(pairs of ``fractions.Fraction``), never floats.

Monomials are exponent tuples (a, b, c, d) for z^a zb^b w^c wb^d.  The
canonical display order sorts terms by total degree, lowest first, breaking
ties by exponent tuple with z-major priority, so "3*w^2 + 2*z^5*w" is the
canonical form of 3w^2 + 2z^5w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union


# ---------------------------------------------------------------------------
# Gaussian rationals


@dataclass(frozen=True)
class GaussRational:
    """Exact complex number re + im*i with rational re, im."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re: Union[int, Fraction], im: Union[int, Fraction] = 0) -> "GaussRational":
        return GaussRational(Fraction(re), Fraction(im))

    @staticmethod
    def zero() -> "GaussRational":
        return _GR_ZERO

    @staticmethod
    def one() -> "GaussRational":
        return _GR_ONE

    @staticmethod
    def i_unit() -> "GaussRational":
        return _GR_I

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussRational") -> "GaussRational":
        d = other.abs_sq()
        if not d:
            raise ZeroDivisionError("division by zero GaussRational")
        return GaussRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def scale(self, q: Fraction) -> "GaussRational":
        return GaussRational(self.re * q, self.im * q)

    def __pow__(self, n: int) -> "GaussRational":
        if n < 0:
            raise ValueError("negative power of GaussRational")
        out = _GR_ONE
        base = self
        e = n
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self) -> str:
        return coeff_str(self)


_GR_ZERO = GaussRational(Fraction(0), Fraction(0))
_GR_ONE = GaussRational(Fraction(1), Fraction(0))
_GR_I = GaussRational(Fraction(0), Fraction(1))


def GR(re: Union[int, Fraction], im: Union[int, Fraction] = 0) -> GaussRational:
    """Shorthand constructor used pervasively in tests."""
    return GaussRational(Fraction(re), Fraction(im))


# ---------------------------------------------------------------------------
# Monomials

Mono = tuple  # (a, b, c, d) exponents of z, zb, w, wb

VAR_NAMES = ("z", "zb", "w", "wb")
Z, ZB, W, WB = 0, 1, 2, 3
# Conjugation swaps the holomorphic slots with their antiholomorphic partners.
_CONJ_PERM = (ZB, Z, WB, W)

MONO_ONE: Mono = (0, 0, 0, 0)


def mono_mul(m: Mono, n: Mono) -> Mono:
    return (m[0] + n[0], m[1] + n[1], m[2] + n[2], m[3] + n[3])


def mono_degree(m: Mono) -> int:
    return m[0] + m[1] + m[2] + m[3]


def mono_divides(m: Mono, n: Mono) -> bool:
    return m[0] <= n[0] and m[1] <= n[1] and m[2] <= n[2] and m[3] <= n[3]


def mono_div(n: Mono, m: Mono) -> Mono:
    return (n[0] - m[0], n[1] - m[1], n[2] - m[2], n[3] - m[3])


def mono_lcm(m: Mono, n: Mono) -> Mono:
    return (max(m[0], n[0]), max(m[1], n[1]), max(m[2], n[2]), max(m[3], n[3]))


def mono_gcd(m: Mono, n: Mono) -> Mono:
    return (min(m[0], n[0]), min(m[1], n[1]), min(m[2], n[2]), min(m[3], n[3]))


def mono_conj(m: Mono) -> Mono:
    return (m[1], m[0], m[3], m[2])


def display_key(m: Mono):
    """Sort key for the canonical display order: degree up, z-major ties."""
    return (mono_degree(m), -m[0], -m[1], -m[2], -m[3])


def mono_str(m: Mono) -> str:
    parts = []
    for name, e in zip(VAR_NAMES, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Polynomials


class Poly:
    """Immutable sparse polynomial with GaussRational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, GaussRational] | None = None):
        clean: dict[Mono, GaussRational] = {}
        if terms:
            for m, c in terms.items():
                if not c.is_zero():
                    clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    # -- constructors

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly({MONO_ONE: _GR_ONE})

    @staticmethod
    def constant(c: GaussRational) -> "Poly":
        return Poly({MONO_ONE: c})

    @staticmethod
    def variable(var: Union[int, str]) -> "Poly":
        idx = VAR_NAMES.index(var) if isinstance(var, str) else var
        e = [0, 0, 0, 0]
        e[idx] = 1
        return Poly({tuple(e): _GR_ONE})

    @staticmethod
    def monomial(c: GaussRational, m: Mono) -> "Poly":
        return Poly({m: c})

    # -- basic predicates

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def constant_term(self) -> GaussRational:
        return self.terms.get(MONO_ONE, _GR_ZERO)

    def is_holomorphic(self) -> bool:
        return all(m[ZB] == 0 and m[WB] == 0 for m in self.terms)

    def is_conj_symmetric(self) -> bool:
        """True iff the polynomial is a real-valued function of (z, w)."""
        for m, c in self.terms.items():
            cc = self.terms.get(mono_conj(m))
            if cc is None or cc != c.conj():
                return False
        return True

    # -- arithmetic

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = -c if s is None else s - c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Mono, GaussRational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                out[m] = c if s is None else s + c
        return Poly(out)

    def scale(self, c: GaussRational) -> "Poly":
        if c.is_zero():
            return Poly()
        return Poly({m: k * c for m, k in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Poly.one()
        base = self
        e = n
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "Poly":
        return Poly({mono_conj(m): c.conj() for m, c in self.terms.items()})

    # -- calculus

    def wirtinger(self, var: Union[int, str]) -> "Poly":
        """Formal partial derivative in one of z, zb, w, wb."""
        idx = VAR_NAMES.index(var) if isinstance(var, str) else var
        out: dict[Mono, GaussRational] = {}
        for m, c in self.terms.items():
            e = m[idx]
            if e:
                n = list(m)
                n[idx] = e - 1
                out[tuple(n)] = c.scale(Fraction(e))
        return Poly(out)

    # -- degrees

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def vanishing_order(self):
        """Minimal total degree of a term; math.inf for the zero polynomial."""
        if not self.terms:
            return math.inf
        return min(mono_degree(m) for m in self.terms)

    def monomial_content(self) -> Mono:
        """Componentwise gcd of the exponent tuples; requires a nonzero poly."""
        if not self.terms:
            raise ValueError("zero polynomial has no monomial content")
        it = iter(self.terms)
        g = next(it)
        for m in it:
            g = mono_gcd(g, m)
            if g == MONO_ONE:
                break
        return g

    def divide_monomial(self, m: Mono) -> "Poly":
        return Poly({mono_div(n, m): c for n, c in self.terms.items()})

    # -- evaluation

    def eval_exact(self, z0: GaussRational, w0: GaussRational) -> GaussRational:
        zb0, wb0 = z0.conj(), w0.conj()
        total = _GR_ZERO
        for m, c in self.terms.items():
            total = total + c * z0 ** m[0] * zb0 ** m[1] * w0 ** m[2] * wb0 ** m[3]
        return total

    def eval_complex(self, z0: complex, w0: complex) -> complex:
        zb0, wb0 = z0.conjugate(), w0.conjugate()
        total = 0j
        for m, c in self.terms.items():
            total += c.to_complex() * z0 ** m[0] * zb0 ** m[1] * w0 ** m[2] * wb0 ** m[3]
        return total

    def compiled(self) -> Callable[[complex, complex], complex]:
        """Precompute float coefficients for repeated numeric evaluation."""
        data = [(c.to_complex(), m) for m, c in self.terms.items()]

        def ev(z0: complex, w0: complex) -> complex:
            zb0, wb0 = z0.conjugate(), w0.conjugate()
            total = 0j
            for cc, m in data:
                total += cc * z0 ** m[0] * zb0 ** m[1] * w0 ** m[2] * wb0 ** m[3]
            return total

        return ev

    def sorted_terms(self) -> list[tuple[Mono, GaussRational]]:
        return sorted(self.terms.items(), key=lambda t: display_key(t[0]))

    def __str__(self) -> str:
        return canonical_str(self)

    def __repr__(self) -> str:
        return f"Poly({canonical_str(self)})"


def eval_poly(p: Poly, z0, w0):
    """Evaluate at a point; exact when both coordinates are GaussRational."""
    if isinstance(z0, GaussRational) and isinstance(w0, GaussRational):
        return p.eval_exact(z0, w0)
    return p.eval_complex(complex(z0), complex(w0))


def require_holomorphic(p: Poly, what: str = "polynomial") -> Poly:
    if not p.is_holomorphic():
        raise ValueError(f"{what} must be holomorphic (no zb or wb)")
    return p


def two_re(p: Poly) -> Poly:
    """The real polynomial p + conj(p)."""
    return p + p.conj()


# ---------------------------------------------------------------------------
# Canonical printing


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coeff_str(c: GaussRational) -> str:
    """Standalone rendering of a coefficient, used for constants."""
    if c.is_zero():
        return "0"
    if not c.im:
        return _frac_str(c.re)
    if not c.re:
        mag = "" if abs(c.im) == 1 else _frac_str(abs(c.im)) + "*"
        return ("-" if c.im < 0 else "") + mag + "i"
    im_mag = "" if abs(c.im) == 1 else _frac_str(abs(c.im)) + "*"
    joiner = " + " if c.im > 0 else " - "
    return "(" + _frac_str(c.re) + joiner + im_mag + "i)"


def _term_str(c: GaussRational, m: Mono) -> tuple[int, str]:
    """Return (sign, body) where sign applies only to pure re/im coefficients."""
    ms = mono_str(m)
    if not c.im:
        sign = 1 if c.re > 0 else -1
        mag = abs(c.re)
        if not ms:
            return sign, _frac_str(mag)
        if mag == 1:
            return sign, ms
        return sign, _frac_str(mag) + "*" + ms
    if not c.re:
        sign = 1 if c.im > 0 else -1
        mag = abs(c.im)
        body = "i" if mag == 1 else _frac_str(mag) + "*i"
        return sign, body + ("*" + ms if ms else "")
    body = coeff_str(c)
    return 1, body + ("*" + ms if ms else "")


def canonical_str(p: Poly) -> str:
    """Deterministic textual form; round-trips through parse_poly."""
    if p.is_zero():
        return "0"
    pieces = []
    for m, c in p.sorted_terms():
        sign, body = _term_str(c, m)
        if not pieces:
            pieces.append(("-" if sign < 0 else "") + body)
        else:
            pieces.append((" - " if sign < 0 else " + ") + body)
    return "".join(pieces)


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    """Syntax error in polynomial text, with 1-based line/column."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.column = col


class _Tokens:
    def __init__(self, text: str, holomorphic_only: bool):
        self.text = text
        self.holomorphic_only = holomorphic_only
        self.toks: list[tuple[str, str, int]] = []
        self._scan()
        self.pos = 0

    def _scan(self) -> None:
        text = self.text
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("num", text[i:j], i))
                i = j
                continue
            if ch.isalpha():
                j = i
                while j < n and text[j].isalpha():
                    j += 1
                name = text[i:j]
                if name not in ("z", "zb", "w", "wb", "i"):
                    raise ParseError(f"unknown symbol '{name}'", text, i)
                if self.holomorphic_only and name in ("zb", "wb"):
                    raise ParseError(
                        f"variable '{name}' not allowed here (holomorphic data only)",
                        text,
                        i,
                    )
                self.toks.append(("name", name, i))
                i = j
                continue
            if ch in "+-*/^()":
                self.toks.append((ch, ch, i))
                i += 1
                continue
            raise ParseError(f"unexpected character '{ch}'", text, i)

    def peek(self) -> tuple[str, str, int]:
        if self.pos < len(self.toks):
            return self.toks[self.pos]
        return ("end", "", len(self.text))

    def next(self) -> tuple[str, str, int]:
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind: str) -> tuple[str, str, int]:
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected '{kind}', found '{t[1] or 'end of input'}'", self.text, t[2])
        return t


def parse_poly(text: str, holomorphic_only: bool = False) -> Poly:
    """Parse polynomial text.

    Grammar: sums of terms; a term is '*'-separated factors; factors are
    variables with optional '^' powers, rational or imaginary coefficients
    ("3", "3/4", "i", "2i", "2*i", "3/4*i"), or parenthesized subexpressions
    such as "(1 + 2*i)".  With holomorphic_only, zb and wb are rejected.
    """
    tk = _Tokens(text, holomorphic_only)
    p = _parse_expr(tk)
    t = tk.peek()
    if t[0] != "end":
        raise ParseError(f"unexpected '{t[1]}'", text, t[2])
    return p


def _parse_expr(tk: _Tokens) -> Poly:
    negate = False
    if tk.peek()[0] in ("+", "-"):
        negate = tk.next()[0] == "-"
    p = _parse_term(tk)
    if negate:
        p = -p
    while tk.peek()[0] in ("+", "-"):
        op = tk.next()[0]
        q = _parse_term(tk)
        p = p - q if op == "-" else p + q
    return p


def _parse_term(tk: _Tokens) -> Poly:
    p = _parse_factor(tk)
    while True:
        t = tk.peek()
        if t[0] == "*":
            tk.next()
            p = p * _parse_factor(tk)
        elif t[0] in ("name", "num", "("):
            # Adjacency such as "2i" or "3 z" multiplies implicitly.
            p = p * _parse_factor(tk)
        else:
            return p


def _parse_factor(tk: _Tokens) -> Poly:
    kind, val, pos = tk.next()
    if kind == "(":
        p = _parse_expr(tk)
        tk.expect(")")
        return _maybe_power(tk, p)
    if kind == "num":
        q = Fraction(int(val))
        if tk.peek()[0] == "/":
            tk.next()
            dk, dv, dp = tk.expect("num")
            if int(dv) == 0:
                raise ParseError("zero denominator", tk.text, dp)
            q /= int(dv)
        if tk.peek()[:2] == ("name", "i"):
            tk.next()
            return Poly.constant(GaussRational(Fraction(0), q))
        return Poly.constant(GaussRational(q))
    if kind == "name":
        if val == "i":
            return Poly.constant(_GR_I)
        return _maybe_power(tk, Poly.variable(val))
    raise ParseError(f"expected a factor, found '{val or 'end of input'}'", tk.text, pos)


def _maybe_power(tk: _Tokens, p: Poly) -> Poly:
    if tk.peek()[0] == "^":
        tk.next()
        _, ev, ep = tk.expect("num")
        return p ** int(ev)
    return p


# ---------------------------------------------------------------------------
# Holomorphic curves t -> (a(t), b(t)) through the origin


@dataclass(frozen=True)
class Curve:
    """Pair of univariate holomorphic polynomials with a(0) = b(0) = 0.

    Components are stored as tuples of (exponent, coefficient) with positive
    exponents, sorted by exponent.
    """

    z_of_t: tuple
    w_of_t: tuple

    def __post_init__(self):
        for comp in (self.z_of_t, self.w_of_t):
            for e, c in comp:
                if e < 1:
                    raise ValueError("curve components must vanish at t = 0")
                if not isinstance(c, GaussRational) or c.is_zero():
                    raise ValueError("curve coefficients must be nonzero GaussRationals")
            if list(comp) != sorted(comp, key=lambda t: t[0]):
                raise ValueError("curve exponents must be sorted")
        if not self.z_of_t and not self.w_of_t:
            raise ValueError("curve must not be identically zero")

    @staticmethod
    def from_parts(z_part: Iterable[tuple[int, GaussRational]],
                   w_part: Iterable[tuple[int, GaussRational]]) -> "Curve":
        return Curve(tuple(sorted(z_part)), tuple(sorted(w_part)))

    @staticmethod
    def monomial(coeff: GaussRational, s: int) -> "Curve":
        """The curve t -> (coeff * t^s, t)."""
        z_part = () if coeff.is_zero() else ((s, coeff),)
        return Curve(z_part, ((1, _GR_ONE),))

    @staticmethod
    def vertical() -> "Curve":
        """The curve t -> (0, t)."""
        return Curve((), ((1, _GR_ONE),))

    def multiplicity(self) -> int:
        orders = [comp[0][0] for comp in (self.z_of_t, self.w_of_t) if comp]
        return min(orders)

    def __str__(self) -> str:
        def comp_str(comp) -> str:
            if not comp:
                return "0"
            parts = []
            for e, c in comp:
                te = "t" if e == 1 else f"t^{e}"
                if c == _GR_ONE:
                    parts.append(te)
                else:
                    parts.append(f"{coeff_str(c)}*{te}")
            return " + ".join(parts)

        return f"({comp_str(self.z_of_t)}, {comp_str(self.w_of_t)})"


def _curve_component_poly(comp, conjugated: bool) -> Poly:
    """Embed a(t) (or its conjugate) as a Poly in the t slot (z / zb)."""
    terms: dict[Mono, GaussRational] = {}
    for e, c in comp:
        m = (0, e, 0, 0) if conjugated else (e, 0, 0, 0)
        terms[m] = c.conj() if conjugated else c
    return Poly(terms)


def substitute_curve(p: Poly, curve: Curve) -> Poly:
    """Substitute z <- a(t), w <- b(t) and their conjugates.

    The result is a polynomial in t and its conjugate, returned as a Poly
    whose z slot holds t and whose zb slot holds the conjugate of t.
    """
    a = _curve_component_poly(curve.z_of_t, conjugated=False)
    ab = _curve_component_poly(curve.z_of_t, conjugated=True)
    b = _curve_component_poly(curve.w_of_t, conjugated=False)
    bb = _curve_component_poly(curve.w_of_t, conjugated=True)
    cache: dict[tuple[int, int], Poly] = {}

    def powers(base: Poly, tag: int, e: int) -> Poly:
        key = (tag, e)
        got = cache.get(key)
        if got is None:
            got = base ** e
            cache[key] = got
        return got

    total = Poly.zero()
    for m, c in p.terms.items():
        piece = Poly.constant(c)
        if m[0]:
            piece = piece * powers(a, 0, m[0])
        if m[1]:
            piece = piece * powers(ab, 1, m[1])
        if m[2]:
            piece = piece * powers(b, 2, m[2])
        if m[3]:
            piece = piece * powers(bb, 3, m[3])
        total = total + piece
    return total
