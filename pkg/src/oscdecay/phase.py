"""Polynomial phases with exact rational coefficients.

A phase is a sparse multivariate polynomial over Q: a mapping from exponent
multi-indices (tuples of nonnegative ints, one entry per variable) to nonzero
Fraction coefficients.  All symbolic work (parsing, differentiation, face
restriction) is exact; floats only appear in `evaluate`.

The *reduced* form drops every term whose exponent has fewer than two
strictly positive entries: such terms never influence the mixed second
derivatives the decay analysis is built on, and discarding them keeps the
Newton polyhedron honest about the oscillation that actually matters.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

MultiIndex = tuple[int, ...]


class PhaseError(ValueError):
    """Base error for phase construction and parsing."""


class PhaseParseError(PhaseError):
    """Syntax error in a phase expression; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EmptyPhaseError(PhaseError):
    """Raised when an operation would produce the zero polynomial."""


def _check_multiindex(alpha: Sequence[int], dimension: int) -> MultiIndex:
    a = tuple(alpha)
    if len(a) != dimension:
        raise PhaseError(f"multi-index {a} has length {len(a)}, expected {dimension}")
    if any((not isinstance(e, int)) or e < 0 for e in a):
        raise PhaseError(f"multi-index {a} must have nonnegative integer entries")
    return a


@dataclass(frozen=True)
class PhasePolynomial:
    """Immutable sparse polynomial.  Do not mutate `terms` after creation."""

    dimension: int
    terms: Mapping[MultiIndex, Fraction]
    reduced: bool = False

    def __post_init__(self):
        if self.dimension < 2:
            raise PhaseError("dimension must be at least 2")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping[Sequence[int], Fraction | int | str],
                   dimension: int, *, reduced: bool = False,
                   allow_zero: bool = False) -> "PhasePolynomial":
        """Build from a {multi-index: coefficient} mapping, dropping zeros."""
        clean: dict[MultiIndex, Fraction] = {}
        for alpha, c in terms.items():
            a = _check_multiindex(alpha, dimension)
            cf = Fraction(c)
            if cf != 0:
                clean[a] = clean.get(a, Fraction(0)) + cf
                if clean[a] == 0:
                    del clean[a]
        if not clean and not allow_zero:
            raise EmptyPhaseError("polynomial has no nonzero terms")
        if reduced:
            bad = [a for a in clean if sum(e > 0 for e in a) < 2]
            if bad:
                raise PhaseError(f"term {bad[0]} has fewer than two positive exponents "
                                 "in a polynomial marked reduced")
        return cls(dimension, clean, reduced)

    # -- queries -----------------------------------------------------------

    @property
    def support(self) -> list[MultiIndex]:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(alpha), Fraction(0))

    def __str__(self) -> str:
        return format_phase(self)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        """Evaluate at a float point with compensated term summation."""
        if len(x) != self.dimension:
            raise PhaseError("point has wrong dimension")
        vals = []
        for alpha, c in self.terms.items():
            t = float(c)
            for xi, e in zip(x, alpha):
                t *= xi ** e
            vals.append(t)
        return math.fsum(vals)

    def evaluate_exact(self, x: Sequence[Fraction | int]) -> Fraction:
        """Evaluate at a rational point, exactly."""
        if len(x) != self.dimension:
            raise PhaseError("point has wrong dimension")
        total = Fraction(0)
        for alpha, c in self.terms.items():
            t = c
            for xi, e in zip(x, alpha):
                t *= Fraction(xi) ** e
            total += t
        return total


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<var>x\d+)|(?P<int>\d+)|(?P<op>[-+*/^]))")


def parse_phase(text: str, dimension: int) -> PhasePolynomial:
    """Parse `3/2*x1^5*x2 - x1*x2` style expressions.

    Grammar: terms joined by + or -; each term is an optional rational
    coefficient followed by one or more variable factors `xK` or `xK^E`
    (E >= 1, K in 1..dimension), separated by optional `*`.  Whitespace is
    ignored.  Purely constant terms are not part of the grammar.
    """
    tokens: list[tuple[str, str, int]] = []  # (kind, text, position)
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise PhaseParseError(f"unexpected character {stripped[0]!r}",
                                  pos + (len(text[pos:]) - len(stripped)))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()

    terms: dict[MultiIndex, Fraction] = {}
    i = 0
    n = len(tokens)

    def peek(k: int = 0):
        return tokens[i + k] if i + k < n else (None, "", len(text))

    if n == 0:
        raise PhaseParseError("empty expression", 0)

    first = True
    while i < n:
        sign = 1
        kind, tok, tpos = peek()
        if kind == "op" and tok in "+-":
            if tok == "-":
                sign = -1
            i += 1
        elif not first:
            raise PhaseParseError("expected '+' or '-' between terms", tpos)
        first = False

        coef = Fraction(sign)
        kind, tok, tpos = peek()
        if kind == "int":
            num = int(tok)
            i += 1
            kind, tok, tpos = peek()
            if kind == "op" and tok == "/":
                i += 1
                kind, tok, tpos = peek()
                if kind != "int":
                    raise PhaseParseError("expected denominator after '/'", tpos)
                den = int(tok)
                if den == 0:
                    raise PhaseParseError("zero denominator", tpos)
                coef *= Fraction(num, den)
                i += 1
            else:
                coef *= num
            kind, tok, tpos = peek()
            if kind == "op" and tok == "*":
                i += 1
                kind, tok, tpos = peek()

        # one or more variable factors
        alpha = [0] * dimension
        saw_factor = False
        while True:
            kind, tok, tpos = peek()
            if kind != "var":
                break
            idx = int(tok[1:])
            if not 1 <= idx <= dimension:
                raise PhaseError(f"variable {tok} out of range for dimension {dimension}")
            i += 1
            exp = 1
            kind2, tok2, tpos2 = peek()
            if kind2 == "op" and tok2 == "^":
                i += 1
                kind2, tok2, tpos2 = peek()
                if kind2 != "int":
                    raise PhaseParseError("expected integer exponent after '^'", tpos2)
                exp = int(tok2)
                if exp < 1:
                    raise PhaseParseError("exponent must be at least 1", tpos2)
                i += 1
            alpha[idx - 1] += exp
            saw_factor = True
            kind2, tok2, tpos2 = peek()
            if kind2 == "op" and tok2 == "*":
                # '*' must be followed by another factor
                nk, _, npos = peek(1)
                if nk != "var":
                    raise PhaseParseError("expected variable after '*'", npos)
                i += 1
        if not saw_factor:
            raise PhaseParseError("expected a variable factor", tpos)

        key = tuple(alpha)
        terms[key] = terms.get(key, Fraction(0)) + coef
        if terms[key] == 0:
            del terms[key]

    if not terms:
        raise EmptyPhaseError("all terms cancel; the zero polynomial is not a valid phase")
    return PhasePolynomial(dimension, terms)


def format_phase(p: PhasePolynomial) -> str:
    """Canonical string form; `parse_phase(format_phase(p), d)` round-trips."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for alpha in sorted(p.terms, reverse=True):
        c = p.terms[alpha]
        factors = []
        for k, e in enumerate(alpha):
            if e == 1:
                factors.append(f"x{k + 1}")
            elif e > 1:
                factors.append(f"x{k + 1}^{e}")
        mono = "*".join(factors)
        mag = abs(c)
        if not mono:
            body = str(mag)  # constant terms print fine but are not re-parseable
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"{'+' if c > 0 else '-'} {body}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# operations

def reduce_phase(p: PhasePolynomial) -> PhasePolynomial:
    """Drop terms with fewer than two strictly positive exponent entries."""
    kept = {a: c for a, c in p.terms.items() if sum(e > 0 for e in a) >= 2}
    if not kept:
        raise EmptyPhaseError("no terms with at least two positive exponents remain")
    return PhasePolynomial(p.dimension, kept, reduced=True)


def partial_derivative(p: PhasePolynomial, order: Sequence[int]) -> PhasePolynomial:
    """Exact partial derivative of multi-order `order`.

    The result may be the zero polynomial (empty terms); callers that need a
    nonzero phase must check `is_zero`.
    """
    a = _check_multiindex(order, p.dimension)
    out: dict[MultiIndex, Fraction] = {}
    for alpha, c in p.terms.items():
        if any(e < o for e, o in zip(alpha, a)):
            continue
        coef = c
        for e, o in zip(alpha, a):
            for k in range(o):
                coef *= (e - k)
        beta = tuple(e - o for e, o in zip(alpha, a))
        out[beta] = out.get(beta, Fraction(0)) + coef
        if out[beta] == 0:
            del out[beta]
    return PhasePolynomial(p.dimension, out)


def evaluate(p: PhasePolynomial, x: Sequence[float]) -> float:
    return p.evaluate(x)


def restrict_to_face(p: PhasePolynomial, face) -> PhasePolynomial:
    """Keep exactly the terms whose exponents lie on the given face.

    `face` is a polytope face record carrying a supporting normal and offset;
    a support point alpha is on the face iff <normal, alpha> equals the
    offset.  Raises if the face does not support p's exponent set (e.g. a
    face of some other polynomial's polyhedron).
    """
    w = face.normal
    b = face.offset
    if len(w) != p.dimension:
        raise PhaseError("face dimension mismatch")
    values = {a: sum(Fraction(wi) * ai for wi, ai in zip(w, a)) for a in p.terms}
    lo = min(values.values())
    if lo != b:
        raise PhaseError("face does not belong to this polynomial's polyhedron")
    on_face = {a for a, v in values.items() if v == b}
    vertex_set = {tuple(v) for v in face.vertices}
    if not vertex_set <= on_face:
        raise PhaseError("face vertices are not support points of this polynomial")
    kept = {a: c for a, c in p.terms.items() if a in on_face}
    return PhasePolynomial(p.dimension, kept, reduced=p.reduced)
