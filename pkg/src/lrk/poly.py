"""Multivariate polynomials over Q with a weight grading, and derivations of them.

Polynomials are immutable.  Terms are stored as ``{exponent tuple: Fraction}``
with zero coefficients never stored.  ``nvars == 0`` is the ground field Q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Poly",
    "WeightGrading",
    "Derivation",
    "VariableMismatch",
    "ParseError",
    "monomial_basis",
    "monomial_exponents",
    "weight_component",
    "apply_derivation",
    "parse_poly",
    "format_rational",
]


class VariableMismatch(ValueError):
    pass


class ParseError(ValueError):
    """Raised on malformed polynomial text; ``column`` is 1-based."""

    def __init__(self, message: str, column: int, text: str = ""):
        super().__init__(f"{message} at column {column}")
        self.message = message
        self.column = column
        self.text = text


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, Fraction] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise VariableMismatch(f"exponent {e} has wrong length for {nvars} variables")
                c = _as_fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: _as_fraction(c)})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(1, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "Poly":
        return cls(len(exponent), {tuple(exponent): _as_fraction(coeff)})

    @classmethod
    def _raw(cls, nvars, terms) -> "Poly":
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise VariableMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        return Poly.const(_as_fraction(other), self.nvars)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Poly._raw(self.nvars, {})
            return Poly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        if other.nvars != self.nvars:
            raise VariableMismatch(f"{self.nvars} vs {other.nvars} variables")
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        return self * _as_fraction(c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(_as_fraction(other), self.nvars)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # calculus and grading ------------------------------------------------
    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return Poly._raw(self.nvars, out)

    def weights(self, grading: "WeightGrading") -> set[int]:
        return {grading.degree(e) for e in self.terms}

    def is_homogeneous(self, grading: "WeightGrading") -> bool:
        return len(self.weights(grading)) <= 1

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                t *= Fraction(x) ** k
            total += t
        return total

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    # printing -----------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = default_names(self.nvars)
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            a = abs(c)
            if mono and a == 1:
                body = mono
            elif mono:
                body = f"{format_rational(a)}*{mono}"
            else:
                body = format_rational(a)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self.to_string()!r})"

    __str__ = to_string


def default_names(nvars: int) -> list[str]:
    if nvars <= 3:
        return ["x", "y", "z"][:nvars]
    return [f"x{i + 1}" for i in range(nvars)]


@dataclass(frozen=True)
class WeightGrading:
    variable_weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "variable_weights", tuple(int(w) for w in self.variable_weights))
        if any(w < 1 for w in self.variable_weights):
            raise ValueError("variable weights must be >= 1")

    @classmethod
    def standard(cls, nvars: int) -> "WeightGrading":
        return cls((1,) * nvars)

    @property
    def nvars(self) -> int:
        return len(self.variable_weights)

    def degree(self, exponent: Sequence[int]) -> int:
        return sum(w * k for w, k in zip(self.variable_weights, exponent))


@lru_cache(maxsize=None)
def monomial_exponents(weights: tuple[int, ...], w: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of weighted degree ``w``, lexicographically descending."""
    if w < 0:
        return ()
    if not weights:
        return ((),) if w == 0 else ()
    head, rest = weights[0], weights[1:]
    out = []
    for k in range(w // head, -1, -1):
        for tail in monomial_exponents(rest, w - k * head):
            out.append((k,) + tail)
    return tuple(out)


def monomial_basis(grading: WeightGrading, w: int) -> list[Poly]:
    n = grading.nvars
    return [Poly._raw(n, {e: Fraction(1)}) for e in monomial_exponents(grading.variable_weights, w)]


def weight_component(p: Poly, grading: WeightGrading, w: int) -> Poly:
    if grading.nvars != p.nvars:
        raise VariableMismatch("grading and polynomial disagree on variable count")
    return Poly._raw(p.nvars, {e: c for e, c in p.terms.items() if grading.degree(e) == w})


@dataclass(frozen=True)
class Derivation:
    """The derivation sum_i coefficients[i] * d/dx_i of Q[x_1..x_n]."""

    coefficients: tuple[Poly, ...]

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        n = len(coeffs)
        for c in coeffs:
            if c.nvars != n:
                raise VariableMismatch("derivation coefficients must live in the same ring")

    @classmethod
    def zero(cls, nvars: int) -> "Derivation":
        return cls(tuple(Poly.zero(nvars) for _ in range(nvars)))

    @classmethod
    def partial(cls, i: int, nvars: int) -> "Derivation":
        return cls(tuple(Poly.one(nvars) if j == i else Poly.zero(nvars) for j in range(nvars)))

    @property
    def nvars(self) -> int:
        return len(self.coefficients)

    def __call__(self, p: Poly) -> Poly:
        return apply_derivation(self, p)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "Derivation") -> "Derivation":
        return Derivation(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "Derivation":
        return Derivation(tuple(-a for a in self.coefficients))

    def times(self, a) -> "Derivation":
        return Derivation(tuple(a * c for c in self.coefficients))

    def bracket(self, other: "Derivation") -> "Derivation":
        """Commutator [self, other] as a derivation."""
        return Derivation(
            tuple(self(b) - other(a) for a, b in zip(self.coefficients, other.coefficients))
        )

    def divergence(self) -> Poly:
        """sum_i d(c_i)/dx_i, the divergence against dx_1 ^ ... ^ dx_n."""
        total = Poly.zero(self.nvars)
        for i, c in enumerate(self.coefficients):
            total = total + c.diff(i)
        return total

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = default_names(self.nvars)
        parts = []
        for c, n in zip(self.coefficients, names):
            if c.is_zero():
                continue
            if c == 1:
                parts.append(f"d/d{n}")
            elif c == -1:
                parts.append(f"-d/d{n}")
            elif len(c.terms) == 1:
                parts.append(f"{c.to_string(names)}*d/d{n}")
            else:
                parts.append(f"({c.to_string(names)})*d/d{n}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def apply_derivation(d: Derivation, p: Poly) -> Poly:
    if d.nvars != p.nvars:
        raise VariableMismatch(f"derivation on {d.nvars} variables applied to {p.nvars}")
    total = Poly.zero(p.nvars)
    for i, c in enumerate(d.coefficients):
        if c.terms:
            dp = p.diff(i)
            if dp.terms:
                total = total + c * dp
    return total


# parsing ------------------------------------------------------------------

def _tokenize(text: str):
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("int", text[i:j], i)
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("name", text[i:j], i)
            i = j
        elif ch in "+-*/^()":
            yield (ch, ch, i)
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i + 1, text)
    yield ("end", "", n)


class _Parser:
    # expr   := ['+'|'-'] term (('+'|'-') term)*
    # term   := factor (('*'|'/') factor)*      ('/' only by rational constants)
    # factor := atom ['^' int]
    # atom   := int | name | '(' expr ')'

    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.index = {name: i for i, name in enumerate(names)}
        self.nvars = len(names)
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind!r}", tok)
        self.pos += 1
        return tok

    def fail(self, message, tok):
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"{message}, found {what}", tok[2] + 1, self.text)

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.fail("empty polynomial", self.peek())
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token", self.peek())
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        p = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            q = self.factor()
            if op[0] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise ParseError("division only by nonzero constants", op[2] + 1, self.text)
                p = p * (1 / q.constant_term())
        return p

    def factor(self) -> Poly:
        p = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.fail("expected integer exponent", tok)
            p = p ** int(tok[1])
        return p

    def atom(self) -> Poly:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Poly.const(int(tok[1]), self.nvars)
        if tok[0] == "name":
            self.take()
            if tok[1] not in self.index:
                raise ParseError(f"unknown variable {tok[1]!r}", tok[2] + 1, self.text)
            return Poly.var(self.index[tok[1]], self.nvars)
        if tok[0] == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        self.fail("expected a number, variable or '('", tok)


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse ``"3/2*x^2*y - y"`` style text over the variables ``names``."""
    return _Parser(str(text), list(names)).parse()
