"""Sparse multivariate polynomials with exact rational coefficients.

Variables are x, y, z, xi and the indexed family phi0, phi1, ...  A monomial
is a tuple of exponents indexed by variable slot (x=0, y=1, z=2, xi=3,
phi_m = 4 + m) with trailing zeros stripped, so plain tuple comparison gives
the lexicographic monomial order used for printing.

Coefficients are kept as ``int`` whenever they are integral and as
``fractions.Fraction`` otherwise; this keeps the common integer case fast.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

__all__ = [
    "Var",
    "X",
    "Y",
    "Z",
    "XI",
    "phi",
    "Polynomial",
    "PolyParseError",
    "NotDivisible",
    "poly",
    "const",
    "var",
    "is_nonneg",
    "substitute",
    "parse",
]

_BASE_NAMES = ("x", "y", "z", "xi")


@dataclass(frozen=True, order=True)
class Var:
    """A variable identifier. ``slot`` fixes both identity and order."""

    slot: int

    @property
    def name(self) -> str:
        if self.slot < 4:
            return _BASE_NAMES[self.slot]
        return f"phi{self.slot - 4}"

    @property
    def tag(self) -> str:
        return ("X", "Y", "Z", "Xi")[self.slot] if self.slot < 4 else "Phi"

    @property
    def index(self) -> int | None:
        return self.slot - 4 if self.slot >= 4 else None

    def __repr__(self) -> str:
        return f"Var({self.name})"

    def __str__(self) -> str:
        return self.name

    # arithmetic promotes to Polynomial
    def _p(self):
        return Polynomial.variable(self)

    def __add__(self, o):
        return self._p() + o

    def __radd__(self, o):
        return o + self._p()

    def __sub__(self, o):
        return self._p() - o

    def __rsub__(self, o):
        return o - self._p()

    def __mul__(self, o):
        return self._p() * o

    def __rmul__(self, o):
        return o * self._p()

    def __neg__(self):
        return -self._p()

    def __pow__(self, k: int):
        return self._p() ** k


X, Y, Z, XI = Var(0), Var(1), Var(2), Var(3)


def phi(m: int) -> Var:
    if m < 0:
        raise ValueError("phi index must be nonnegative")
    return Var(4 + m)


def _var_from_name(name: str) -> Var:
    if name in _BASE_NAMES:
        return Var(_BASE_NAMES.index(name))
    m = re.fullmatch(r"phi_?(\d+)", name)
    if m:
        return phi(int(m.group(1)))
    raise PolyParseError(f"unknown variable {name!r}")


class PolyParseError(ValueError):
    pass


class NotDivisible(ArithmeticError):
    """Raised by exact division when the quotient is not a polynomial."""


Coeff = Union[int, Fraction]
Scalar = Union[int, Fraction]


def _norm(c) -> Coeff:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"unsupported coefficient {c!r}")


def _madd(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return a
    out = list(a)
    for i, e in enumerate(b):
        out[i] += e
    return tuple(out)


def _msub(a: tuple, b: tuple):
    """a - b as exponent vectors, or None if b does not divide a."""
    if len(b) > len(a):
        return None
    out = list(a)
    for i, e in enumerate(b):
        out[i] -= e
        if out[i] < 0:
            return None
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class Polynomial:
    """Immutable sparse polynomial: ``{monomial: coefficient}``."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[tuple, Scalar] | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = _norm(c)
                if c:
                    m = tuple(m)
                    while m and m[-1] == 0:
                        m = m[:-1]
                    t[m] = t.get(m, 0) + c
                    if not t[m]:
                        del t[m]
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._t = t
        p._hash = None
        return p

    # construction helpers
    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        c = _norm(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def variable(cls, v: Var | str, power: int = 1) -> "Polynomial":
        if isinstance(v, str):
            v = _var_from_name(v)
        if power == 0:
            return cls.constant(1)
        m = [0] * (v.slot + 1)
        m[v.slot] = power
        return cls._raw({tuple(m): 1})

    # inspection
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def constant_term(self) -> Coeff:
        return self._t.get((), 0)

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._t.get((), 0)

    def variables(self) -> list[Var]:
        slots = set()
        for m in self._t:
            slots.update(i for i, e in enumerate(m) if e)
        return [Var(s) for s in sorted(slots)]

    def degree(self, v: Var | None = None) -> int:
        """Total degree, or degree in ``v``. The zero polynomial has degree -1."""
        if not self._t:
            return -1
        if v is None:
            return max(sum(m) for m in self._t)
        s = v.slot
        return max((m[s] if s < len(m) else 0) for m in self._t)

    def coefficient(self, v: Var, power: int) -> "Polynomial":
        """Coefficient of ``v**power`` viewing self as a polynomial in ``v``."""
        s = v.slot
        out = {}
        for m, c in self._t.items():
            e = m[s] if s < len(m) else 0
            if e == power:
                mm = list(m)
                if s < len(mm):
                    mm[s] = 0
                while mm and mm[-1] == 0:
                    mm.pop()
                out[tuple(mm)] = c
        return Polynomial._raw(out)

    def coeff_of_monomial(self, mono: Mapping[Var, int]) -> Coeff:
        m = [0] * (max((v.slot for v in mono), default=-1) + 1)
        for v, e in mono.items():
            m[v.slot] = e
        while m and m[-1] == 0:
            m.pop()
        return self._t.get(tuple(m), 0)

    def is_homogeneous(self, weights: Mapping[Var, int] | None = None) -> bool:
        degs = {self._wdeg(m, weights) for m in self._t}
        return len(degs) <= 1

    @staticmethod
    def _wdeg(m: tuple, weights) -> int:
        if weights is None:
            return sum(m)
        return sum(e * weights.get(Var(i), 0) for i, e in enumerate(m))

    # arithmetic
    @staticmethod
    def _lift(o) -> "Polynomial":
        if isinstance(o, Polynomial):
            return o
        if isinstance(o, (int, Fraction)) or isinstance(o, Rational):
            return Polynomial.constant(o)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o._t:
            return self
        if not self._t:
            return o
        t = dict(self._t)
        for m, c in o._t.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = _norm(v) if isinstance(v, Fraction) else v
            else:
                t.pop(m, None)
        return Polynomial._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self._t or not o._t:
            return Polynomial._raw({})
        a, b = self._t, o._t
        if len(a) == 1 and () in a:
            return o.scale(a[()])
        if len(b) == 1 and () in b:
            return self.scale(b[()])
        t: dict = {}
        get = t.get
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = _madd(ma, mb)
                t[m] = get(m, 0) + ca * cb
        return Polynomial._raw({m: _norm(c) for m, c in t.items() if c})

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Polynomial":
        c = _norm(c)
        if not c:
            return Polynomial._raw({})
        if c == 1:
            return self
        return Polynomial._raw({m: _norm(v * c) for m, v in self._t.items()})

    def __truediv__(self, other):
        """Division by a nonzero rational, or exact division by a polynomial."""
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of polynomial by zero")
            return self.scale(Fraction(1) / other)
        if isinstance(other, Polynomial):
            return self.exact_div(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def leading(self):
        """Lex-largest monomial and its coefficient."""
        m = max(self._t)
        return m, self._t[m]

    def exact_div(self, d: "Polynomial") -> "Polynomial":
        """Quotient ``self / d``; raises NotDivisible if there is a remainder."""
        if d.is_zero():
            raise ZeroDivisionError("exact division by zero polynomial")
        if d.is_constant():
            return self.scale(Fraction(1) / Fraction(d.constant_value()))
        if self.is_zero():
            return self
        dm, dc = d.leading()
        rem = dict(self._t)
        q: dict = {}
        while rem:
            m = max(rem)
            c = rem[m]
            qm = _msub(m, dm)
            if qm is None:
                raise NotDivisible(f"{self} is not divisible by {d}")
            if isinstance(c, int) and isinstance(dc, int) and c % dc == 0:
                qc = c // dc
            else:
                qc = _norm(Fraction(c) / dc)
            q[qm] = qc
            for mm, cc in d._t.items():
                k = _madd(qm, mm)
                v = rem.get(k, 0) - qc * cc
                if v:
                    rem[k] = _norm(v)
                else:
                    rem.pop(k, None)
        return Polynomial._raw(q)

    # comparison / hashing
    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self._t == o._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    # evaluation
    def substitute(self, mapping: Mapping[Var | str, "Polynomial | Scalar"]) -> "Polynomial":
        sub = {}
        for v, val in mapping.items():
            if isinstance(v, str):
                v = _var_from_name(v)
            sub[v.slot] = self._lift(val)
        if not sub:
            return self
        cache: dict = {}

        def power(slot, e):
            key = (slot, e)
            if key not in cache:
                cache[key] = sub[slot] ** e
            return cache[key]

        out = Polynomial._raw({})
        for m, c in self._t.items():
            kept = list(m)
            term = Polynomial.constant(c)
            for slot, e in enumerate(m):
                if e and slot in sub:
                    kept[slot] = 0
                    term = term * power(slot, e)
            while kept and kept[-1] == 0:
                kept.pop()
            if kept:
                term = term * Polynomial._raw({tuple(kept): 1})
            out = out + term
        return out

    def is_nonneg(self) -> bool:
        return all(c > 0 for c in self._t.values())

    # text form
    def sorted_terms(self):
        return sorted(self._t.items(), key=lambda mc: mc[0], reverse=True)

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(
                (Var(s).name if e == 1 else f"{Var(s).name}^{e}")
                for s, e in enumerate(m)
                if e
            )
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(phi_?\d+|xi|x|y|z)|(\^)|(\*)|([+-])|(\()|(\)))")


def parse(text: str) -> Polynomial:
    """Parse the canonical text form (also accepts parentheses and products)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyParseError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        num, name, caret, star, sign, lp, rp = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif name is not None:
            tokens.append(("var", name))
        elif caret:
            tokens.append(("^", None))
        elif star:
            tokens.append(("*", None))
        elif sign:
            tokens.append((sign, None))
        elif lp:
            tokens.append(("(", None))
        elif rp:
            tokens.append((")", None))
    if not tokens:
        raise PolyParseError("empty polynomial text")
    p, i = _parse_sum(tokens, 0)
    if i != len(tokens):
        raise PolyParseError(f"trailing input in {text!r}")
    return p


def _parse_sum(toks, i):
    sign = 1
    if i < len(toks) and toks[i][0] in "+-":
        sign = -1 if toks[i][0] == "-" else 1
        i += 1
    acc, i = _parse_prod(toks, i)
    acc = acc.scale(sign)
    while i < len(toks) and toks[i][0] in ("+", "-"):
        s = -1 if toks[i][0] == "-" else 1
        term, i = _parse_prod(toks, i + 1)
        acc = acc + term.scale(s)
    return acc, i


def _parse_prod(toks, i):
    acc, i = _parse_power(toks, i)
    while i < len(toks) and toks[i][0] in ("*", "var", "("):
        if toks[i][0] == "*":
            i += 1
        f, i = _parse_power(toks, i)
        acc = acc * f
    return acc, i


def _parse_power(toks, i):
    if i >= len(toks):
        raise PolyParseError("unexpected end of input")
    kind, val = toks[i]
    if kind == "num":
        base, i = Polynomial.constant(val), i + 1
    elif kind == "var":
        base, i = Polynomial.variable(_var_from_name(val)), i + 1
    elif kind == "(":
        base, i = _parse_sum(toks, i + 1)
        if i >= len(toks) or toks[i][0] != ")":
            raise PolyParseError("missing ')'")
        i += 1
    else:
        raise PolyParseError(f"unexpected token {kind!r}")
    if i < len(toks) and toks[i][0] == "^":
        if i + 1 >= len(toks) or toks[i + 1][0] != "num" or toks[i + 1][1].denominator != 1:
            raise PolyParseError("exponent must be a nonnegative integer")
        base = base ** int(toks[i + 1][1])
        i += 2
    return base, i


# module-level conveniences

def const(c: Scalar) -> Polynomial:
    return Polynomial.constant(c)


def var(v: Var | str, power: int = 1) -> Polynomial:
    return Polynomial.variable(v, power)


def poly(value) -> Polynomial:
    """Coerce an int, Fraction, string, Var or Polynomial to a Polynomial."""
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, Var):
        return Polynomial.variable(value)
    return Polynomial.constant(value)


def is_nonneg(p: Polynomial) -> bool:
    return poly(p).is_nonneg()


def substitute(p: Polynomial, mapping) -> Polynomial:
    return poly(p).substitute(mapping)


def total(polys: Iterable[Polynomial]) -> Polynomial:
    acc: dict = {}
    for p in polys:
        for m, c in p._t.items():
            acc[m] = acc.get(m, 0) + c
    return Polynomial._raw({m: _norm(c) for m, c in acc.items() if c})
