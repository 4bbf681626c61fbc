"""Truncated power series in one variable with polynomial coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .polyring import Polynomial, poly

__all__ = [
    "TruncSeries",
    "DivisionByNonUnit",
    "NonzeroConstantTerm",
    "NonUnitLinearCoefficient",
    "BadConstantTerm",
    "tree_function",
    "exp_series",
    "geometric",
    "lagrange_coefficients",
    "fixed_point",
    "solve_fg_from_az",
]


class DivisionByNonUnit(ArithmeticError):
    pass


class NonzeroConstantTerm(ValueError):
    pass


class NonUnitLinearCoefficient(ValueError):
    pass


class BadConstantTerm(ValueError):
    pass


_ZERO = Polynomial.constant(0)
_ONE = Polynomial.constant(1)


def _rational_unit(p: Polynomial):
    """Return p as a nonzero rational if it is one, else None."""
    if p.is_constant() and p.constant_value() != 0:
        return Fraction(p.constant_value())
    return None


class TruncSeries:
    """Coefficients of t^0..t^order; everything beyond is unknown."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence, order: int | None = None):
        cs = [poly(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = cs[: order + 1] + [_ZERO] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_function(cls, f: Callable[[int], object], order: int) -> "TruncSeries":
        return cls([f(n) for n in range(order + 1)])

    @classmethod
    def t(cls, order: int) -> "TruncSeries":
        return cls([0, 1], order)

    @classmethod
    def const(cls, c, order: int) -> "TruncSeries":
        return cls([c], order)

    def __getitem__(self, n: int) -> Polynomial:
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: order + 1])

    def _lift(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], self.order)

    def __add__(self, other):
        o = self._lift(other)
        n = min(self.order, o.order)
        return TruncSeries([self.coeffs[i] + o.coeffs[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            c = poly(other)
            return TruncSeries([a * c for a in self.coeffs])
        o = self._lift(other)
        n = min(self.order, o.order)
        a, b = self.coeffs, o.coeffs
        out = []
        for k in range(n + 1):
            acc = _ZERO
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    acc = acc + a[i] * b[k - i]
            out.append(acc)
        return TruncSeries(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncSeries":
        c0 = _rational_unit(self.coeffs[0])
        if c0 is None:
            raise DivisionByNonUnit(f"constant term {self.coeffs[0]} has no rational inverse")
        inv0 = 1 / c0
        a = self.coeffs
        out = [Polynomial.constant(inv0)]
        for k in range(1, self.order + 1):
            acc = _ZERO
            for i in range(1, k + 1):
                if a[i] and out[k - i]:
                    acc = acc + a[i] * out[k - i]
            out.append(acc.scale(-inv0))
        return TruncSeries(out)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result = TruncSeries([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def agrees_with(self, other: "TruncSeries", order: int | None = None) -> bool:
        n = min(self.order, other.order) if order is None else order
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n + 1))

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(t)); inner must have zero constant term."""
        if inner.coeffs[0]:
            raise NonzeroConstantTerm("inner series must vanish at 0")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        acc = TruncSeries([self.coeffs[n]], n)
        for k in range(n - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc

    def derivative(self) -> "TruncSeries":
        if self.order == 0:
            return TruncSeries([0], 0)
        return TruncSeries([self.coeffs[i] * i for i in range(1, self.order + 1)])

    def integral(self) -> "TruncSeries":
        return TruncSeries([0] + [self.coeffs[i].scale(Fraction(1, i + 1)) for i in range(self.order + 1)])

    def exp(self) -> "TruncSeries":
        if self.coeffs[0]:
            raise BadConstantTerm("exp needs zero constant term")
        # E' = A' E, coefficient recursion
        n = self.order
        da = [self.coeffs[i] * i for i in range(n + 1)]
        e = [_ONE]
        for k in range(1, n + 1):
            acc = _ZERO
            for i in range(1, k + 1):
                if da[i] and e[k - i]:
                    acc = acc + da[i] * e[k - i]
            e.append(acc.scale(Fraction(1, k)))
        return TruncSeries(e)

    def log(self) -> "TruncSeries":
        if self.coeffs[0] != 1:
            raise BadConstantTerm("log needs constant term 1")
        return (self.derivative() / self.truncate(self.order - 1)).integral() if self.order else TruncSeries([0], 0)

    def comp_inverse(self) -> "TruncSeries":
        if self.coeffs[0]:
            raise NonzeroConstantTerm("series to invert must vanish at 0")
        if self.order < 1 or _rational_unit(self.coeffs[1]) is None:
            raise NonUnitLinearCoefficient("linear coefficient must be a nonzero rational")
        n = self.order
        g1inv = 1 / _rational_unit(self.coeffs[1])
        inv = TruncSeries([0, g1inv], n)
        # Newton-free order-by-order correction: fix coefficient k so that G(inv) = t to order k.
        for k in range(2, n + 1):
            err = self.compose(inv)[k]
            if err:
                coeffs = list(inv.coeffs)
                coeffs[k] = coeffs[k] - err.scale(g1inv)
                inv = TruncSeries(coeffs)
        return inv

    def __str__(self):
        parts = [f"({c})*t^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(parts) + f" + O(t^{self.order + 1})" if parts else f"O(t^{self.order + 1})"

    def __repr__(self):
        return f"TruncSeries([{', '.join(str(c) for c in self.coeffs)}])"

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "TruncSeries":
        return cls([poly(s) for s in items])

    def egf_numbers(self) -> list[Polynomial]:
        """n! * [t^n] for each n."""
        return [c * factorial(i) for i, c in enumerate(self.coeffs)]


def exp_series(scale, order: int) -> TruncSeries:
    """exp(scale * t) with polynomial ``scale``."""
    c = poly(scale)
    return TruncSeries([(c ** n).scale(Fraction(1, factorial(n))) for n in range(order + 1)])


def geometric(ratio, order: int) -> TruncSeries:
    """1/(1 - ratio*t)."""
    c = poly(ratio)
    return TruncSeries([c ** n for n in range(order + 1)])


def tree_function(order: int) -> TruncSeries:
    """Sum n^(n-1) t^n / n!."""
    return TruncSeries([0] + [Fraction(n ** (n - 1), factorial(n)) for n in range(1, order + 1)])


def fixed_point(phi_series: TruncSeries, order: int) -> TruncSeries:
    """The series f with f = t * phi(f), by iteration."""
    f = TruncSeries([0], order)
    t = TruncSeries.t(order)
    for _ in range(order):
        f = t * phi_series.truncate(order).compose(f)
    return f


def lagrange_coefficients(phi_series: TruncSeries, h: TruncSeries, order: int) -> list[Polynomial]:
    """[t^n] H(f(t)) for n = 0..order where f = t*phi(f).

    Uses (1/n) [u^(n-1)] H'(u) phi(u)^n for n >= 1; index 0 holds H(0).
    """
    if _rational_unit(phi_series[0]) is None:
        raise ValueError("phi(0) must be an invertible rational")
    dh = h.derivative()
    out = [h[0]]
    power = TruncSeries([1], order)
    for n in range(1, order + 1):
        power = power * phi_series.truncate(order)
        prod = dh.truncate(min(dh.order, order)) * power
        out.append(prod[n - 1].scale(Fraction(1, n)) if n - 1 <= prod.order else _ZERO)
    return out


def solve_fg_from_az(a: TruncSeries, z: TruncSeries, order: int) -> tuple[TruncSeries, TruncSeries]:
    """Solve G' = A(G), F' = F * Z(G) with G(0) = 0, F(0) = 1 up to t^order.

    Each coefficient only needs lower ones, so no division by A(0) occurs.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if a.order < order - 1 or z.order < order - 1:
        raise ValueError("A and Z must be known to order - 1")
    g = [_ZERO]
    f = [_ONE]
    for n in range(order):
        gs = TruncSeries(g, n)
        ag = a.truncate(n).compose(gs)
        fz = TruncSeries(f, n) * z.truncate(n).compose(gs)
        g.append(ag[n].scale(Fraction(1, n + 1)))
        f.append(fz[n].scale(Fraction(1, n + 1)))
    return TruncSeries(f), TruncSeries(g)
