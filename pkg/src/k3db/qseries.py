"""Exact univariate series arithmetic.

Polynomials have rational coefficients, and rational functions have
denominators that are products of binomials (1 - t^e).  Nothing here
truncates except `expand`, which returns an explicit prefix.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

__all__ = [
    "ZERO_DEGREE",
    "NotPolynomial",
    "Poly",
    "CycloDenominator",
    "HilbertExpr",
    "SeriesPrefix",
    "expr_add",
    "expr_expand",
    "clear_denominator",
]

# degree reported by the zero polynomial
ZERO_DEGREE = -1


class NotPolynomial(ArithmeticError):
    """A division that was required to be exact left a remainder."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _scale_to_ints(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    return [int(c * den) for c in coeffs], den


def _mul_binomial_int(a: list[int], e: int) -> list[int]:
    out = a + [0] * e
    for i, c in enumerate(a):
        if c:
            out[i + e] -= c
    return out


def _div_binomial_int(a: list[int], e: int) -> list[int] | None:
    # q(1 - t^e) = a  <=>  q[n] = a[n] + q[n-e]
    n = len(a)
    if n <= e:
        return None if any(a) else []
    q = a[: n - e]
    for i in range(e, n - e):
        q[i] += q[i - e]
    for i in range(n - e, n):
        back = q[i - e] if 0 <= i - e < len(q) else 0
        if a[i] + back != 0:
            return None
    return q


def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


class Poly:
    """Dense polynomial in t with Fraction coefficients, immutable."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        self._c = tuple(_trim([_frac(c) for c in coeffs]))

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "Poly":
        return cls([0] * exp + [coeff])

    @classmethod
    def from_sparse(cls, terms: Iterable[tuple[int, object]]) -> "Poly":
        terms = list(terms)
        top = max((e for e, _ in terms), default=-1)
        c = [Fraction(0)] * (top + 1)
        for e, v in terms:
            c[e] += _frac(v)
        return cls(c)

    @classmethod
    def binomial_product(cls, exps: Iterable[int]) -> "Poly":
        """The product of (1 - t^e) over `exps`."""
        a = [1]
        for e in exps:
            a = _mul_binomial_int(a, e)
        return cls(a)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1 if self._c else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self._c

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    def __getitem__(self, n: int) -> Fraction:
        return self._c[n] if 0 <= n < len(self._c) else Fraction(0)

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self == Poly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"Poly({self.format(order='asc')!r})"

    def __str__(self):
        return self.format()

    def __neg__(self):
        return Poly(-c for c in self._c)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self._c), len(other._c))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self._c)
        other = _as_poly(other)
        if not self._c or not other._c:
            return Poly()
        out = [Fraction(0)] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if a:
                for j, b in enumerate(other._c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Poly":
        """Multiply by t^k."""
        return Poly([0] * k + list(self._c)) if self._c else self

    def reflect(self, n: int) -> "Poly":
        """t^n * p(1/t); requires n >= degree."""
        if n < self.degree:
            raise ValueError("reflection degree below polynomial degree")
        return Poly(self[n - i] for i in range(n + 1))

    def mul_binomials(self, exps: Iterable[int]) -> "Poly":
        ints, den = _scale_to_ints(self._c)
        for e in exps:
            ints = _mul_binomial_int(ints, e)
        return Poly(Fraction(c, den) for c in ints)

    def div_binomials(self, exps: Iterable[int]) -> "Poly":
        """Exact quotient by the product of (1 - t^e); raises NotPolynomial."""
        ints, den = _scale_to_ints(self._c)
        for e in exps:
            q = _div_binomial_int(_trim(ints), e)
            if q is None:
                raise NotPolynomial(f"not divisible by 1 - t^{e}")
            ints = q
        return Poly(Fraction(c, den) for c in ints)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Long division with remainder."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._c)
        dq = other.degree
        lead = other._c[-1]
        quo = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if not c:
                continue
            f = c / lead
            quo[k - dq] = f
            for j, b in enumerate(other._c):
                rem[k - dq + j] -= f * b
        return Poly(quo), Poly(rem)

    def sparse(self) -> list[tuple[int, Fraction]]:
        return [(i, c) for i, c in enumerate(self._c) if c]

    def format(self, order: str = "desc", var: str = "t") -> str:
        """Render as e.g. ``t^48 - t^36 + 2*t^26 + 1``."""
        terms = self.sparse()
        if order == "desc":
            terms.reverse()
        elif order != "asc":
            raise ValueError(f"unknown order {order!r}")
        if not terms:
            return "0"
        parts = []
        for k, (e, c) in enumerate(terms):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                mono = var if e == 1 else f"{var}^{e}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if k == 0:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str, var: str = "t") -> "Poly":
        """Inverse of `format` (also tolerant of extra whitespace)."""
        s = re.sub(r"\s+", "", text)
        if not s:
            raise ValueError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        v = re.escape(var)
        term = re.compile(rf"([+-])(?:(?:(\d+(?:/\d+)?)\*)?{v}(?:\^(\d+))?|(\d+(?:/\d+)?))")
        pos, terms = 0, []
        while pos < len(s):
            m = term.match(s, pos)
            if not m:
                raise ValueError(f"cannot parse polynomial at {s[pos:]!r}")
            sign = 1 if m.group(1) == "+" else -1
            if m.group(4) is not None:
                terms.append((0, sign * Fraction(m.group(4))))
            else:
                coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
                terms.append((int(m.group(3) or 1), sign * coef))
            pos = m.end()
        return cls.from_sparse(terms)


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly([x])
    if isinstance(x, (list, tuple)):
        return Poly(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a polynomial")


@dataclass(frozen=True)
class CycloDenominator:
    """Multiset of exponents e_i standing for the product of (1 - t^e_i)."""

    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        exps = tuple(sorted(int(e) for e in self.exponents))
        if any(e < 1 for e in exps):
            raise ValueError("denominator exponents must be positive")
        object.__setattr__(self, "exponents", exps)

    def poly(self) -> Poly:
        return Poly.binomial_product(self.exponents)

    def lcm(self, other: "CycloDenominator") -> "CycloDenominator":
        a, b = Counter(self.exponents), Counter(other.exponents)
        return CycloDenominator(tuple((a | b).elements()))

    def missing_from(self, other: "CycloDenominator") -> tuple[int, ...]:
        """Exponents of `other` not accounted for by self (multiset difference)."""
        return tuple((Counter(other.exponents) - Counter(self.exponents)).elements())


@dataclass(frozen=True)
class SeriesPrefix:
    coefficients: tuple[Fraction, ...]

    @property
    def horizon(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n):
        return self.coefficients[n]

    def __len__(self):
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def as_ints(self) -> list[int]:
        out = []
        for c in self.coefficients:
            if c.denominator != 1:
                raise ValueError(f"non-integral coefficient {c}")
            out.append(int(c))
        return out


@dataclass(frozen=True)
class HilbertExpr:
    """The rational function numer / prod (1 - t^e)."""

    numer: Poly
    denom: CycloDenominator = CycloDenominator()

    @classmethod
    def of(cls, numer, exps: Iterable[int] = ()) -> "HilbertExpr":
        return cls(_as_poly(numer), CycloDenominator(tuple(exps)))

    def over(self, target: CycloDenominator) -> Poly:
        """Numerator after rewriting over a denominator that self.denom divides."""
        extra = self.denom.missing_from(target)
        if len(extra) + len(self.denom.exponents) != len(target.exponents):
            raise ValueError("target does not contain this denominator")
        return self.numer.mul_binomials(extra)

    def __add__(self, other):
        return expr_add(self, _as_expr(other))

    __radd__ = __add__

    def __neg__(self):
        return HilbertExpr(-self.numer, self.denom)

    def __sub__(self, other):
        return expr_add(self, -_as_expr(other))

    def __rsub__(self, other):
        return _as_expr(other) - self

    def __mul__(self, other):
        if isinstance(other, HilbertExpr):
            return HilbertExpr(
                self.numer * other.numer,
                CycloDenominator(self.denom.exponents + other.denom.exponents),
            )
        return HilbertExpr(self.numer * _as_poly(other), self.denom)

    __rmul__ = __mul__

    def equals(self, other: "HilbertExpr") -> bool:
        """Exact equality by cross-multiplication."""
        other = _as_expr(other)
        return self.numer.mul_binomials(other.denom.exponents) == other.numer.mul_binomials(
            self.denom.exponents
        )

    def __eq__(self, other):
        if isinstance(other, (HilbertExpr, Poly, int, Fraction)):
            return self.equals(_as_expr(other))
        return NotImplemented

    __hash__ = None

    def expand(self, horizon: int) -> SeriesPrefix:
        return expr_expand(self, horizon)


def _as_expr(x) -> HilbertExpr:
    if isinstance(x, HilbertExpr):
        return x
    return HilbertExpr(_as_poly(x))


def expr_add(a: HilbertExpr, b: HilbertExpr) -> HilbertExpr:
    """Exact sum over the multiset lcm of the two denominators."""
    d = a.denom.lcm(b.denom)
    return HilbertExpr(a.over(d) + b.over(d), d)


def expr_expand(e: HilbertExpr, horizon: int) -> SeriesPrefix:
    """Coefficients 0..horizon of the power series expansion."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    ints, den = _scale_to_ints(e.numer.coeffs)
    a = (ints + [0] * (horizon + 1))[: horizon + 1]
    for w in e.denom.exponents:
        for n in range(w, horizon + 1):
            a[n] += a[n - w]
    return SeriesPrefix(tuple(Fraction(c, den) for c in a))


def clear_denominator(e: HilbertExpr, weights) -> Poly:
    """numer(e) * prod(1 - t^w) / denom(e), which must be a polynomial."""
    if isinstance(weights, CycloDenominator):
        weights = weights.exponents
    w = Counter(weights)
    d = Counter(e.denom.exponents)
    common = w & d
    top = e.numer.mul_binomials(tuple((w - common).elements()))
    return top.div_binomials(tuple((d - common).elements()))
