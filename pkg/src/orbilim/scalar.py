"""Exact scalars: rationals and finite rational combinations of square roots.

``Rational`` is :class:`fractions.Fraction`.  ``RadicalScalar`` stores
``sum(q_r * sqrt(r))`` with squarefree positive radicands ``r``.
"""
from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

Rational = Fraction
Number = Union[int, Fraction, "RadicalScalar"]


@lru_cache(maxsize=65536)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` squarefree."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, r = 1, 1
    p = 2
    m = n
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            s *= p ** (e // 2)
            if e % 2:
                r *= p
        p += 1 if p == 2 else 2
    r *= m
    return s, r


class RadicalScalar:
    """An element of the rational span of square roots of positive integers.

    Instances are immutable and hashable; the term map is kept in a unique
    normal form so ``==`` is exact structural equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Fraction] | None = None):
        norm: dict[int, Fraction] = {}
        for r, q in (terms or {}).items():
            q = Fraction(q)
            if q == 0:
                continue
            s, rr = squarefree_split(int(r))
            norm[rr] = norm.get(rr, Fraction(0)) + q * s
        self._terms = tuple(sorted((r, q) for r, q in norm.items() if q != 0))
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, items: dict[int, Fraction]) -> "RadicalScalar":
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((r, q) for r, q in items.items() if q != 0))
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x: Number) -> "RadicalScalar":
        if isinstance(x, RadicalScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw({1: Fraction(x)})
        raise TypeError(f"cannot coerce {type(x).__name__} to RadicalScalar")

    @classmethod
    def sqrt(cls, n: int) -> "RadicalScalar":
        return sqrt_of_rational(Fraction(n))

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(r == 1 for r, _ in self._terms)

    def rational_part(self) -> Fraction:
        return dict(self._terms).get(1, Fraction(0))

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    # arithmetic
    def __add__(self, other: Number) -> "RadicalScalar":
        try:
            other = RadicalScalar.coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for r, q in other._terms:
            acc[r] = acc.get(r, Fraction(0)) + q
        return RadicalScalar._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "RadicalScalar":
        return RadicalScalar._raw({r: -q for r, q in self._terms})

    def __sub__(self, other: Number) -> "RadicalScalar":
        try:
            other = RadicalScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "RadicalScalar":
        return RadicalScalar.coerce(other) - self

    def __mul__(self, other: Number) -> "RadicalScalar":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return RadicalScalar._raw({r: q * other for r, q in self._terms})
        if not isinstance(other, RadicalScalar):
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for r1, q1 in self._terms:
            for r2, q2 in other._terms:
                g = math.gcd(r1, r2)
                # sqrt(r1)*sqrt(r2) = g*sqrt(r1*r2/g^2); both squarefree
                r = (r1 // g) * (r2 // g)
                acc[r] = acc.get(r, Fraction(0)) + q1 * q2 * g
        return RadicalScalar._raw(acc)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "RadicalScalar":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, RadicalScalar):
            return self * other.inverse()
        return NotImplemented

    def inverse(self) -> "RadicalScalar":
        """Multiplicative inverse; supported for single-term scalars."""
        if len(self._terms) != 1:
            if self.is_zero():
                raise ZeroDivisionError("inverse of zero")
            raise ValueError("inverse only supported for monomial radicals")
        r, q = self._terms[0]
        # 1/(q sqrt r) = sqrt(r) / (q r)
        return RadicalScalar._raw({r: 1 / (q * r)})

    def square(self) -> "RadicalScalar":
        return self * self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RadicalScalar.coerce(other)
        if not isinstance(other, RadicalScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rational_part()) if self.is_rational() else hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def sign(self) -> int:
        """Exact sign, decided by evaluating at increasing precision."""
        if self.is_zero():
            return 0
        digits = 30
        while True:
            v = self.to_decimal(digits)
            if abs(v) > Decimal(10) ** (-digits + 5):
                return 1 if v > 0 else -1
            digits *= 2

    # evaluation
    def to_decimal(self, precision: int = 30) -> Decimal:
        if precision < 1:
            raise ValueError("precision must be >= 1")
        with localcontext() as ctx:
            ctx.prec = precision + 10 + 2 * len(self._terms)
            total = Decimal(0)
            for r, q in self._terms:
                root = Decimal(r).sqrt() if r != 1 else Decimal(1)
                total += Decimal(q.numerator) / Decimal(q.denominator) * root
            return +total

    def __float__(self) -> float:
        return float(self.to_decimal(25))

    def to_json(self) -> dict:
        return {
            "terms": [{"radicand": r, "num": str(q.numerator), "den": str(q.denominator)}
                      for r, q in self._terms],
            "float": float(self),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RadicalScalar":
        return cls({int(t["radicand"]): Fraction(int(t["num"]), int(t["den"]))
                    for t in obj["terms"]})

    def __repr__(self) -> str:
        return f"RadicalScalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for r, q in self._terms:
            if r == 1:
                parts.append(str(q))
            elif q == 1:
                parts.append(f"sqrt({r})")
            else:
                parts.append(f"{q}*sqrt({r})")
        return " + ".join(parts).replace("+ -", "- ")


ZERO = RadicalScalar()
ONE = RadicalScalar({1: Fraction(1)})


def sqrt_of_rational(q: Fraction | int) -> RadicalScalar:
    """Exact square root of a nonnegative rational: sqrt(a/b) = sqrt(ab)/b."""
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"square root of negative rational {q}")
    if q == 0:
        return ZERO
    a, b = q.numerator, q.denominator
    return RadicalScalar({a * b: Fraction(1, b)})


def radical_arithmetic(a: Number, b: Number, op: str):
    """Dispatch ``add``, ``mul`` or ``eq`` on two exact scalars."""
    a, b = RadicalScalar.coerce(a), RadicalScalar.coerce(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown op {op!r}")


def to_float(a: Number, precision: int = 17) -> float:
    """Float approximation of ``a`` accurate to ``precision`` decimal digits."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    return float(RadicalScalar.coerce(a).to_decimal(max(precision, 17)))


def parse_rational(text: str | int | float | Fraction) -> Fraction:
    if isinstance(text, float):
        raise TypeError("floats are not exact; pass a string such as '1/2'")
    return Fraction(text)
