"""Exact dyadic rationals ``num / 2**exp``.

Finite probabilistic trees only ever produce dyadic values, so all
probability arithmetic stays exact and equality never needs a tolerance.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction


@functools.total_ordering
@dataclass(frozen=True)
class Dyadic:
    num: int
    exp: int = 0

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("exponent must be non-negative")
        num, exp = self.num, self.exp
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def of(cls, x) -> Dyadic:
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        frac = Fraction(x)
        den = frac.denominator
        if den & (den - 1):
            raise ValueError(f"{x} is not dyadic")
        return cls(frac.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        text = text.strip()
        m = re.fullmatch(r"(-?\d+)/2\^(\d+)", text)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        return cls.of(Fraction(text))

    def _aligned(self, other: Dyadic) -> tuple[int, int, int]:
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        other = Dyadic.of(other)
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = Dyadic.of(other)
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        return Dyadic.of(other) - self

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __mul__(self, other):
        other = Dyadic.of(other)
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def half(self) -> Dyadic:
        return Dyadic(self.num, self.exp + 1)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __lt__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def __hash__(self):
        return hash((self.num, self.exp))

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self):
        return self.num / (1 << self.exp)

    def __str__(self):
        return f"{self.num}/2^{self.exp}"

    def __repr__(self):
        return f"Dyadic({self.num}/2^{self.exp})"


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)
