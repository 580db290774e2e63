"""Exact arithmetic in cyclotomic fields Q(zeta_N).

A value is stored by its coordinates in the power basis
``1, z, ..., z^(phi(N)-1)`` with ``z = exp(2 pi i / N)``. Intermediate work
happens in the group ring Q[x]/(x^N - 1), which maps onto Q(zeta_N) by
reduction modulo the N-th cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_div(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            out[k - dd] = c
            for j in range(dd + 1):
                num[k - dd + j] -= c * den[j]
    if any(num[:dd]):
        raise ArithmeticError("polynomial division left a remainder")
    return out


def phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def reduce_ring(vec: Sequence, n: int) -> tuple:
    """Reduce a group-ring vector of length ``n`` to power-basis coordinates."""
    poly = cyclotomic_poly(n)
    deg = len(poly) - 1
    v = list(vec)
    for k in range(len(v) - 1, deg - 1, -1):
        c = v[k]
        if c:
            base = k - deg
            for j in range(deg):
                if poly[j]:
                    v[base + j] -= c * poly[j]
            v[k] = 0
    return tuple(v[:deg])


class Cyclotomic:
    """An element of Q(zeta_N), immutable."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != phi(conductor):
            raise ValueError("coefficient vector has the wrong length")
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def from_ring(cls, n: int, vec: Sequence) -> "Cyclotomic":
        if len(vec) != n:
            raise ValueError("group-ring vector must have length n")
        return cls(n, reduce_ring([Fraction(c) for c in vec], n))

    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls(1, (Fraction(q),))

    @classmethod
    def root(cls, n: int, k: int = 1) -> "Cyclotomic":
        vec = [0] * n
        vec[k % n] = 1
        return cls.from_ring(n, vec)

    @classmethod
    def coerce(cls, x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Rational)):
            return cls.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyclotomic")

    # representations ----------------------------------------------------

    def ring_vector(self, n: int | None = None) -> list[Fraction]:
        """Coordinates as a group-ring vector of length ``n`` (a multiple of
        the conductor)."""
        n = self.conductor if n is None else n
        if n % self.conductor:
            raise ValueError(f"{n} is not a multiple of conductor {self.conductor}")
        step = n // self.conductor
        vec = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            vec[k * step] = c
        return vec

    def lift(self, n: int) -> "Cyclotomic":
        if n == self.conductor:
            return self
        return Cyclotomic.from_ring(n, self.ring_vector(n))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * math.pi / self.conductor)
        return sum((float(c) * z**k for k, c in enumerate(self.coeffs) if c), 0j)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def is_integral(self) -> bool:
        """True when all coordinates are integers (an algebraic integer)."""
        return all(c.denominator == 1 for c in self.coeffs)

    # arithmetic ---------------------------------------------------------

    def _common(self, other) -> tuple[int, list, list]:
        other = Cyclotomic.coerce(other)
        n = math.lcm(self.conductor, other.conductor)
        return n, self.ring_vector(n), other.ring_vector(n)

    def __add__(self, other):
        try:
            n, a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return Cyclotomic.from_ring(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        try:
            return self + (-Cyclotomic.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return Cyclotomic.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return Cyclotomic(self.conductor, [c * q for c in self.coeffs])
        try:
            n, a, b = self._common(other)
        except TypeError:
            return NotImplemented
        out = [Fraction(0)] * n
        nz_b = [(j, y) for j, y in enumerate(b) if y]
        for i, x in enumerate(a):
            if x:
                for j, y in nz_b:
                    out[(i + j) % n] += x * y
        return Cyclotomic.from_ring(n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return Cyclotomic(self.conductor, [c / q for c in self.coeffs])
        return NotImplemented

    def conj(self) -> "Cyclotomic":
        n = self.conductor
        vec = self.ring_vector()
        out = [Fraction(0)] * n
        for k, c in enumerate(vec):
            out[(-k) % n] += c
        return Cyclotomic.from_ring(n, out)

    def real_part(self) -> "Cyclotomic":
        return (self + self.conj()) / 2

    def galois(self, k: int) -> "Cyclotomic":
        """Apply the automorphism ``zeta -> zeta**k`` (``k`` coprime to N)."""
        n = self.conductor
        if math.gcd(k, n) != 1:
            raise ValueError("exponent must be coprime to the conductor")
        vec = self.ring_vector()
        out = [Fraction(0)] * n
        for j, c in enumerate(vec):
            out[(j * k) % n] += c
        return Cyclotomic.from_ring(n, out)

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        try:
            _, a, b = self._common(other)
        except TypeError:
            return NotImplemented
        n = len(a)
        return reduce_ring(a, n) == reduce_ring(b, n)

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        z = self.to_complex()
        return hash((round(z.real, 6), round(z.imag, 6)))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.coeffs[0]})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*z{self.conductor}^{k}" if k else f"{c}")
        return "Cyclotomic(" + " + ".join(terms) + ")"


def root_over_one_minus_root(n: int, t: int) -> list[Fraction]:
    """Group-ring vector (length ``n``) of ``w / (1 - w)`` with ``w = zeta_n^t != 1``.

    Uses ``1/(1-w) = -(1/d) * sum_{k<d} k w^k`` for ``w`` of order ``d``.
    """
    t %= n
    if t == 0:
        raise ZeroDivisionError("w = 1")
    d = n // math.gcd(n, t)
    vec = [Fraction(0)] * n
    for k in range(1, d):
        vec[(t * (k + 1)) % n] -= Fraction(k, d)
    return vec
