"""Exact elements of cyclotomic fields Q(zeta_M).

Orbital integrals in this library are rational multiples of roots of unity
(times powers of q), so every value is kept as a vector of Fractions in the
power basis 1, z, ..., z^(phi(M)-1) of Q(z), z = exp(2 pi i / M).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # Both monic-ish integer polynomials, low degree first; den divides num.
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // lead
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def _reduce(coeffs: list, order: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_poly(order)
    deg = len(phi) - 1
    c = [Fraction(x) for x in coeffs]
    for i in range(len(c) - 1, deg - 1, -1):
        lead = c[i]
        if lead:
            shift = i - deg
            for j, pj in enumerate(phi):
                if pj:
                    c[shift + j] -= lead * pj
    c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
    return tuple(c)


class Cyclo:
    """An element of Q(zeta_order), stored reduced modulo Phi_order."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order
        if len(coeffs) == euler_phi(order) and all(isinstance(x, Fraction) for x in coeffs):
            self.coeffs = tuple(coeffs)
        else:
            self.coeffs = _reduce(list(coeffs), order)

    # construction helpers
    @classmethod
    def rational(cls, x) -> "Cyclo":
        return cls(1, [Fraction(x)])

    @classmethod
    def zeta(cls, order: int, k: int = 1) -> "Cyclo":
        k %= order
        c = [0] * order
        c[k] = 1
        return cls(order, c)

    @classmethod
    def from_histogram(cls, order: int, counts: Iterable, scale=1) -> "Cyclo":
        """sum_k counts[k] * zeta_order^k, times a rational scale."""
        s = Fraction(scale)
        c = [s * int(x) for x in counts]
        if len(c) != order:
            raise ValueError("histogram length must equal the order")
        return cls(order, c)

    # field embedding
    def lift(self, order: int) -> "Cyclo":
        if order % self.order:
            raise ValueError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        if order == self.order:
            return self
        step = order // self.order
        c = [Fraction(0)] * order
        for i, a in enumerate(self.coeffs):
            c[i * step] = a
        return Cyclo(order, c)

    def _common(self, other) -> tuple["Cyclo", "Cyclo"]:
        if not isinstance(other, Cyclo):
            other = Cyclo.rational(other)
        m = _lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    # arithmetic
    def __add__(self, other):
        a, b = self._common(other)
        return Cyclo(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclo) else Cyclo.rational(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            f = Fraction(other)
            return Cyclo(self.order, [x * f for x in self.coeffs])
        a, b = self._common(other)
        n = len(a.coeffs)
        prod = [Fraction(0)] * max(1, 2 * n - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclo(a.order, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Cyclo):
            if other.is_rational():
                other = other.coeffs[0]
            else:
                return self * other.inverse_root_of_unity()
        f = Fraction(other)
        return Cyclo(self.order, [x / f for x in self.coeffs])

    def inverse_root_of_unity(self) -> "Cyclo":
        """Inverse of a scalar multiple of a root of unity zeta^k."""
        for k in range(self.order):
            z = Cyclo.zeta(self.order, k)
            if (self * z).is_rational():
                r = (self * z).coeffs[0]
                if r == 0:
                    break
                return z / r
        raise ZeroDivisionError("only rational multiples of roots of unity are inverted")

    def conjugate(self) -> "Cyclo":
        """Complex conjugation zeta -> zeta^-1."""
        c = [Fraction(0)] * self.order
        for i, a in enumerate(self.coeffs):
            c[(-i) % self.order] += a
        return Cyclo(self.order, c)

    # predicates
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def root_of_unity_exponent(self) -> tuple[int, int] | None:
        """(M, k) if self equals zeta_M^k exactly, else None."""
        for k in range(self.order):
            if self == Cyclo.zeta(self.order, k):
                return self.order, k
        return None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(other)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # equality crosses orders, so no cheap canonical hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        terms = []
        for i, a in enumerate(self.coeffs):
            if a:
                terms.append(f"{a}" if i == 0 else f"{a}*z{self.order}^{i}")
        return " + ".join(terms)

    def to_record(self) -> dict:
        return {"order": self.order, "coeffs": [str(x) for x in self.coeffs]}


ZERO = Cyclo.rational(0)
ONE = Cyclo.rational(1)
