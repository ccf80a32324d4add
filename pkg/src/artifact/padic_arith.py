"""Truncated unramified local rings O_E / p^N.

O_E = Z_p[x]/(f) for a monic f of degree e that is irreducible mod p.  The
uniformizer is the rational prime p on every layer.  Elements are e-tuples of
integers modulo p^N in the power basis of x.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import DegreeMismatch, NotAUnit, PrecisionExhausted, SpecMismatch, ZeroElement

# Conway polynomials (monic, coefficients low -> high without the leading 1).
_CONWAY = {
    (2, 2): (1, 1), (2, 3): (1, 1, 0), (2, 4): (1, 1, 0, 0),
    (3, 2): (2, 2), (3, 3): (1, 2, 0), (3, 4): (2, 0, 0, 2), (3, 6): (2, 2, 1, 0, 2, 0),
    (5, 2): (2, 4), (5, 3): (3, 3, 0), (7, 2): (3, 6), (7, 3): (4, 0, 6),
    (11, 2): (2, 7), (13, 2): (2, 12),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


def _poly_irreducible_mod_p(low: Sequence[int], p: int) -> bool:
    """Brute-force irreducibility of the monic x^e + low over F_p (small e only)."""
    e = len(low)
    if e == 1:
        return True
    # no root and, for degree <= 3, no root implies irreducible; check factors up to e//2 otherwise
    f = list(low) + [1]
    for d in range(1, e // 2 + 1):
        for g_low in itertools.product(range(p), repeat=d):
            g = list(g_low) + [1]
            r = f[:]
            for i in range(len(r) - len(g), -1, -1):
                c = r[i + d] % p
                if c:
                    for j, gj in enumerate(g):
                        r[i + j] = (r[i + j] - c * gj) % p
            if not any(x % p for x in r[:d]):
                return False
    return True


def default_modulus(p: int, e: int) -> tuple[int, ...]:
    """Conway polynomial when tabulated, else the lexicographically first irreducible."""
    if e == 1:
        return (0,)
    if (p, e) in _CONWAY:
        return _CONWAY[(p, e)]
    for low in itertools.product(range(p), repeat=e):
        if low[0] and _poly_irreducible_mod_p(low, p):
            return tuple(low)
    raise ValueError(f"no irreducible polynomial of degree {e} mod {p}")


@dataclass(frozen=True)
class LocalRingSpec:
    """O_E/p^N with E/F unramified of degree e; modulus lists the non-leading coefficients."""

    p: int
    e: int
    N: int
    modulus: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.e < 1 or self.N < 1:
            raise ValueError("degree and precision must be positive")
        if not self.modulus:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.e))
        mod = tuple(int(c) % self.p ** self.N for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.e:
            raise ValueError("modulus must have degree e")
        if not _poly_irreducible_mod_p([c % self.p for c in mod], self.p):
            raise ValueError("modulus is reducible mod p")

    @property
    def pN(self) -> int:
        return self.p ** self.N

    @property
    def q(self) -> int:
        """Residue field size of this layer."""
        return self.p ** self.e

    def with_precision(self, N: int) -> "LocalRingSpec":
        return LocalRingSpec(self.p, self.e, N, tuple(c % self.p ** N for c in self.modulus))

    # -- element factories ---------------------------------------------------
    def element(self, coeffs) -> "TruncatedElement":
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        c = [int(x) % self.pN for x in coeffs]
        if len(c) > self.e:
            c = _poly_reduce(c, self)
        c = tuple(c) + (0,) * (self.e - len(c))
        return TruncatedElement(self, c)

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def gen(self):
        """The class of x (a root of the modulus)."""
        return self.element((0, 1)) if self.e > 1 else self.element(0)

    def random(self, rng: random.Random, unit: bool = False, min_val: int = 0):
        while True:
            a = self.element([rng.randrange(self.pN) for _ in range(self.e)])
            a = a * self.element(self.p ** min_val) if min_val else a
            if not unit or a.valuation == 0:
                return a

    def residue_reps(self) -> list["TruncatedElement"]:
        """Representatives of the residue field k_E (digits in 0..p-1)."""
        return [self.element(c) for c in itertools.product(range(self.p), repeat=self.e)]

    def elements_mod(self, k: int) -> list["TruncatedElement"]:
        """Representatives of O_E / p^k."""
        pk = self.p ** k
        return [self.element(c) for c in itertools.product(range(pk), repeat=self.e)]

    def units_mod(self, k: int) -> list["TruncatedElement"]:
        return [a for a in self.elements_mod(k) if a.valuation == 0]

    # -- Frobenius -----------------------------------------------------------
    @cached_property
    def frobenius_root(self) -> tuple[int, ...]:
        """Coefficients of theta(x): the root of the modulus congruent to x^p mod p."""
        if self.e == 1:
            return (0,)
        x = self.gen()
        r = x ** self.p
        # reduce to the residue approximation then Newton-lift
        r = self.element([c % self.p for c in r.coeffs])
        f = lambda y: _eval_modulus(self, y)
        df = lambda y: _eval_modulus_derivative(self, y)
        for _ in range(self.N.bit_length() + 2):
            r = r - f(r) * df(r).inverse()
        if f(r).valuation < self.N:
            raise PrecisionExhausted("Hensel lift of the Frobenius root failed")
        return r.coeffs

    @cached_property
    def frobenius_matrix(self) -> tuple[tuple[int, ...], ...]:
        """Columns j: coefficients of theta(x)^j."""
        if self.e == 1:
            return ((1,),)
        root = TruncatedElement(self, self.frobenius_root)
        cols, acc = [], self.one()
        for _ in range(self.e):
            cols.append(acc.coeffs)
            acc = acc * root
        return tuple(cols)

    def to_record(self) -> dict:
        return {"p": self.p, "e": self.e, "N": self.N, "modulus": list(self.modulus)}

    @classmethod
    def from_record(cls, rec: dict) -> "LocalRingSpec":
        return cls(int(rec["p"]), int(rec["e"]), int(rec["N"]), tuple(int(c) for c in rec["modulus"]))


def _poly_reduce(c: list[int], spec: LocalRingSpec) -> list[int]:
    e, pN, mod = spec.e, spec.pN, spec.modulus
    c = list(c)
    for i in range(len(c) - 1, e - 1, -1):
        lead = c[i]
        if lead:
            for j in range(e):
                c[i - e + j] = (c[i - e + j] - lead * mod[j]) % pN
        c[i] = 0
    return [x % pN for x in c[:e]]


def _eval_modulus(spec, y):
    acc = spec.one()
    out = spec.zero()
    for c in spec.modulus:
        out = out + acc * spec.element(c)
        acc = acc * y
    return out + acc


def _eval_modulus_derivative(spec, y):
    acc = spec.one()
    out = spec.zero()
    for k in range(1, spec.e):
        out = out + acc * spec.element(k * spec.modulus[k])
        acc = acc * y
    return out + acc * spec.element(spec.e)


def _int_val(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


class TruncatedElement:
    """Immutable element of O_E/p^N."""

    __slots__ = ("spec", "coeffs", "_val")

    def __init__(self, spec: LocalRingSpec, coeffs: tuple[int, ...]):
        self.spec = spec
        self.coeffs = coeffs
        self._val = None

    @property
    def valuation(self) -> int:
        """Minimum p-adic valuation of the coefficients; N means zero at this precision."""
        if self._val is None:
            N = self.spec.N
            self._val = min(_int_val(c, self.spec.p, N) for c in self.coeffs)
        return self._val

    def is_zero(self) -> bool:
        return self.valuation >= self.spec.N

    def _check(self, other):
        if isinstance(other, int):
            return self.spec.element(other)
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")
        return other

    def __add__(self, other):
        other = self._check(other)
        pN = self.spec.pN
        return TruncatedElement(self.spec, tuple((a + b) % pN for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.spec.pN
        return TruncatedElement(self.spec, tuple((-a) % pN for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        e = self.spec.e
        if e == 1:
            return TruncatedElement(self.spec, ((self.coeffs[0] * other.coeffs[0]) % self.spec.pN,))
        prod = [0] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return TruncatedElement(self.spec, tuple(_poly_reduce(prod, self.spec)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.spec.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec.element(other)
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec, self.coeffs))

    def __repr__(self):
        if self.spec.e == 1:
            return f"{self.coeffs[0]}"
        return "(" + ",".join(map(str, self.coeffs)) + ")"

    def inverse(self) -> "TruncatedElement":
        if self.valuation != 0:
            raise NotAUnit(f"{self} has valuation {self.valuation}")
        spec = self.spec
        if spec.e == 1:
            return spec.element(pow(self.coeffs[0], -1, spec.pN))
        # a^(q-2) inverts a mod p; Newton doubles the correct digits each step
        b = self ** (spec.q - 2)
        two = spec.element(2)
        for _ in range(spec.N.bit_length() + 1):
            b = b * (two - self * b)
        return b

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def is_base(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_base():
            raise DegreeMismatch("element is not in the base ring")
        return self.coeffs[0]


def ring_arithmetic(a: TruncatedElement, b: TruncatedElement | None, op: str) -> TruncatedElement:
    """Dispatch add / mul / neg / inv, raising SpecMismatch or NotAUnit as appropriate."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def frobenius(a: TruncatedElement, power: int = 1) -> TruncatedElement:
    spec = a.spec
    k = power % spec.e
    if k == 0:
        return a
    F = spec.frobenius_matrix
    pN = spec.pN
    c = a.coeffs
    for _ in range(k):
        c = tuple(sum(F[j][i] * c[j] for j in range(spec.e)) % pN for i in range(spec.e))
    return TruncatedElement(spec, c)


def norm_to_fixed(a: TruncatedElement, subdegree: int = 1) -> TruncatedElement:
    """Norm from E down to the subfield of degree `subdegree` over the base."""
    e = a.spec.e
    if subdegree < 1 or e % subdegree:
        raise DegreeMismatch(f"subdegree {subdegree} does not divide {e}")
    out = a.spec.one()
    for i in range(e // subdegree):
        out = out * frobenius(a, i * subdegree)
    if frobenius(out, subdegree) != out:
        raise PrecisionExhausted("norm is not fixed by the subfield Frobenius")
    return out


def trace_to_fixed(a: TruncatedElement, subdegree: int = 1) -> TruncatedElement:
    e = a.spec.e
    if subdegree < 1 or e % subdegree:
        raise DegreeMismatch(f"subdegree {subdegree} does not divide {e}")
    out = a.spec.zero()
    for i in range(e // subdegree):
        out = out + frobenius(a, i * subdegree)
    return out


def unit_decompose(a: TruncatedElement) -> tuple[int, TruncatedElement]:
    """Write a = p^v * unit.  The unit is only meaningful modulo p^(N-v)."""
    v = a.valuation
    if v >= a.spec.N:
        raise ZeroElement("element is zero at this precision")
    pv = a.spec.p ** v
    return v, TruncatedElement(a.spec, tuple(c // pv for c in a.coeffs))


def divide_by_p_power(a: TruncatedElement, k: int) -> TruncatedElement:
    """Exact division by p^k; the top k digits of the result are unknown and set to zero."""
    if k == 0:
        return a
    if a.valuation < k:
        raise PrecisionExhausted(f"valuation {a.valuation} < {k}")
    pk = a.spec.p ** k
    return TruncatedElement(a.spec, tuple(c // pk for c in a.coeffs))


def reduce_precision(a: TruncatedElement, N: int) -> TruncatedElement:
    return a.spec.with_precision(N).element(a.coeffs)


@dataclass(frozen=True)
class ExtensionTower:
    """A base layer O_F (degree 1) together with unramified layers of given degrees."""

    p: int
    N: int
    degrees: tuple[int, ...]

    def layer(self, degree: int) -> LocalRingSpec:
        if degree not in self.degrees and degree != 1:
            raise DegreeMismatch(f"degree {degree} not in the tower")
        return _layer(self.p, degree, self.N)

    def embed(self, a: TruncatedElement, degree: int) -> TruncatedElement:
        """Embed an element of a lower layer into the layer of the given degree."""
        src = a.spec
        if degree % src.e:
            raise DegreeMismatch(f"{src.e} does not divide {degree}")
        tgt = self.layer(degree)
        if src.e == 1:
            return tgt.element(a.coeffs[0])
        img = _embedding_root(self.p, src.e, degree, self.N)
        y = TruncatedElement(tgt, img)
        out, acc = tgt.zero(), tgt.one()
        for c in a.coeffs:
            out = out + acc * c
            acc = acc * y
        return out


@lru_cache(maxsize=None)
def _layer(p: int, e: int, N: int) -> LocalRingSpec:
    return LocalRingSpec(p, e, N)


@lru_cache(maxsize=None)
def _embedding_root(p: int, d: int, e: int, N: int) -> tuple[int, ...]:
    """A root in O_{E_e} of the degree-d modulus, Hensel-lifted from a residue root."""
    src, tgt = _layer(p, d, N), _layer(p, e, N)
    f = lambda y: _poly_eval_over(src.modulus, y)
    df = lambda y: _poly_deriv_eval_over(src.modulus, y)
    for r in tgt.residue_reps():
        if f(r).valuation >= 1:
            for _ in range(N.bit_length() + 2):
                r = r - f(r) * df(r).inverse()
            return r.coeffs
    raise DegreeMismatch("no residue root found")


def _poly_eval_over(low, y):
    spec = y.spec
    out, acc = spec.zero(), spec.one()
    for c in low:
        out = out + acc * c
        acc = acc * y
    return out + acc


def _poly_deriv_eval_over(low, y):
    spec = y.spec
    out, acc = spec.zero(), spec.one()
    for k in range(1, len(low)):
        out = out + acc * (k * low[k])
        acc = acc * y
    return out + acc * len(low)


def teichmuller(a: TruncatedElement) -> TruncatedElement:
    """Teichmuller lift of the residue class of a unit."""
    if a.valuation != 0:
        raise NotAUnit("Teichmuller lift needs a unit")
    q = a.spec.q
    t = a
    for _ in range(a.spec.N + 1):
        t = t ** q
    return t
