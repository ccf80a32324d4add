"""Characters of the maximal compact torus with exact root-of-unity values.

A character of (O_E/p^c)^x is stored by its exponents on a fixed generating
set: a Teichmuller generator of the residue multiplicative group and the
elements 1 + p x^j.  A character of ^0T is one such character per torus
coordinate; the coordinates are fixed per catalog group (see `torus_coords`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable, Sequence

from .errors import NotInDomain, WrongBlock
from .padic_arith import LocalRingSpec, TruncatedElement, frobenius, norm_to_fixed, teichmuller
from .root_data import (
    BasedRootDatum,
    WeylElement,
    coords_of_cochar,
    weyl_fixed_by_h,
    weyl_generate,
)
from .scalars import Cyclo


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class RootOfUnityValue:
    order: int
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % self.order)

    def __mul__(self, other: "RootOfUnityValue") -> "RootOfUnityValue":
        m = _lcm(self.order, other.order)
        return RootOfUnityValue(m, self.exponent * (m // self.order) + other.exponent * (m // other.order))

    def inverse(self) -> "RootOfUnityValue":
        return RootOfUnityValue(self.order, -self.exponent)

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_cyclo(self) -> Cyclo:
        return Cyclo.zeta(self.order, self.exponent)

    def __eq__(self, other):
        if not isinstance(other, RootOfUnityValue):
            return NotImplemented
        m = _lcm(self.order, other.order)
        return self.exponent * (m // self.order) % m == other.exponent * (m // other.order) % m

    def __hash__(self):
        from fractions import Fraction
        return hash(Fraction(self.exponent, self.order))


# ---------------------------------------------------------------------------
# unit groups (O_E / p^c)^x
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitGroup:
    p: int
    e: int
    c: int
    generators: tuple[tuple[int, ...], ...]
    orders: tuple[int, ...]
    table: dict = field(compare=False, hash=False, repr=False)

    @property
    def spec(self) -> LocalRingSpec:
        return LocalRingSpec(self.p, self.e, self.c)

    def dlog(self, a: TruncatedElement) -> tuple[int, ...]:
        key = tuple(x % self.p ** self.c for x in a.coeffs)
        try:
            return self.table[key]
        except KeyError:
            raise NotInDomain(f"{a} is not a unit") from None


@lru_cache(maxsize=None)
def unit_group(p: int, e: int, c: int) -> UnitGroup:
    """Generators and a full discrete-log table of (O_E/p^c)^x (p odd)."""
    if p == 2:
        raise NotInDomain("unit group tables need odd p")
    spec = LocalRingSpec(p, e, c)
    q = p ** e
    # a lift of a generator of the residue multiplicative group, made Teichmuller
    omega = None
    for r in spec.residue_reps():
        if r.valuation != 0:
            continue
        t = teichmuller(r)
        ok = all((t ** ((q - 1) // ell)) != spec.one() for ell in _prime_factors(q - 1))
        if ok:
            omega = t
            break
    gens = [omega]
    orders = [q - 1]
    for j in range(e):
        if c >= 2:
            g = spec.element([1 if k == 0 else 0 for k in range(e)]) + spec.element(
                [p if k == j else 0 for k in range(e)]
            )
            gens.append(g)
            orders.append(p ** (c - 1))
    table: dict = {}
    # breadth over exponent vectors
    powers = []
    for g, n in zip(gens, orders):
        acc, lst = spec.one(), []
        for _ in range(n):
            lst.append(acc)
            acc = acc * g
        powers.append(lst)
    for exps in itertools.product(*[range(n) for n in orders]):
        x = spec.one()
        for k, ex in enumerate(exps):
            x = x * powers[k][ex]
        if x.coeffs in table:
            raise ArithmeticError("generators are not independent")
        table[x.coeffs] = exps
    expected = (q - 1) * q ** (c - 1)
    if len(table) != expected:
        raise ArithmeticError("unit group enumeration is incomplete")
    return UnitGroup(p, e, c, tuple(g.coeffs for g in gens), tuple(orders), table)


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class UnitCharacter:
    """A character of O_E^x trivial on 1 + p^level, by exponents of zeta_order on the generators."""

    p: int
    e: int
    level: int
    order: int
    images: tuple[int, ...]

    def __post_init__(self):
        G = unit_group(self.p, self.e, self.level)
        if len(self.images) != len(G.orders):
            raise ValueError(f"expected {len(G.orders)} generator images")
        for im, n in zip(self.images, G.orders):
            if (im * n) % self.order:
                raise ValueError("generator image is not compatible with the generator order")

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.p, self.e, self.level)

    def exponent(self, a: TruncatedElement) -> int:
        """k with chi(a) = zeta_order^k."""
        G = self.group
        spec = G.spec
        a = spec.element([x for x in a.coeffs]) if a.spec.e == self.e else None
        if a is None:
            raise NotInDomain("unit lies in the wrong ring")
        ex = G.dlog(a)
        return sum(i * x for i, x in zip(self.images, ex)) % self.order

    def __call__(self, a: TruncatedElement) -> RootOfUnityValue:
        return RootOfUnityValue(self.order, self.exponent(a))

    @property
    def conductor(self) -> int:
        """Least l >= 1 with the character trivial on 1 + p^l."""
        spec = LocalRingSpec(self.p, self.e, self.level + 1)
        for l in range(1, self.level + 1):
            if all(self.exponent(g) == 0 for g in _filtration_gens(spec, l)):
                return l
        return self.level

    def at_level(self, level: int) -> "UnitCharacter":
        """Re-express on (O_E/p^level)^x (level at least the conductor)."""
        if level == self.level:
            return self
        G = unit_group(self.p, self.e, level)
        spec = G.spec
        if level < self.conductor:
            raise ValueError("level below the conductor")
        imgs = tuple(self.exponent(spec.element(g)) for g in G.generators)
        return UnitCharacter(self.p, self.e, level, self.order, imgs)

    def lift_order(self, M: int) -> "UnitCharacter":
        if M % self.order:
            raise ValueError("order must divide M")
        k = M // self.order
        return UnitCharacter(self.p, self.e, self.level, M, tuple(i * k for i in self.images))

    def compose(self, f: Callable[[TruncatedElement], TruncatedElement]) -> "UnitCharacter":
        """chi o f for an endomorphism f of the unit group."""
        G = self.group
        spec = G.spec
        imgs = tuple(self.exponent(f(spec.element(g))) for g in G.generators)
        return UnitCharacter(self.p, self.e, self.level, self.order, imgs)

    def power(self, k: int) -> "UnitCharacter":
        return UnitCharacter(self.p, self.e, self.level, self.order, tuple(i * k % self.order for i in self.images))

    def __mul__(self, other: "UnitCharacter") -> "UnitCharacter":
        lev = max(self.level, other.level)
        M = _lcm(self.order, other.order)
        a, b = self.at_level(lev).lift_order(M), other.at_level(lev).lift_order(M)
        return UnitCharacter(self.p, self.e, lev, M, tuple((x + y) % M for x, y in zip(a.images, b.images)))

    def same_as(self, other: "UnitCharacter") -> bool:
        lev = max(self.level, other.level)
        M = _lcm(self.order, other.order)
        return self.at_level(lev).lift_order(M).images == other.at_level(lev).lift_order(M).images

    def is_trivial(self) -> bool:
        return all(i % self.order == 0 for i in self.images)

    def to_record(self) -> dict:
        return {"e": self.e, "conductor": self.conductor, "level": self.level,
                "order": self.order, "images": list(self.images)}


def _filtration_gens(spec: LocalRingSpec, l: int) -> list[TruncatedElement]:
    """Generators 1 + p^l x^j of the group 1 + p^l O_E."""
    out = []
    for j in range(spec.e):
        out.append(spec.one() + spec.element([spec.p ** l if k == j else 0 for k in range(spec.e)]))
    return out


def base_character(p: int, conductor: int, exponent: int, order: int, e: int = 1) -> UnitCharacter:
    """Character of O^x (degree e=1) from the image exponent of the cyclic generator.

    With conductor 1 the character factors through the residue field.
    """
    if e != 1:
        raise ValueError("use UnitCharacter directly for e > 1")
    ch = UnitCharacter(p, 1, max(conductor, 1), order, _base_images(p, max(conductor, 1), exponent, order))
    if ch.conductor != max(conductor, 1):
        raise ValueError(f"declared conductor {conductor} is not minimal (actual {ch.conductor})")
    return ch


def _base_images(p, c, exponent, order):
    """Split the cyclic-generator image into images on our (Teichmuller, 1+p) generators."""
    G = unit_group(p, 1, c)
    spec = G.spec
    g = _cyclic_generator(p, c)
    # dlog of each of our generators in terms of the cyclic generator g
    acc, powers = spec.one(), {}
    n = (p - 1) * p ** (c - 1)
    for k in range(n):
        powers[acc.coeffs] = k
        acc = acc * g
    return tuple((powers[gen] * exponent) % order for gen in G.generators)


@lru_cache(maxsize=None)
def _cyclic_generator(p: int, c: int) -> TruncatedElement:
    spec = LocalRingSpec(p, 1, c)
    n = (p - 1) * p ** (c - 1)
    for a in range(2, p * p):
        if a % p == 0:
            continue
        x = spec.element(a)
        if all(x ** (n // ell) != spec.one() for ell in _prime_factors(n)):
            return x
    raise ArithmeticError("no primitive root")


def cyclic_generator(p: int, c: int) -> TruncatedElement:
    """The primitive root of (Z/p^c)^x used by `base_character` exponents."""
    return _cyclic_generator(p, c)


# ---------------------------------------------------------------------------
# characters of ^0T
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    """An element of T: unit coordinates (per the catalog identification) times tau(p).

    translation is tau in coordinates of the basis of X_*(A).
    """

    units: tuple[TruncatedElement, ...]
    translation: tuple[int, ...] = ()

    @property
    def is_compact(self) -> bool:
        return not any(self.translation)


def torus_coordinate_degree(datum: BasedRootDatum) -> int:
    """Degree over F of the ring the ^0T coordinates live in."""
    return datum.splitting_degree if datum.h is not None else 1


@dataclass(frozen=True)
class SmoothCharacter:
    """^0chi on ^0T_r = prod of coordinate unit groups; `layer` = r means chi o N_r."""

    datum: BasedRootDatum
    coords: tuple[UnitCharacter, ...]
    layer: int = 1

    def __post_init__(self):
        if len(self.coords) != self.ncoords(self.datum):
            raise ValueError(f"{self.datum.name} needs {self.ncoords(self.datum)} coordinate characters")

    @staticmethod
    def ncoords(datum: BasedRootDatum) -> int:
        return 1 if datum.h is not None else datum.rank

    @property
    def p(self) -> int:
        return self.coords[0].p

    @property
    def order(self) -> int:
        M = 1
        for c in self.coords:
            M = _lcm(M, c.order)
        return M

    @property
    def depth_level(self) -> int:
        return max(c.conductor for c in self.coords)

    def exponent(self, t: TorusPoint) -> int:
        """k with ^0chi_r(t) = zeta_order^k; t must be compact."""
        if not t.is_compact:
            raise NotInDomain("smooth characters live on the compact torus")
        M = self.order
        out = 0
        for ch, u in zip(self.coords, t.units):
            if u.valuation != 0:
                raise NotInDomain(f"coordinate {u} is not a unit")
            base = u
            if self.layer > 1:
                if u.spec.e != self.layer or ch.e != 1:
                    raise NotInDomain(f"expected a coordinate in the degree-{self.layer} ring")
                base = LocalRingSpec(self.p, 1, u.spec.N).element(norm_to_fixed(u, 1).coeffs[0])
            out += ch.exponent(base) * (M // ch.order)
        return out % M

    def __call__(self, t: TorusPoint) -> RootOfUnityValue:
        return RootOfUnityValue(self.order, self.exponent(t))

    def root_character(self, i: int) -> UnitCharacter:
        """chi_E o alpha^vee as a character of O_E^x (E the splitting field, or F_r)."""
        d = self.datum
        cv = d.coroots[i]
        if d.h is None:
            n = coords_of_cochar(d, cv)
            out = None
            for ch, k in zip(self.coords, n):
                term = ch.power(k)
                out = term if out is None else out * term
            if self.layer > 1:
                out = _norm_pullback(out, self.layer)
            return out
        # quasi-split: ^0chi_E = ^0chi o N_E; alpha^vee(c) has coordinate c^{a_1} sigma(c)^{-a_n}
        ch = self.coords[0]
        a1, an = cv[0], cv[-1]
        return ch.compose(lambda c: (c ** a1) * (frobenius(c, 1) ** (-an)))

    def is_trivial(self) -> bool:
        return all(c.is_trivial() for c in self.coords)


def _norm_pullback(ch: UnitCharacter, r: int) -> UnitCharacter:
    """The character ch o N_r of O_r^x."""
    spec = LocalRingSpec(ch.p, r, ch.level)
    G = unit_group(ch.p, r, ch.level)
    base = LocalRingSpec(ch.p, 1, ch.level)
    imgs = []
    for g in G.generators:
        n = norm_to_fixed(spec.element(g), 1)
        imgs.append(ch.exponent(base.element(n.coeffs[0])))
    return UnitCharacter(ch.p, r, ch.level, ch.order, tuple(imgs))


def conductor(chi: SmoothCharacter, i: int) -> int:
    """cond(alpha): least l >= 1 with chi_E(alpha^vee(1 + p^l)) = 1."""
    rc = chi.root_character(i)
    spec = LocalRingSpec(rc.p, rc.e, rc.level + 1)
    for l in range(1, rc.level + 1):
        if all(rc.exponent(g) == 0 for g in _filtration_gens(spec, l)):
            return l
    return rc.level + 1


def conductors(chi: SmoothCharacter) -> dict[int, int]:
    return {i: conductor(chi, i) for i in range(len(chi.datum.roots))}


def pullback_norm(chi: SmoothCharacter, r: int) -> SmoothCharacter:
    if r < 1:
        raise ValueError("r must be positive")
    # for the quasi-split torus the layer is kept formally: block and Weyl operations
    # only need chi (N_r is onto the units), while `exponent` refuses such points
    return SmoothCharacter(chi.datum, chi.coords, chi.layer * r)


def coordinate_action(datum: BasedRootDatum, w: WeylElement) -> list[list[int]]:
    """Integer matrix A with (w lambda_i) = sum_j A[j][i] lambda_j on the cocharacter basis."""
    cols = [coords_of_cochar(datum, w.act(b)) for b in datum.cochar_basis]
    return [[cols[i][j] for i in range(len(cols))] for j in range(len(cols))]


def weyl_act(w: WeylElement, chi: SmoothCharacter) -> SmoothCharacter:
    """(^w chi)(t) = chi(w^-1 t w)."""
    d = chi.datum
    if d.h is not None:
        # (W_E)^h has order 2; its nontrivial element sends the coordinate a to sigma(a)^-1
        if w.length == 0:
            return chi
        ch = chi.coords[0]
        return SmoothCharacter(d, (ch.compose(lambda a: frobenius(a, 1).inverse()),), chi.layer)
    A = coordinate_action(d, w.inverse())
    new = []
    n = len(chi.coords)
    for i in range(n):
        acc = None
        for j in range(n):
            term = chi.coords[j].power(A[j][i])
            acc = term if acc is None else acc * term
        new.append(acc)
    return SmoothCharacter(d, tuple(new), chi.layer)


def same_character(a: SmoothCharacter, b: SmoothCharacter) -> bool:
    return all(x.same_as(y) for x, y in zip(a.coords, b.coords))


@dataclass(frozen=True)
class StabilizerW0chi:
    finite: tuple[WeylElement, ...]
    generators: tuple[WeylElement, ...]
    translation_rank: int

    def contains(self, w: WeylElement) -> bool:
        return w in self.finite

    def contains_affine(self, x) -> bool:
        return x.finite in self.finite


def relative_weyl(datum: BasedRootDatum) -> tuple[WeylElement, ...]:
    return weyl_fixed_by_h(datum) if datum.h is not None else weyl_generate(datum)


def stabilizer_W0chi(chi: SmoothCharacter) -> StabilizerW0chi:
    W = relative_weyl(chi.datum)
    fin = tuple(w for w in W if same_character(weyl_act(w, chi), chi))
    # a small generating set: greedily add elements not yet generated
    gens, span = [], {W[0]} if fin else set()
    for w in fin:
        if w not in span:
            gens.append(w)
            span = _closure(gens, W[0])
    return StabilizerW0chi(fin, tuple(gens), len(chi.datum.split_basis))


def _closure(gens, ident):
    span = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in span:
                    span.add(y)
                    nxt.append(y)
        frontier = nxt
    return span


@dataclass(frozen=True)
class ExtendedCharacter:
    """chi * eta: eta is given by exact nonzero values on the basis of X_*(A)."""

    chi: SmoothCharacter
    eta: tuple[Cyclo, ...]

    def __post_init__(self):
        if len(self.eta) != len(self.chi.datum.split_basis):
            raise ValueError("eta needs one value per basis cocharacter of A")

    def eta_at(self, tau: Sequence[int]) -> Cyclo:
        out = Cyclo.rational(1)
        for v, k in zip(self.eta, tau):
            if k >= 0:
                for _ in range(k):
                    out = out * v
            else:
                inv = v.inverse_root_of_unity()
                for _ in range(-k):
                    out = out * inv
        return out


def evaluate(ch, t: TorusPoint) -> Cyclo:
    """Value of a smooth or extended character at a torus point."""
    if isinstance(ch, SmoothCharacter):
        return ch(t).to_cyclo()
    compact = TorusPoint(t.units, ())
    val = ch.chi(compact).to_cyclo()
    if t.translation:
        val = val * ch.eta_at(t.translation)
    return val


def weyl_act_extended(w: WeylElement, xi: ExtendedCharacter) -> ExtendedCharacter:
    d = xi.chi.datum
    wi = w.inverse()
    new_eta = []
    for b in d.split_basis:
        img = coords_of_cochar(d, wi.act(b), split=True)
        new_eta.append(xi.eta_at(img))
    return ExtendedCharacter(weyl_act(w, xi.chi), tuple(new_eta))


def check_block(xi: ExtendedCharacter, chi: SmoothCharacter) -> WeylElement:
    """The w with xi|_{^0T} = ^w chi; raises WrongBlock when there is none."""
    for w in relative_weyl(chi.datum):
        if same_character(weyl_act(w, chi), xi.chi):
            return w
    raise WrongBlock("xi does not restrict to a Weyl conjugate of the block character")
