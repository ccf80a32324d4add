"""The center Z(G, rho) as W_0chi-invariant Laurent polynomials, base change, and Hecke functions."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _mat2 as m2
from ._kernels import Ring
from .characters import (
    ExtendedCharacter,
    SmoothCharacter,
    check_block,
    pullback_norm,
    stabilizer_W0chi,
    weyl_act_extended,
)
from .errors import InvalidLevi, NotInvariant, UnsupportedClass, WindowTooSmall
from .padic_arith import LocalRingSpec
from .root_data import BasedRootDatum, WeylElement, cochar_from_coords, coords_of_cochar, levi_weyl
from .scalars import Cyclo
from .types_builder import TypeDatum

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# center elements
# ---------------------------------------------------------------------------

def act_on_monomial(datum: BasedRootDatum, w: WeylElement, lam: Monomial) -> Monomial:
    return coords_of_cochar(datum, w.act(cochar_from_coords(datum, lam, split=True)), split=True)


@dataclass(frozen=True)
class CenterElement:
    """sum c_lam x^lam over lam in X_*(A), invariant under `group` (a subgroup of W_0chi)."""

    chi: SmoothCharacter
    coeffs: tuple[tuple[Monomial, Cyclo], ...]
    group: frozenset = field(default_factory=frozenset)

    @staticmethod
    def make(chi: SmoothCharacter, coeffs: dict, group: Iterable[WeylElement] | None = None,
             check: bool = True) -> "CenterElement":
        grp = frozenset(stabilizer_W0chi(chi).finite if group is None else group)
        clean = {}
        for lam, c in coeffs.items():
            c = c if isinstance(c, Cyclo) else Cyclo.rational(c)
            if not c.is_zero():
                clean[tuple(lam)] = c
        z = CenterElement(chi, tuple(sorted(clean.items())), grp)
        if check and not z.is_invariant():
            raise NotInvariant("coefficients are not constant on W_0chi-orbits of monomials")
        return z

    @property
    def datum(self) -> BasedRootDatum:
        return self.chi.datum

    def as_dict(self) -> dict[Monomial, Cyclo]:
        return dict(self.coeffs)

    def is_invariant(self) -> bool:
        d = self.as_dict()
        for w in self.group:
            for lam, c in d.items():
                if d.get(act_on_monomial(self.datum, w, lam)) != c:
                    return False
        return True

    def _combine(self, other: "CenterElement", coeffs: dict) -> "CenterElement":
        if self.datum.name != other.datum.name:
            raise ValueError("center elements of different groups")
        return CenterElement.make(self.chi, coeffs, self.group & other.group, check=False)

    def __add__(self, other: "CenterElement") -> "CenterElement":
        d = self.as_dict()
        for lam, c in other.coeffs:
            d[lam] = d.get(lam, Cyclo.rational(0)) + c
        return self._combine(other, d)

    def __mul__(self, other):
        if not isinstance(other, CenterElement):
            c = other if isinstance(other, Cyclo) else Cyclo.rational(other)
            return CenterElement.make(self.chi, {k: v * c for k, v in self.coeffs}, self.group, check=False)
        out: dict = {}
        for (a, ca), (b, cb) in itertools.product(self.coeffs, other.coeffs):
            lam = tuple(x + y for x, y in zip(a, b))
            out[lam] = out.get(lam, Cyclo.rational(0)) + ca * cb
        return self._combine(other, out)

    def __eq__(self, other):
        if not isinstance(other, CenterElement):
            return NotImplemented
        return (self.datum.name == other.datum.name and self.as_dict() == other.as_dict()
                and self.group == other.group)

    def __hash__(self):
        return hash((self.datum.name, self.coeffs))

    def evaluate(self, eta: Sequence[Cyclo]) -> Cyclo:
        """Value at the unramified character with eta(basis_i(p)) = eta[i]."""
        xi = ExtendedCharacter(self.chi, tuple(eta))
        out = Cyclo.rational(0)
        for lam, c in self.coeffs:
            out = out + c * xi.eta_at(lam)
        return out

    def to_record(self) -> dict:
        return {
            "group": self.datum.name,
            "monomials": [[list(lam), c.to_record()] for lam, c in self.coeffs],
            "invariance": sorted(list(w.word) for w in self.group),
        }


def symmetrize(chi: SmoothCharacter, coeffs: dict, group: Iterable[WeylElement] | None = None) -> CenterElement:
    """Orbit sum of a Laurent polynomial over the invariance group."""
    grp = tuple(stabilizer_W0chi(chi).finite if group is None else group)
    out: dict = {}
    for lam, c in coeffs.items():
        c = c if isinstance(c, Cyclo) else Cyclo.rational(c)
        for w in grp:
            mu = act_on_monomial(chi.datum, w, lam)
            out[mu] = out.get(mu, Cyclo.rational(0)) + c
    return CenterElement.make(chi, out, grp)


def random_center_element(chi: SmoothCharacter, rng: random.Random, terms: int = 3, degree: int = 2,
                          order: int = 6) -> CenterElement:
    n = len(chi.datum.split_basis)
    coeffs = {}
    for _ in range(terms):
        lam = tuple(rng.randint(-degree, degree) for _ in range(n))
        coeffs[lam] = Cyclo.rational(rng.randint(-3, 3)) + Cyclo.zeta(order, rng.randrange(order))
    return symmetrize(chi, coeffs)


def _base_block(chi_r: SmoothCharacter, r: int) -> SmoothCharacter:
    if chi_r.layer % r:
        raise ValueError(f"layer {chi_r.layer} is not divisible by {r}")
    return SmoothCharacter(chi_r.datum, chi_r.coords, chi_r.layer // r)


def base_change_br(z_r: CenterElement, r: int) -> CenterElement:
    """b_r: x^lam -> x^(r lam), from the block of chi o N_r to the block of chi."""
    if r < 1:
        raise ValueError("r must be positive")
    if not z_r.is_invariant():
        raise NotInvariant("input is not invariant under its group")
    chi = _base_block(z_r.chi, r)
    stab = set(stabilizer_W0chi(chi).finite)
    group = frozenset(w for w in z_r.group if w in stab)
    out = {tuple(r * x for x in lam): c for lam, c in z_r.coeffs}
    return CenterElement.make(chi, out, group)


def norm_pullback_extended(xi: ExtendedCharacter, r: int) -> ExtendedCharacter:
    """xi o N_r: chi o N_r on the compact torus, eta^r on tau(p)."""
    eta = tuple(_power(v, r) for v in xi.eta)
    return ExtendedCharacter(pullback_norm(xi.chi, r), eta)


def _power(v: Cyclo, k: int) -> Cyclo:
    out = Cyclo.rational(1)
    for _ in range(k):
        out = out * v
    return out


def action_scalar(z: CenterElement, xi: ExtendedCharacter) -> Cyclo:
    """Scalar by which z acts on i_B^G(xi)^rho: z evaluated at the unramified part of xi."""
    w = check_block(xi, z.chi)
    if w.length:
        xi = weyl_act_extended(w.inverse(), xi)
    return z.evaluate(xi.eta)


def constant_term_cMG(z: CenterElement, levi: Sequence[int]) -> CenterElement:
    """c_M^G: the same polynomial with invariance restricted to W_M cap W_0chi."""
    WM = set(levi_weyl(z.datum, levi))
    if not WM:
        raise InvalidLevi(f"{tuple(levi)} does not define a standard Levi")
    return CenterElement.make(z.chi, z.as_dict(), frozenset(w for w in z.group if w in WM))


def random_extended(chi: SmoothCharacter, rng: random.Random, order: int = 12) -> ExtendedCharacter:
    n = len(chi.datum.split_basis)
    return ExtendedCharacter(chi, tuple(Cyclo.zeta(order, rng.randrange(order)) for _ in range(n)))


# ---------------------------------------------------------------------------
# Hecke functions on SL2 and GL2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BruhatRep:
    """w~ = diag(p^lam) n_w, w in {0, 1} (1 = the simple reflection)."""

    lam: tuple[int, int]
    w: int = 0


@dataclass
class HeckeContext:
    tp: TypeDatum
    W: int = 12

    def __post_init__(self):
        if self.tp.datum.name not in ("SL2", "GL2"):
            raise UnsupportedClass("Hecke functions are realized for SL2 and GL2")
        from .integrals import _tables

        ch = self.tp.chi
        self.R = Ring.from_spec(LocalRingSpec(ch.p, ch.layer, self.W))
        self.tab1, self.tab2, self.c = _tables(ch)
        self.M = ch.order
        pos = self.tp.datum.positive[0]
        self.fp, self.fn = self.tp.f[pos], self.tp.f[self.tp.datum.neg(pos)]
        self._reps: dict = {}

    # matrices
    def matrix(self, b: BruhatRep) -> m2.M2:
        one = m2.scalar(self.R, 1)
        t = m2.torus(self.R, one, one, b.lam[0], b.lam[1])
        return t @ m2.weyl_s(self.R) if b.w else t

    def in_J(self, Z: m2.M2) -> np.ndarray:
        return Z.member(self.fp, self.fn)[0]

    def rho(self, Z: m2.M2) -> np.ndarray:
        """Exponents of rho on rows in J (-1 elsewhere)."""
        from ._kernels import _exponent_from_tables

        ok, a, b = Z.member(self.fp, self.fn)
        out = np.full(len(Z), -1, dtype=np.int64)
        if ok.any():
            ex = _exponent_from_tables(a, self.R, self.tab1, self.c)
            if self.tp.datum.name == "GL2":
                ex = ex + _exponent_from_tables(b, self.R, self.tab2, self.c)
            out[ok] = ex % self.M
        return out

    def left_reps(self, b: BruhatRep) -> m2.M2:
        """Representatives j of J / (J cap w~ J w~^-1), as u_+(a) u_-(c)."""
        if b not in self._reps:
            lam = b.lam[0] - b.lam[1]
            fw_pos, fw_neg = (self.fn, self.fp) if b.w else (self.fp, self.fn)
            hp, hn = max(self.fp, fw_pos + lam), max(self.fn, fw_neg - lam)
            if max(hp, hn) + abs(lam) + 2 > self.W:
                raise WindowTooSmall(f"precision {self.W} is too small for {b}")
            self._reps[b] = m2.product_reps(self.R, (self.fp, hp), (self.fn, hn))
        return self._reps[b]

    def decompose(self, b: BruhatRep, g: m2.M2):
        """(j1, j2) with g = j1 w~ j2, or None when g is not in J w~ J."""
        wt = self.matrix(b)
        wt_inv = wt.inverse()
        J1 = self.left_reps(b)
        Z = wt_inv.repeat(len(J1)) @ J1.inverse() @ g.repeat(len(J1))
        hits = np.nonzero(self.in_J(Z))[0]
        if not len(hits):
            return None
        k = int(hits[0])
        return J1[k], Z[k].normalized()


@dataclass
class HeckeFunction:
    """f(j1 w~ j2) = rho(j1)^-1 f(w~) rho(j2)^-1 on the listed double cosets, zero elsewhere."""

    ctx: HeckeContext
    values: dict  # BruhatRep -> Cyclo

    def __call__(self, g: m2.M2) -> Cyclo:
        for b, v in self.values.items():
            dec = self.ctx.decompose(b, g)
            if dec is None:
                continue
            j1, j2 = dec
            e = int(self.ctx.rho(j1)[0]) + int(self.ctx.rho(j2)[0])
            return v * Cyclo.zeta(self.ctx.M, -e)
        return Cyclo.rational(0)

    def check_equivariance(self, rng: np.random.Generator, trials: int = 10) -> bool:
        """f(j1 w~ j2) against rho(j1)^-1 f(w~) rho(j2)^-1 on random j1, j2 in J."""
        ctx = self.ctx
        for b, v in self.values.items():
            wt = ctx.matrix(b)
            for _ in range(trials):
                j1, j2 = random_J(ctx, rng), random_J(ctx, rng)
                lhs = self(j1 @ wt @ j2)
                e = int(ctx.rho(j1)[0]) + int(ctx.rho(j2)[0])
                if lhs != v * Cyclo.zeta(ctx.M, -e):
                    return False
        return True


def random_J(ctx: HeckeContext, rng: np.random.Generator) -> m2.M2:
    R = ctx.R
    p = R.p
    a = rng.integers(0, R.pw, size=(1, R.e)) * p ** ctx.fp % R.pw
    c = rng.integers(0, R.pw, size=(1, R.e)) * p ** ctx.fn % R.pw
    while True:
        d1 = rng.integers(0, R.pw, size=(1, R.e))
        d2 = rng.integers(0, R.pw, size=(1, R.e))
        if ctx.tp.datum.name == "SL2":
            d2 = None
        if d1[0, 0] % p and (d2 is None or d2[0, 0] % p):
            break
    from ._kernels import np_inv

    if d2 is None:
        d2 = np_inv(d1, R)
    t = m2.from_entries(R, d1, m2.scalar(R, 0), m2.scalar(R, 0), d2)
    return m2.upper(R, a) @ t @ m2.lower(R, c)


def unit_e_rho(tp: TypeDatum, W: int = 12) -> HeckeFunction:
    ctx = HeckeContext(tp, W)
    return HeckeFunction(ctx, {BruhatRep((0, 0), 0): Cyclo.rational(1)})


def indicator(ctx: HeckeContext, b: BruhatRep) -> HeckeFunction:
    """1_{J w~ J} (normalized to 1 at w~); needs w~ to intertwine rho."""
    return HeckeFunction(ctx, {b: Cyclo.rational(1)})


def window_reps(datum_name: str, max_len: int) -> list[BruhatRep]:
    out = []
    for l in range(-max_len, max_len + 1):
        lams = [(l, -l)] if datum_name == "SL2" else [(l, k) for k in range(-max_len, max_len + 1)]
        for lam in lams:
            for w in (0, 1):
                out.append(BruhatRep(lam, w))
    return out


def convolve(f: HeckeFunction, h: HeckeFunction, max_len: int = 2) -> HeckeFunction:
    """(f*h)(x) = sum over yJ in supp f of f(y) h(y^-1 x), evaluated at every w~ of the window."""
    ctx = f.ctx
    if h.ctx is not ctx:
        raise ValueError("functions must share a Hecke context")
    out = {}
    for b in window_reps(ctx.tp.datum.name, max_len):
        x = ctx.matrix(b)
        total = Cyclo.rational(0)
        for r, v in f.values.items():
            J1 = ctx.left_reps(r)
            wr = ctx.matrix(r)
            rj = ctx.rho(J1)
            for k in range(len(J1)):
                y = J1[k] @ wr
                val = h(y.inverse() @ x)
                if not val.is_zero():
                    total = total + v * Cyclo.zeta(ctx.M, -int(rj[k])) * val
        if not total.is_zero():
            out[b] = total
    return HeckeFunction(ctx, out)


def same_function(f: HeckeFunction, h: HeckeFunction) -> bool:
    keys = set(f.values) | set(h.values)
    zero = Cyclo.rational(0)
    return all(f.values.get(k, zero) == h.values.get(k, zero) for k in keys)


def idempotence_average(tp: TypeDatum, N: int | None = None, samples: int = 20, seed: int = 0) -> bool:
    """(e_rho * e_rho)(x) = e_rho(x) with the integral over J as an average over J mod p^N."""
    ctx = HeckeContext(tp, 12)
    R, p = ctx.R, ctx.R.p
    N = N if N is not None else max(2, ctx.c)
    # J mod p^N: u_+(a) t u_-(c) with a in p^fp O / p^N, c in p^fn O / p^N, t over units mod p^N
    spec = LocalRingSpec(p, R.e, N)
    units = np.array([u.coeffs for u in spec.units_mod(N)], dtype=np.int64)
    from ._kernels import np_inv

    if tp.datum.name == "SL2":
        T = m2.from_entries(R, units, m2.scalar(R, 0), m2.scalar(R, 0), np_inv(units, R))
    else:
        u1 = np.repeat(units, len(units), axis=0)
        u2 = np.tile(units, (len(units), 1))
        T = m2.from_entries(R, u1, m2.scalar(R, 0), m2.scalar(R, 0), u2)
    A = m2.upper(R, m2.elements(R, N, ctx.fp))
    C = m2.lower(R, m2.elements(R, N, ctx.fn))
    AT = A.repeat(len(T)) @ T.tile(len(A))
    Y = AT.repeat(len(C)) @ C.tile(len(AT))
    Yinv = Y.inverse()
    ey = ctx.rho(Y)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x = random_J(ctx, rng)
        Z = Yinv @ x.repeat(len(Y))
        ez = ctx.rho(Z)
        if (ez < 0).any():
            return False
        # average of zeta^-(e(y) + e(y^-1 x)) over the finite quotient
        hist = np.bincount((-(ey + ez)) % ctx.M, minlength=ctx.M)
        avg = Cyclo.from_histogram(ctx.M, hist, scale=Fraction(1, len(Y)))
        if avg != Cyclo.zeta(ctx.M, -int(ctx.rho(x)[0])):
            return False
    return True
