"""Elementary functions, brute-force (twisted) orbital integrals and the verification suite.

Orbital integrals over T \\ G_r are computed through the Iwasawa decomposition
g = n_x k: the integrand is right J_r-invariant in k and invariant under
x -> x + O_r, so with vol(J_r) = vol(^0T_r) = vol(N(O_r)) = 1 the integral is
the finite sum over x in p^-B O_r / O_r and k in K_r / J_r.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as kern
from . import _mat2 as m2
from .characters import (
    SmoothCharacter,
    TorusPoint,
    conductors,
    pullback_norm,
    relative_weyl,
    weyl_act,
)
from .chevalley import (
    GroupWord,
    PMatrix,
    RootElt,
    matrix_oracle,
    membership_depth,
    model_for,
    normal_form,
)
from .errors import (
    NotInDomain,
    NotSemisimpleNorm,
    PrecisionExhausted,
    UnsupportedClass,
    WindowTooSmall,
)
from .padic_arith import LocalRingSpec, TruncatedElement, divide_by_p_power, frobenius, norm_to_fixed
from .root_data import (
    BasedRootDatum,
    WeylElement,
    cochar_from_coords,
    is_dominant,
    is_regular,
    pair,
    pairing_height,

)
from .scalars import Cyclo
from .types_builder import PrincipalClass, TypeDatum, build_type, iwahori_depths, rho_exponent

TWO_BY_TWO = ("SL2", "GL2")


# ---------------------------------------------------------------------------
# functions and windows
# ---------------------------------------------------------------------------

def layer_type(cls: PrincipalClass, r: int) -> TypeDatum:
    """The type of (^0T_r, ^0chi o N_r) over F_r."""
    chi = cls.chi
    base = SmoothCharacter(chi.datum, chi.coords, 1)
    return build_type(PrincipalClass(cls.datum, pullback_norm(base, r) if r > 1 else base))


@dataclass(frozen=True)
class ElementaryFunction:
    """phi^{u,chi_r}: supported on J_r u J_r with phi(k^-1 m u theta(k)) = chi_r(m)^-1."""

    tp: TypeDatum
    nu: tuple[int, ...]  # coordinates on the basis of X_*(A)

    def __post_init__(self):
        v = cochar_from_coords(self.tp.datum, self.nu, split=True)
        if any(self.nu) and not (is_dominant(self.tp.datum, v) and is_regular(self.tp.datum, v)):
            raise NotInDomain(f"nu = {self.nu} is not regular dominant")

    @property
    def r(self) -> int:
        return self.tp.chi.layer

    @property
    def datum(self) -> BasedRootDatum:
        return self.tp.datum

    @property
    def u(self) -> TorusPoint:
        return TorusPoint((), self.nu)

    @property
    def tau(self) -> tuple[int, ...]:
        return tuple(self.r * x for x in self.nu)

    @property
    def t(self) -> TorusPoint:
        return TorusPoint((), self.tau)

    def untwisted(self) -> "ElementaryFunction":
        """f^{t,chi} on G(F), t = tau(p), tau = r nu."""
        chi = self.tp.chi
        base = SmoothCharacter(chi.datum, chi.coords, 1)
        return ElementaryFunction(build_type(PrincipalClass(self.datum, base)), self.tau)

    def diag_nu(self) -> tuple[int, ...]:
        return _diag_exponents(self.datum, self.nu)


def unit_function(tp: TypeDatum) -> ElementaryFunction:
    """e_rho as the elementary function at nu = 0 (support J, value rho^-1)."""
    return ElementaryFunction(tp, tuple(0 for _ in tp.datum.split_basis))


@dataclass(frozen=True)
class InducedUnit:
    """e_{rho^I}(x) = dim(rho^I) tr(rho^I(x^-1)) on I, zero elsewhere."""

    tp: TypeDatum

    @property
    def r(self) -> int:
        return self.tp.chi.layer


@dataclass(frozen=True)
class EnumerationWindow:
    N: int = 6
    B: int = 1

    def bumped(self, dN: int = 0, dB: int = 0) -> "EnumerationWindow":
        return EnumerationWindow(self.N + dN, self.B + dB)


@dataclass
class OrbitalReport:
    value: Cyclo
    window: EnumerationWindow
    cosets: int
    sizes: dict
    ladder: list = field(default_factory=list)
    stable: bool = True
    label: str = ""

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "value": self.value.to_record(),
            "N": self.window.N,
            "B": self.window.B,
            "cosets": self.cosets,
            "sizes": dict(self.sizes),
            "ladder": [{"N": w.N, "B": w.B, "value": v.to_record()} for w, v in self.ladder],
            "stable": self.stable,
        }


def _diag_exponents(datum: BasedRootDatum, coords: Sequence[int]) -> tuple[int, ...]:
    if not coords or not any(coords):
        return tuple(0 for _ in model_for(datum.name).weights)
    v = cochar_from_coords(datum, coords, split=True)
    return tuple(model_for(datum.name).diag_exponents(v))


def _require_2x2(datum: BasedRootDatum):
    if datum.name not in TWO_BY_TWO:
        raise UnsupportedClass(f"brute-force orbital sums are implemented for SL2 and GL2, not {datum.name}")


# ---------------------------------------------------------------------------
# elementary_eval (any group, through the matrix oracle)
# ---------------------------------------------------------------------------

def _udl(M: PMatrix, diag_exps: Sequence[int], depth) -> tuple[bool, list | None]:
    """Decide p^-s Y = U D L with U, L of the given root depths and D = p^diag_exps * units.

    Elimination runs from the bottom-right pivot on the integral data; the
    Schur complement of p^s Y is data_ij - data_ik data_kj / data_kk.
    """
    s, spec = M.shift, M.spec
    n = M.data.shape[0]
    A = [[TruncatedElement(spec, tuple(int(x) for x in M.data[k, l])) for l in range(n)] for k in range(n)]
    units: list = [None] * n
    for k in range(n - 1, -1, -1):
        v = A[k][k].valuation
        if v != s + diag_exps[k] or v >= spec.N:
            return False, None
        unit = divide_by_p_power(A[k][k], v)
        uinv = unit.inverse()
        units[k] = unit
        for i in range(k):
            if A[i][k].valuation < min(v + depth(i, k), spec.N):
                return False, None
            if A[k][i].valuation < min(v + depth(k, i), spec.N):
                return False, None
        for i in range(k):
            Uik = divide_by_p_power(A[i][k], v) * uinv
            for j in range(k):
                A[i][j] = A[i][j] - Uik * A[k][j]
    return True, units


def elementary_eval(phi: ElementaryFunction, g: GroupWord) -> Cyclo:
    """phi(g) via the U D L test on the matrix oracle of g (split groups)."""
    from .types_builder import torus_coords_from_diag, weight_depth_table

    tp = phi.tp
    if tp.datum.h is not None:
        raise UnsupportedClass("elementary_eval works on split groups")
    M = matrix_oracle(g)
    tab = weight_depth_table(tp.datum, tp.f)
    exps = phi.diag_nu()
    if 2 * M.shift + 2 * sum(abs(x) for x in exps) + max(tp.f.values) >= M.spec.N:
        raise PrecisionExhausted("the word's precision is too small for the support test")
    ok, units = _udl(M, exps, lambda a, b: tab[a][b])
    if not ok:
        return Cyclo.rational(0)
    coords = torus_coords_from_diag(tp.datum, units)
    k = tp.chi.exponent(TorusPoint(tuple(coords)))
    return Cyclo.zeta(tp.chi.order, -k)


def closed_form_orbital(phi: ElementaryFunction, m: TorusPoint) -> Cyclo:
    """TO_{m u theta}(phi^{u,chi_r}) = chi_r(m)^-1 (and O_{m_0 t}(f^{t,chi}) = chi(m_0)^-1 for r = 1)."""
    k = phi.tp.chi.exponent(TorusPoint(m.units))
    return Cyclo.zeta(phi.tp.chi.order, -k)


# ---------------------------------------------------------------------------
# brute-force orbital sums (SL2, GL2)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _ring(p: int, e: int, W: int) -> kern.Ring:
    spec = LocalRingSpec(p, e, W)
    return kern.Ring.from_spec(spec)


@lru_cache(maxsize=64)
def _tables(chi: SmoothCharacter):
    """Exponent tables on (Z/p^c)^x for each coordinate character, lifted to the order of chi."""
    p, M = chi.p, chi.order
    c = max(ch.level for ch in chi.coords)
    spec1 = LocalRingSpec(p, 1, c)
    tabs = []
    for ch in chi.coords:
        tab = np.zeros(p ** c, dtype=np.int64)
        for n in range(p ** c):
            if n % p:
                tab[n] = ch.exponent(spec1.element(n)) * (M // ch.order)
        tabs.append(tab)
    if len(tabs) == 1:
        tabs.append(np.zeros(p ** c, dtype=np.int64))
    return tabs[0], tabs[1], c


def _roots_pm(datum: BasedRootDatum) -> tuple[int, int]:
    pos = datum.positive[0]
    return pos, datum.neg(pos)


@lru_cache(maxsize=64)
def _kj(p: int, e: int, W: int, fpos: int, fneg: int) -> tuple[np.ndarray, np.ndarray, int]:
    """k^-1 and theta(k) over a checked transversal of K_r / J_r."""
    R = _ring(p, e, W)
    reps = m2.k_over_j(R, fpos, fneg)
    if W <= 8 and not m2.distinct_cosets(reps, lambda M: M.member(fpos, fneg)[0]):
        raise ArithmeticError("K/J representatives are not distinct")
    return reps.inverse().data, reps.theta().data, len(reps)


@lru_cache(maxsize=8)
def kj_transversal_checked(p: int, e: int, fpos: int, fneg: int) -> int:
    """Size of the K/J transversal after the pairwise-distinctness check (at W = 8)."""
    R = _ring(p, e, 8)
    reps = m2.k_over_j(R, fpos, fneg)
    if not m2.distinct_cosets(reps, lambda M: M.member(fpos, fneg)[0]):
        raise ArithmeticError("K/J representatives are not distinct")
    return len(reps)


def _delta_entries(datum: BasedRootDatum, delta: TorusPoint, R: kern.Ring, e: int):
    spec = LocalRingSpec(R.p, e, R.W)
    units = [spec.element(u.coeffs) for u in delta.units]
    if datum.name == "SL2":
        d1, d2 = units[0], units[0].inverse()
    else:
        d1, d2 = units
    lam = _diag_exponents(datum, delta.translation)
    return np.array(d1.coeffs, dtype=np.int64), np.array(d2.coeffs, dtype=np.int64), lam


def _is_central(datum: BasedRootDatum, delta: TorusPoint) -> bool:
    lam = _diag_exponents(datum, delta.translation)
    if lam[0] != lam[1]:
        return False
    if datum.name == "SL2":
        u = delta.units[0]
        return u * u == u.spec.one()
    return delta.units[0] == delta.units[1]


def _orbital_once(f, delta: TorusPoint, win: EnumerationWindow, which=None, ct: bool = False,
                  L: int = 0) -> tuple[Cyclo, int, dict]:
    tp = f.tp
    datum = tp.datum
    _require_2x2(datum)
    r = f.r
    p = tp.chi.p
    pos, neg = _roots_pm(datum)
    fpos, fneg = tp.f[pos], tp.f[neg]
    nu = f.diag_nu() if isinstance(f, ElementaryFunction) else (0, 0)
    lam = _diag_exponents(datum, delta.translation)
    B = win.B
    S = max(0, -min(lam), B - min(lam))
    W = win.N + 2 * S + max(0, nu[0] + nu[1]) + max(abs(x) for x in nu) + L
    R = _ring(p, r, W)
    d1, d2, lam = _delta_entries(datum, delta, R, r)
    kinv, kth, nk = _kj(p, r, W, fpos, fneg)
    xs = m2.elements(R, B + L)
    tab1, tab2, c = _tables(tp.chi)
    M = tp.chi.order
    coord_mode = 1 if datum.name == "GL2" else 0
    hist = kern.orbital_2x2(R, d1, d2, lam[0], lam[1], S, B, xs, kinv, kth, nu[0], nu[1], fpos, fneg,
                            coord_mode, tab1, tab2, c, M, -1, ct=int(ct), which=which)
    scale = Fraction(1, (p ** r) ** L) if L else 1
    return Cyclo.from_histogram(M, hist, scale), len(xs) * nk, {"x": len(xs), "k": nk, "W": W}


def _ladder(compute, win: EnumerationWindow, label: str, ladder: bool = True) -> OrbitalReport:
    value, cosets, sizes = compute(win)
    rungs = [(win, value)]
    stable = True
    if ladder:
        for w2 in (win.bumped(dN=1), win.bumped(dB=1)):
            v2, _, _ = compute(w2)
            rungs.append((w2, v2))
            stable &= v2 == value
    rep = OrbitalReport(value, win, cosets, sizes, rungs, stable, label)
    return rep


def brute_twisted_orbital(f, delta: TorusPoint, r: int | None = None,
                          window: EnumerationWindow = EnumerationWindow(), *, which=None,
                          ladder: bool = True, strict: bool = True) -> OrbitalReport:
    """TO_{delta theta}(f) over T \\ G_r with vol(J_r) = 1 (r = 1: the ordinary orbital integral).

    f is an ElementaryFunction (e_rho is the case nu = 0) or an InducedUnit.
    delta is a torus point over O_r: units times a translation.
    """
    if r is not None and r != f.r:
        raise NotInDomain(f"function lives on layer {f.r}, not {r}")
    datum = f.tp.datum
    _require_2x2(datum)
    if isinstance(f, InducedUnit):
        rep = _ladder(lambda w: _induced_once(f, delta, w), window, "TO(e_rho^I)", ladder)
    elif _is_central(datum, delta):
        if f.r != 1:
            raise UnsupportedClass("central twisted classes are not enumerated")
        rep = _ladder(lambda w: (_eval_at_torus(f, delta, w), 1, {"central": 1}), window, "TO central", ladder)
    else:
        rep = _ladder(lambda w: _orbital_once(f, delta, w, which), window, "TO", ladder)
    if strict and not rep.stable:
        raise WindowTooSmall(f"value changed along the ladder: {[v for _, v in rep.ladder]}")
    return rep


def _eval_at_torus(f: ElementaryFunction, delta: TorusPoint, win: EnumerationWindow) -> Cyclo:
    """f(delta) for a torus point (the orbital integral at a central element)."""
    nu = f.diag_nu()
    lam = _diag_exponents(f.datum, delta.translation)
    if tuple(lam) != tuple(nu):
        return Cyclo.rational(0)
    k = f.tp.chi.exponent(TorusPoint(delta.units))
    return Cyclo.zeta(f.tp.chi.order, -k)


# ---------------------------------------------------------------------------
# e_{rho^I}
# ---------------------------------------------------------------------------

def iwahori_index(tp: TypeDatum) -> tuple[int, bool]:
    """[I : J] by coset count, with the pairwise-distinctness check of the representatives."""
    _require_2x2(tp.datum)
    pos, neg = _roots_pm(tp.datum)
    fpos, fneg = tp.f[pos], tp.f[neg]
    R = _ring(tp.chi.p, tp.chi.layer, 8)
    reps = m2.iwahori_over_j(R, fpos, fneg)
    ok = m2.distinct_cosets(reps, lambda M: M.member(fpos, fneg)[0])
    return len(reps), ok


def _induced_once(f: InducedUnit, delta: TorusPoint, win: EnumerationWindow):
    """TO of e_{rho^I} with the Iwahori-normalized measure (weight 1/[I:J] per J-coset)."""
    tp = f.tp
    datum = tp.datum
    if datum.name != "SL2":
        raise UnsupportedClass("e_rho^I is enumerated for SL2")
    r, p = f.r, tp.chi.p
    pos, neg = _roots_pm(datum)
    fpos, fneg = tp.f[pos], tp.f[neg]
    IJ, _ = iwahori_index(tp)
    M = tp.chi.order
    if _is_central(datum, delta):
        if r != 1:
            raise UnsupportedClass("central twisted classes are not enumerated")
        # e_{rho^I}(delta) = [I:J] * sum over I/J of rho(delta^-1); one point, weight 1/[I:J]
        k = tp.chi.exponent(TorusPoint(delta.units))
        val = Cyclo.zeta(M, -k) * Cyclo.rational(IJ * IJ)
        return val * Cyclo.rational(Fraction(1, IJ)), 1, {"central": 1}
    lam = _diag_exponents(datum, delta.translation)
    B = win.B
    S = max(0, -min(lam), B - min(lam))
    W = win.N + 2 * S + 2
    R = _ring(p, r, W)
    d1, d2, lam = _delta_entries(datum, delta, R, r)
    kinv, kth, nk = _kj(p, r, W, fpos, fneg)
    xs = m2.elements(R, B)
    # y = k^-1 n_x^-1 delta theta(n_x) theta(k), scaled by p^S
    a = xs
    tha = kern.np_frob(a, R) if r > 1 else a
    lmin = min(lam)
    t1 = kern.np_mul(np.broadcast_to(d1, tha.shape), tha, R) * p ** (lam[0] - lmin)
    t2 = kern.np_mul(np.broadcast_to(d2, a.shape), a, R) * p ** (lam[1] - lmin)
    P01 = ((t1 - t2) % R.pw) * p ** (S - B + lmin) % R.pw
    P = m2.from_entries(R, (d1 * p ** (S + lam[0])) % R.pw, P01, m2.scalar(R, 0), (d2 * p ** (S + lam[1])) % R.pw, S)
    Ki = m2.M2(kinv, 0, R)
    Kt = m2.M2(kth, 0, R)
    Y = Ki.tile(len(P)) @ P.repeat(nk) @ Kt.tile(len(P))
    Yinv = Y.inverse()
    I_reps = m2.iwahori_over_j(R, fpos, fneg)
    I_inv = I_reps.inverse()
    hist = np.zeros(M, dtype=np.int64)
    tab1, _, c = _tables(tp.chi)
    for j in range(len(I_reps)):
        Z = I_inv[j].tile(len(Yinv)) @ Yinv @ I_reps[j].tile(len(Yinv))
        ok, m1, _ = Z.member(fpos, fneg)
        if ok.any():
            ex = kern._exponent_from_tables(m1, R, tab1, c) % M
            np.add.at(hist, ex, 1)
    # weight 1/[I:J] per coset times dim(rho^I) = [I:J]
    return Cyclo.from_histogram(M, hist, 1), len(Y), {"x": len(xs), "k": nk, "I/J": IJ, "W": W}


def compare_e_rhoI(cls: PrincipalClass, delta: TorusPoint, r: int = 1,
                   window: EnumerationWindow = EnumerationWindow()) -> dict:
    tp = layer_type(cls, r)
    IJ, distinct = iwahori_index(tp)
    lhs = brute_twisted_orbital(InducedUnit(tp), delta, window=window, strict=False)
    rhs = brute_twisted_orbital(unit_function(tp), delta, window=window, strict=False)
    predicted = Cyclo.rational(IJ) * rhs.value
    return {
        "I:J": IJ,
        "q": tp.chi.p ** r,
        "reps_distinct": distinct,
        "lhs": lhs,
        "rhs": rhs,
        "ok": distinct and lhs.stable and rhs.stable and lhs.value == predicted,
    }


# ---------------------------------------------------------------------------
# stable orbital integrals and matching
# ---------------------------------------------------------------------------

def norm_torus_point(m: TorusPoint, r: int) -> TorusPoint:
    """N_r on ^0T_r coordinates (to the base ring), translations multiplied by r."""
    units = []
    for u in m.units:
        n = norm_to_fixed(u, 1) if u.spec.e > 1 else u
        units.append(LocalRingSpec(u.spec.p, 1, u.spec.N).element(n.coeffs[0]))
    return TorusPoint(tuple(units), tuple(r * x for x in m.translation))


def theta_conjugate(m: TorusPoint, k: TorusPoint) -> TorusPoint:
    """m k theta(k)^-1 (coordinates multiply)."""
    units = tuple(a * b * frobenius(b, 1).inverse() for a, b in zip(m.units, k.units))
    return TorusPoint(units, m.translation)


def stable_orbital(f: ElementaryFunction, delta: TorusPoint,
                   window: EnumerationWindow = EnumerationWindow(), *, which=None) -> OrbitalReport:
    """SO for the torus-translate family: the stable class meets T_r in one ^0T_r-theta orbit,
    so SO equals TO at any representative."""
    lam = _diag_exponents(f.datum, delta.translation)
    if len(set(lam)) == 1:
        raise UnsupportedClass("stable classes are modeled only for regular torus translates")
    rep = brute_twisted_orbital(f, delta, window=window, which=which)
    rep.label = "SO"
    return rep


@dataclass
class MatchingReport:
    rows: list
    nonnorm: list
    theta_checks: list
    ok: bool

    def failures(self) -> list:
        return [r for r in self.rows if not r["ok"]]


def torus_units_mod(datum: BasedRootDatum, spec: LocalRingSpec, c: int) -> list[TorusPoint]:
    """All of ^0T_r modulo 1 + p^c (coordinates), as torus points."""
    units = spec.with_precision(max(spec.N, c)).units_mod(c)
    units = [spec.element(u.coeffs) for u in units]
    n = SmoothCharacter.ncoords(datum)
    return [TorusPoint(tup) for tup in itertools.product(units, repeat=n)]


def verify_matching(cls: PrincipalClass, nu: Sequence[int], r: int,
                    window: EnumerationWindow = EnumerationWindow(), ms: Iterable[TorusPoint] | None = None,
                    nonnorm: Iterable[TorusPoint] = (), theta_samples: int = 3, seed: int = 0,
                    which=None) -> MatchingReport:
    """SO_gamma(f^{t,chi}) = SO_{delta theta}(phi^{u,chi_r}) at delta = m u, gamma = N(m) t."""
    tp = layer_type(cls, r)
    phi = ElementaryFunction(tp, tuple(nu))
    f = phi.untwisted()
    spec = LocalRingSpec(tp.chi.p, r, window.N)
    if ms is None:
        ms = torus_units_mod(tp.datum, spec, 2)
    rows, cache = [], {}
    for m in ms:
        delta = TorusPoint(m.units, phi.nu)
        so_phi = stable_orbital(phi, delta, window, which=which)
        gamma = norm_torus_point(delta, r)
        key = tuple(u.coeffs for u in gamma.units)
        if key not in cache:
            cache[key] = stable_orbital(f, gamma, window, which=which)
        so_f = cache[key]
        closed = closed_form_orbital(phi, m)
        rows.append({"m": m, "phi": so_phi, "f": so_f, "closed": closed,
                     "ok": so_phi.value == so_f.value == closed and so_phi.stable and so_f.stable})
    rng = random.Random(seed)
    theta_rows = []
    if r > 1:
        for row in rows[:theta_samples]:
            k = TorusPoint(tuple(spec.random(rng, unit=True) for _ in row["m"].units))
            m2_ = theta_conjugate(row["m"], k)
            rep = stable_orbital(phi, TorusPoint(m2_.units, phi.nu), window, which=which)
            theta_rows.append({"m": row["m"], "k": k, "value": rep.value, "ok": rep.value == row["phi"].value})
    nn_rows = []
    for g in nonnorm:
        rep = brute_twisted_orbital(f, g, window=window, which=which)
        nn_rows.append({"gamma": g, "value": rep.value, "ok": rep.value.is_zero() and rep.stable})
    ok = all(x["ok"] for x in rows) and all(x["ok"] for x in theta_rows) and all(x["ok"] for x in nn_rows)
    return MatchingReport(rows, nn_rows, theta_rows, ok)


# ---------------------------------------------------------------------------
# constant terms and descent
# ---------------------------------------------------------------------------

def constant_term_numeric(f: ElementaryFunction, m: TorusPoint,
                          window: EnumerationWindow = EnumerationWindow(), *, which=None) -> OrbitalReport:
    """f_B(m) = delta_B^{1/2}(m) int_N int_K f(k^-1 m n theta(k)) dk dn, with vol(J) = 1 on K.

    The N-integral is discretized on p^L O cells where the integrand is constant
    (L = max conductor and depth); the cells carry volume q_r^-L.
    """
    tp = f.tp
    _require_2x2(tp.datum)
    L = max(max(conductors(tp.chi).values()), max(tp.f.values))
    lam = _diag_exponents(tp.datum, m.translation)
    half = lam[0] - lam[1]  # delta_B(m) = |alpha(m)| = q^-half; delta^{1/2} = q_r^{-half/2}
    if half % 2:
        raise NotInDomain("delta_B^{1/2}(m) is not an integral power of q")
    scale = Fraction(f.tp.chi.p ** f.r) ** (-(half // 2))

    def compute(win):
        v, n, sizes = _orbital_once(f, m, win, which, ct=True, L=L)
        return v * Cyclo.rational(scale), n, sizes

    return _ladder(compute, window, "constant term")


def discriminant_exponent(datum: BasedRootDatum, gamma: TorusPoint) -> int:
    """sum over roots of val(1 - alpha(gamma)^-1) for gamma in T(F) (M = T)."""
    _require_2x2(datum)
    spec = gamma.units[0].spec
    lam = _diag_exponents(datum, gamma.translation)
    if datum.name == "SL2":
        d = [gamma.units[0], gamma.units[0].inverse()]
    else:
        d = list(gamma.units)
    total = 0
    for (i, j) in ((0, 1), (1, 0)):
        # alpha(gamma) = d_i / d_j * p^(lam_i - lam_j)
        k = lam[i] - lam[j]
        ratio_inv = d[j] * d[i].inverse()  # unit part of alpha(gamma)^-1, times p^-k
        if k > 0:
            total += -k  # 1 - p^-k u: valuation -k
        elif k < 0:
            total += 0
        else:
            x = spec.one() - ratio_inv
            if x.valuation >= spec.N:
                raise NotSemisimpleNorm("gamma is not regular")
            total += x.valuation
    return total


def verify_descent(cls: PrincipalClass, delta: TorusPoint, r: int,
                   window: EnumerationWindow = EnumerationWindow(), *, which=None) -> dict:
    """TO_{delta theta}(e_{rho_r}) = |D(gamma)|^{-1/2} sum over W of TO^{T_r}(e_{^w rho_T}) (M = T)."""
    tp = layer_type(cls, r)
    datum = tp.datum
    gamma = norm_torus_point(delta, r)
    dval = discriminant_exponent(datum, gamma)
    if dval % 2:
        raise NotSemisimpleNorm("odd discriminant valuation: half-integral q-power")
    k = dval // 2
    lhs = brute_twisted_orbital(unit_function(tp), delta, window=window, which=which, strict=False)
    q = tp.chi.p
    rhs = Cyclo.rational(0)
    if not any(delta.translation):
        for w in relative_weyl(datum):
            chw = weyl_act(w, tp.chi)
            rhs = rhs + Cyclo.zeta(chw.order, -chw.exponent(TorusPoint(delta.units)))
    rhs = rhs * Cyclo.rational(Fraction(q) ** k)
    return {"lhs": lhs, "rhs": rhs, "k": k, "ok": lhs.stable and lhs.value == rhs}


# ---------------------------------------------------------------------------
# volume identity
# ---------------------------------------------------------------------------

def _per_root_index(tp: TypeDatum, nu_v: Sequence[int], extra: int = 0) -> dict[int, int]:
    """[J : J_u] root by root: the classes of p^f b mod p^g, b running over O_r / p^(g - f + extra)."""
    datum = tp.datum
    p, r = tp.chi.p, tp.chi.layer
    out = {}
    for i, root in enumerate(datum.roots):
        f = tp.f[i]
        g = max(f, f + pair(root, nu_v))
        spec = LocalRingSpec(p, r, g + extra + 1)
        classes = set()
        for b in spec.elements_mod(g - f + extra):
            a = b * spec.element([p ** f])
            classes.add(tuple(x % p ** g for x in a.coeffs))
        out[i] = len(classes)
    return out


def volume_check(cls: PrincipalClass, nu: Sequence[int], r: int, N: int | None = None,
                 transversal: bool | None = None, samples: int = 200, seed: int = 0) -> dict:
    """Card(J_{r,u} \\ J_r) against q^{r <2 rho, nu>}, J_{r,u} = J_r cap u J_r u^-1."""
    tp = layer_type(cls, r)
    datum = tp.datum
    nu_v = cochar_from_coords(datum, nu, split=True)
    if not is_dominant(datum, nu_v):
        raise NotInDomain(f"nu = {tuple(nu)} is not dominant")
    h = pairing_height(datum, nu_v)  # <2 rho, nu>
    q = tp.chi.p
    maxdepth = max(tp.f[i] + max(0, pair(root, nu_v)) for i, root in enumerate(datum.roots))
    N = N if N is not None else maxdepth + 1
    counts = _per_root_index(tp, nu_v)
    total = math.prod(counts.values())
    total2 = math.prod(_per_root_index(tp, nu_v, extra=1).values())
    predicted = q ** (r * h)
    report = {"predicted": predicted, "count": total, "count_N+1": total2, "per_root": counts,
              "pairing": h, "N": N}
    ok = total == predicted == total2
    if transversal is None:
        transversal = datum.name == "SL2"
    if transversal:
        ok &= _volume_transversal(tp, nu_v, N, report)
    elif datum.name != "SL2":
        ok &= _volume_sampled(tp, nu_v, N, samples, seed, report)
    report["ok"] = ok
    return report


def _volume_transversal(tp: TypeDatum, nu_v, N: int, report: dict) -> bool:
    """SL2: the products u_+(a) u_-(b) over the per-root quotients form a transversal of J_u \\ J."""
    datum = tp.datum
    pos, neg = _roots_pm(datum)
    fpos, fneg = tp.f[pos], tp.f[neg]
    k = pair(datum.roots[pos], nu_v)
    gpos, gneg = max(fpos, fpos + k), max(fneg, fneg - k)
    lam = model_for(datum.name).diag_exponents(nu_v)
    p, r = tp.chi.p, tp.chi.layer
    W = N + 4 * max(abs(x) for x in lam) + 4
    R = _ring(p, r, W)
    reps = m2.product_reps(R, (fpos, gpos), (fneg, gneg))
    u = m2.torus(R, m2.scalar(R, 1), m2.scalar(R, 1), lam[0], lam[1])
    uinv = m2.torus(R, m2.scalar(R, 1), m2.scalar(R, 1), -lam[0], -lam[1])

    def in_Ju(Z: m2.M2):
        ok1 = Z.member(fpos, fneg)[0]
        Zc = uinv.repeat(len(Z)) @ Z @ u.repeat(len(Z))
        return ok1 & Zc.member(fpos, fneg)[0]

    # right cosets J_u r: r_i r_j^-1 in J_u iff i = j; use left cosets of the inverses
    inv = reps.inverse()
    distinct = m2.distinct_cosets(inv, in_Ju)
    # covering: random elements of J land in J_u r for some representative
    rng = np.random.default_rng(0)
    cover_ok = True
    for _ in range(20):
        a = rng.integers(0, R.pw, size=(1, R.e)) * p ** fpos % R.pw
        b = rng.integers(0, R.pw, size=(1, R.e)) * p ** fneg % R.pw
        j = m2.upper(R, a) @ m2.lower(R, b)
        Z = j.repeat(len(inv)) @ inv
        if not in_Ju(Z).any():
            cover_ok = False
    report["transversal"] = {"size": len(reps), "distinct": distinct, "covers": cover_ok}
    return distinct and cover_ok and len(reps) == report["predicted"]


def _volume_sampled(tp: TypeDatum, nu_v, N: int, samples: int, seed: int, report: dict) -> bool:
    """Groups beyond SL2: sampled pairs of ordered-product representatives lie in distinct cosets."""
    datum = tp.datum
    p, r = tp.chi.p, tp.chi.layer
    spec = LocalRingSpec(p, r, N + 2 * max(abs(pair(rt, nu_v)) for rt in datum.roots) + 2)
    pos_roots = [i for i in datum.positive if pair(datum.roots[i], nu_v) > 0]
    rng = random.Random(seed)

    def rep():
        gens = []
        for i in sorted(pos_roots, key=lambda j: -datum.height(j)):
            f = tp.f[i]
            g = f + pair(datum.roots[i], nu_v)
            digits = [rng.randrange(p ** (g - f)) for _ in range(r)]
            gens.append((i, spec.element([d * p ** f for d in digits])))
        return gens

    bad = 0
    tried = 0
    for _ in range(samples):
        a, b = rep(), rep()
        key_a = tuple((i, x.coeffs) for i, x in a)
        key_b = tuple((i, x.coeffs) for i, x in b)
        if key_a == key_b:
            continue
        tried += 1
        z = GroupWord(datum.name, spec, tuple(RootElt(i, x) for i, x in a)) + \
            GroupWord(datum.name, spec, tuple(RootElt(i, x) for i, x in b)).inverse()
        # z in J_u iff z in J and u^-1 z u in J; z lies in the unipotent radical, so test depths
        nf = normal_form(z)
        inside = True
        for i, x in nf.neg + nf.pos:
            need = max(tp.f[i], tp.f[i] + pair(datum.roots[i], nu_v))
            if x.valuation < need:
                inside = False
        if inside:
            bad += 1
    report["sampled"] = {"pairs": tried, "collisions": bad}
    return bad == 0


# ---------------------------------------------------------------------------
# axiom for u
# ---------------------------------------------------------------------------

@dataclass
class AxiomCensus:
    w: WeylElement
    cosets: int
    satisfying: list
    witnesses: dict
    missing: list

    @property
    def ok(self) -> bool:
        return len(self.satisfying) == 1 and self.satisfying[0] == () and not self.missing


def _coset_reps_for_w(tp: TypeDatum, w: WeylElement, spec: LocalRingSpec):
    """Ordered products over roots in w^-1 Phi^- of u_alpha(a), a in p^{f_I} O / p^{f_J} O."""
    datum = tp.datum
    fI = iwahori_depths(datum)
    roots = [i for i in range(len(datum.roots)) if not datum.is_positive(datum.weyl_act_root(w, i))]
    roots = sorted(roots, key=lambda i: (-datum.height(i), i))
    choices = []
    for i in roots:
        lo, hi = fI[i], tp.f[i]
        vals = []
        if hi > lo:
            for digits in itertools.product(range(tp.chi.p ** (hi - lo)), repeat=spec.e):
                vals.append(spec.element([d * tp.chi.p ** lo for d in digits]))
        else:
            vals.append(spec.zero())
        choices.append(vals)
    for combo in itertools.product(*choices):
        yield tuple((i, a) for i, a in zip(roots, combo) if not a.is_zero())


def verify_axiom_u(cls: PrincipalClass, w: WeylElement, N: int = 5) -> AxiomCensus:
    """Census of u in (I cap ^{w^-1}Nbar)/(J cap ^{w^-1}Nbar) with rho trivial on J cap ^{u^-1 w^-1}N (P = B).

    A coset fails when a witness u' = u_{-alpha_k}(b) in ^{w^-1}N gives u^-1 u' u in J
    with rho(u^-1 u' u) != 1; the identity is checked on the root generators of J cap ^{w^-1}N.
    """
    tp = build_type(cls)
    datum = tp.datum
    e = tp.chi.coords[0].e if datum.h is not None else 1
    spec = LocalRingSpec(tp.chi.p, e, N)
    cond = conductors(tp.chi)
    # roots alpha with w alpha > 0 span ^{w^-1}N
    upstairs = [i for i in range(len(datum.roots)) if datum.is_positive(datum.weyl_act_root(w, i))]
    satisfying, witnesses, missing = [], {}, []
    count = 0
    for u in _coset_reps_for_w(tp, w, spec):
        count += 1
        uw = GroupWord(datum.name, spec, tuple(RootElt(i, a) for i, a in u))
        if not u:
            if _identity_condition(tp, upstairs, spec):
                satisfying.append(())
            continue
        wit = _find_witness(tp, u, uw, upstairs, cond, spec)
        if wit is None:
            key = tuple((i, a.coeffs) for i, a in u)
            missing.append(key)
        else:
            witnesses[tuple((i, a.coeffs) for i, a in u)] = wit
    return AxiomCensus(w, count, satisfying, witnesses, missing)


def _identity_condition(tp: TypeDatum, upstairs, spec) -> bool:
    for i in upstairs:
        for d in range(1, spec.p):
            g = GroupWord(tp.datum.name, spec, (RootElt(i, spec.element(d * spec.p ** tp.f[i])),))
            if rho_exponent(tp, g) != 0:
                return False
    return True


def _find_witness(tp: TypeDatum, u, uw: GroupWord, upstairs, cond, spec):
    """Search u' = u_{-alpha}(b), -alpha in ^{w^-1}Phi^+, b in p^{c_u} O, as in the constructive proof."""
    datum = tp.datum
    cu = max(cond[i] - 1 - a.valuation for i, a in u)
    order = sorted(u, key=lambda t: (-(cond[t[0]] - 1 - t[1].valuation), abs(datum.height(t[0]))))
    for i, a in order:
        j = datum.neg(i)
        if j not in upstairs:
            continue
        for c in sorted({cu, max(cu, 1), cu + 1}):
            for digits in itertools.product(range(spec.p), repeat=spec.e):
                if not any(digits):
                    continue
                b = spec.element([d * spec.p ** c for d in digits])
                conj = uw.inverse() + GroupWord(datum.name, spec, (RootElt(j, b),)) + uw
                if not membership_depth(conj, tp.depths):
                    continue
                if rho_exponent(tp, conj) != 0:
                    return {"root": j, "b": b.coeffs, "c": c}
    return None
