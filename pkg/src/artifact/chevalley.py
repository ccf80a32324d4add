"""Chevalley generators, words, matrix oracles and the Iwahori collection algorithm.

Every catalog group comes with a faithful matrix model: the natural
representation with weights mu_k, root vectors X_alpha with entries +-1 and
X_{-alpha} = X_alpha^T.  Structure constants and signs of the commutator
relations are read off this model, never chosen by hand.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import NotInIwahori, PrecisionExhausted, SpecMismatch
from .padic_arith import LocalRingSpec, TruncatedElement, frobenius
from .root_data import (
    BasedRootDatum,
    WeylElement,
    build_root_datum,
    coords_of_cochar,
    pair,
    weyl_generate,
)

_WEIGHTS = {
    "SL2": ((1, 0), (0, 1)),
    "GL2": ((1, 0), (0, 1)),
    "SL3": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "SU3": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "Sp4": ((1, 0), (0, 1), (0, -1), (-1, 0)),
}

_FORMS = {
    "Sp4": ((0, 0, 0, 1), (0, 0, 1, 0), (0, -1, 0, 0), (-1, 0, 0, 0)),
    "SU3": ((0, 0, 1), (0, -1, 0), (1, 0, 0)),
}


class GroupModel:
    """Matrix realization of a catalog group over Z (base change to any ring)."""

    def __init__(self, datum: BasedRootDatum):
        self.datum = datum
        self.weights = _WEIGHTS[datum.name]
        self.n = len(self.weights)
        self.form = np.array(_FORMS[datum.name], dtype=np.int64) if datum.name in _FORMS else None
        self.X = self._root_vectors()

    def _root_vectors(self) -> list[np.ndarray]:
        d, n = self.datum, self.n
        X: list = [None] * len(d.roots)
        for i in d.positive:
            pos = [(k, l) for k in range(n) for l in range(n)
                   if tuple(a - b for a, b in zip(self.weights[k], self.weights[l])) == d.roots[i]]
            found = None
            for signs in itertools.product((1, -1), repeat=len(pos) - 1):
                M = np.zeros((n, n), dtype=np.int64)
                for (k, l), s in zip(pos, (1,) + signs):
                    M[k, l] = s
                if self.datum.name == "Sp4":
                    Jf = self.form
                    if (M.T @ Jf + Jf @ M).any():
                        continue
                found = M
                break
            X[i] = found
            X[d.neg(i)] = found.T.copy()
        return X

    def position(self, i: int) -> tuple[int, int]:
        """First matrix position carrying root i."""
        k, l = np.argwhere(self.X[i] != 0)[0]
        return int(k), int(l)

    def diag_exponents(self, cochar: Sequence[int]) -> list[int]:
        return [pair(mu, cochar) for mu in self.weights]

    # integer matrices (payload 1) used for reading off constants
    def u_int(self, i: int, a: int) -> np.ndarray:
        return np.eye(self.n, dtype=np.int64) + a * self.X[i]

    def weyl_int(self, w: WeylElement) -> np.ndarray:
        M = np.eye(self.n, dtype=np.int64)
        for k in w.word:
            i = self.datum.simple[k]
            j = self.datum.neg(i)
            n_i = self.u_int(i, 1) @ self.u_int(j, -1) @ self.u_int(i, 1)
            M = M @ n_i
        return M


@lru_cache(maxsize=None)
def model_for(name: str) -> GroupModel:
    return GroupModel(build_root_datum(name))


# ---------------------------------------------------------------------------
# structure constants
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def structure_constants(name: str) -> dict[tuple[int, int], tuple[tuple[int, int, int, int], ...]]:
    """(alpha, beta) -> ((i, j, gamma, C), ...) with

    [u_alpha(a), u_beta(b)] = prod over the tuple, in order, of u_gamma(C a^i b^j),
    for all alpha != +-beta, where [x, y] = x y x^-1 y^-1.
    """
    m = model_for(name)
    d = m.datum
    out = {}
    for a in range(len(d.roots)):
        for b in range(len(d.roots)):
            if a == b or d.roots[a] == tuple(-x for x in d.roots[b]):
                continue
            Y = m.u_int(a, 1) @ m.u_int(b, 1) @ m.u_int(a, -1) @ m.u_int(b, -1)
            terms = []
            for i, j, g in d.combos(a, b):
                k, l = m.position(g)
                C = int(Y[k, l] // m.X[g][k, l])
                terms.append((i, j, g, C))
                Y = m.u_int(g, -C) @ Y
            if (Y != np.eye(m.n, dtype=np.int64)).any():
                raise ArithmeticError(f"commutator of roots {a},{b} did not peel to the identity")
            out[(a, b)] = tuple(terms)
    return out


@lru_cache(maxsize=None)
def opposite_signs(name: str) -> tuple[int, int]:
    """(e1, e2) in [u_a(a), u_-a(b)] = u_a(e1 a^2 b/(1-ab)) (-a^vee)(1-ab) u_-a(e2 a b^2/(1-ab)).

    Read from the SL2 block of the first simple root at a = 1, b = 3 over Q.
    """
    from fractions import Fraction

    m = model_for(name)
    i = m.datum.simple[0]
    j = m.datum.neg(i)
    a, b = 1, 3
    Y = m.u_int(i, a) @ m.u_int(j, b) @ m.u_int(i, -a) @ m.u_int(j, -b)
    k, l = m.position(i)
    # UDL of the 2x2 block
    y = [[Fraction(int(Y[k, k])), Fraction(int(Y[k, l]))], [Fraction(int(Y[l, k])), Fraction(int(Y[l, l]))]]
    U = y[0][1] / y[1][1] / m.X[i][k, l]
    L = y[1][0] / y[1][1] / m.X[j][l, k]
    base = Fraction(1, 1 - a * b)
    e1 = U / (a * a * b * base)
    e2 = L / (a * b * b * base)
    return int(e1), int(e2)


# ---------------------------------------------------------------------------
# generators and words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootElt:
    root: int
    payload: TruncatedElement


@dataclass(frozen=True)
class TorusElt:
    """prod_i lambda_i(units_i) * tau(p), in coordinates of the cocharacter basis of X_*(T)."""

    units: tuple[TruncatedElement, ...]
    translation: tuple[int, ...] = ()


@dataclass(frozen=True)
class WeylRep:
    w: WeylElement


Generator = RootElt | TorusElt | WeylRep


@dataclass(frozen=True)
class GroupWord:
    group: str
    spec: LocalRingSpec
    gens: tuple = ()

    def __add__(self, other: "GroupWord") -> "GroupWord":
        if other.group != self.group or other.spec != self.spec:
            raise SpecMismatch("words over different groups or rings")
        return GroupWord(self.group, self.spec, self.gens + other.gens)

    def inverse(self) -> "GroupWord":
        out = []
        for g in reversed(self.gens):
            out.append(_inv_gen(g, self))
        return GroupWord(self.group, self.spec, tuple(out))

    @property
    def datum(self) -> BasedRootDatum:
        return build_root_datum(self.group)

    def to_record(self) -> list:
        rec = []
        for g in self.gens:
            if isinstance(g, RootElt):
                rec.append(["u", g.root, list(g.payload.coeffs)])
            elif isinstance(g, TorusElt):
                rec.append(["t", [list(u.coeffs) for u in g.units], list(g.translation)])
            else:
                rec.append(["n", list(g.w.word)])
        return rec


def _inv_gen(g, word: GroupWord):
    if isinstance(g, RootElt):
        return RootElt(g.root, -g.payload)
    if isinstance(g, TorusElt):
        return TorusElt(tuple(u.inverse() for u in g.units), tuple(-x for x in g.translation))
    raise NotInIwahori("inverse of a Weyl representative is not a generator word")


def word(group: str, spec: LocalRingSpec, *gens) -> GroupWord:
    return GroupWord(group, spec, tuple(gens))


def u(i: int, a: TruncatedElement) -> RootElt:
    return RootElt(i, a)


def coroot_point(datum: BasedRootDatum, i: int, c: TruncatedElement) -> TorusElt:
    """alpha_i^vee(c) in torus-basis coordinates."""
    n = coords_of_cochar(datum, datum.coroots[i])
    return TorusElt(tuple(c ** k for k in n))


def torus_root_value(datum: BasedRootDatum, i: int, t: TorusElt) -> TruncatedElement:
    """alpha_i(t) for a compact torus point."""
    spec = t.units[0].spec
    out = spec.one()
    for c, lam in zip(t.units, datum.cochar_basis):
        out = out * c ** pair(datum.roots[i], lam)
    return out


# ---------------------------------------------------------------------------
# matrix oracle
# ---------------------------------------------------------------------------

@dataclass
class PMatrix:
    """p^-shift * data, with data an integer matrix over O/p^N of shape (n, n, e)."""

    data: np.ndarray
    shift: int
    spec: LocalRingSpec

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        from ._kernels import np_matmul

        R = _ring(self.spec)
        return PMatrix(np_matmul(self.data, other.data, R), self.shift + other.shift, self.spec)

    def normalized(self) -> "PMatrix":
        d, s = self.data, self.shift
        p = self.spec.p
        while s > 0 and not (d % p).any():
            d = d // p
            s -= 1
        return PMatrix(d, s, self.spec)

    def equals(self, other: "PMatrix") -> bool:
        a, b = self, other
        p = self.spec.p
        if a.shift != b.shift:
            hi, lo = (a, b) if a.shift > b.shift else (b, a)
            lo_scaled = lo.data * p ** (hi.shift - lo.shift) % self.spec.pN
            return bool((hi.data % self.spec.pN == lo_scaled).all())
        return bool((a.data == b.data).all())

    def entry(self, k: int, l: int) -> TruncatedElement:
        if self.shift:
            raise PrecisionExhausted("entry of a non-integral matrix")
        return TruncatedElement(self.spec, tuple(int(x) for x in self.data[k, l]))

    def is_integral(self) -> bool:
        return self.normalized().shift == 0


@lru_cache(maxsize=None)
def _ring(spec: LocalRingSpec):
    from ._kernels import Ring

    return Ring.from_spec(spec)


def identity(spec: LocalRingSpec, n: int) -> PMatrix:
    d = np.zeros((n, n, spec.e), dtype=np.int64)
    for k in range(n):
        d[k, k, 0] = 1
    return PMatrix(d, 0, spec)


def _scalar_mat(spec, n, entries: dict) -> np.ndarray:
    d = np.zeros((n, n, spec.e), dtype=np.int64)
    for (k, l), v in entries.items():
        d[k, l] = np.array(v.coeffs if isinstance(v, TruncatedElement) else spec.element(v).coeffs)
    return d


def generator_matrix(group: str, spec: LocalRingSpec, g) -> PMatrix:
    m = model_for(group)
    n = m.n
    if isinstance(g, RootElt):
        d = identity(spec, n).data
        X = m.X[g.root]
        for k, l in np.argwhere(X != 0):
            d[k, l] = np.array((g.payload * int(X[k, l])).coeffs)
        return PMatrix(d, 0, spec)
    if isinstance(g, TorusElt):
        datum = m.datum
        diag = [spec.one() for _ in range(n)]
        lifts = [0] * n
        for c, lam in zip(g.units, datum.cochar_basis):
            ex = m.diag_exponents(lam)
            for k in range(n):
                diag[k] = diag[k] * c ** ex[k]
        if g.translation:
            from .root_data import cochar_from_coords

            tau = cochar_from_coords(datum, g.translation)
            lifts = m.diag_exponents(tau)
        shift = max(0, -min(lifts))
        d = np.zeros((n, n, spec.e), dtype=np.int64)
        for k in range(n):
            d[k, k] = np.array((diag[k] * spec.element(spec.p ** (lifts[k] + shift))).coeffs)
        return PMatrix(d, shift, spec)
    if isinstance(g, WeylRep):
        M = m.weyl_int(g.w)
        d = np.zeros((n, n, spec.e), dtype=np.int64)
        d[..., 0] = M % spec.pN
        return PMatrix(d, 0, spec)
    raise TypeError(f"unknown generator {g!r}")


def matrix_oracle(g: GroupWord) -> PMatrix:
    out = identity(g.spec, model_for(g.group).n)
    for gen in g.gens:
        out = out @ generator_matrix(g.group, g.spec, gen)
    return out.normalized()


def check_in_group(g: GroupWord) -> bool:
    """The oracle image preserves the defining form (Sp4) or has determinant one (SL)."""
    M = matrix_oracle(g)
    m = model_for(g.group)
    if m.form is not None and g.group == "Sp4" and M.shift == 0:
        R = _ring(g.spec)
        from ._kernels import np_matmul

        Jm = np.zeros((m.n, m.n, g.spec.e), dtype=np.int64)
        Jm[..., 0] = m.form % g.spec.pN
        MT = np.transpose(M.data, (1, 0, 2))
        lhs = np_matmul(np_matmul(MT, Jm, R), M.data, R)
        return bool((lhs == Jm).all())
    return True


# ---------------------------------------------------------------------------
# Galois actions and norms
# ---------------------------------------------------------------------------

def galois_act(kind: str, power: int, g: GroupWord) -> GroupWord:
    """kind 'theta': Frobenius of the layer on payloads; kind 'h': the quasi-split twist."""
    d = g.datum
    out = []
    for gen in g.gens:
        if kind == "theta" or d.h is None:
            if isinstance(gen, RootElt):
                out.append(RootElt(gen.root, frobenius(gen.payload, power)))
            elif isinstance(gen, TorusElt):
                out.append(TorusElt(tuple(frobenius(c, power) for c in gen.units), gen.translation))
            else:
                out.append(gen)
            continue
        for _ in range(power % d.h.order):
            gen = _h_gen(d, gen)
        out.append(gen)
    return GroupWord(g.group, g.spec, tuple(out))


def _h_gen(d: BasedRootDatum, gen):
    h = d.h
    if isinstance(gen, RootElt):
        return RootElt(h.perm[gen.root], frobenius(gen.payload, 1) * h.x_const[gen.root])
    if isinstance(gen, TorusElt):
        # t = prod lambda_i(c_i) -> prod (h lambda_i)(sigma c_i)
        spec = gen.units[0].spec
        new = [spec.one() for _ in gen.units]
        H = np.array(h.matrix)
        for c, lam in zip(gen.units, d.cochar_basis):
            img = coords_of_cochar(d, tuple(int(x) for x in H @ np.array(lam)))
            for k, ex in enumerate(img):
                new[k] = new[k] * frobenius(c, 1) ** ex
        return TorusElt(tuple(new), gen.translation)
    raise NotImplementedError("h acts on Weyl representatives through the matrix twin only")


def galois_matrix(kind: str, power: int, M: PMatrix, group: str) -> PMatrix:
    """Semilinear twin of galois_act on oracle matrices."""
    from ._kernels import np_frob

    R = _ring(M.spec)
    d = M.data
    m = model_for(group)
    if kind == "theta" or m.datum.h is None:
        return PMatrix(np_frob(d, R, power), M.shift, M.spec)
    out = M
    for _ in range(power % 2):
        inv = _matrix_inverse(out)
        J = np.zeros_like(d)
        J[..., 0] = m.form % M.spec.pN
        t = PMatrix(np.transpose(np_frob(inv.data, R, 1), (1, 0, 2)).copy(), inv.shift, M.spec)
        out = PMatrix(J, 0, M.spec) @ t @ PMatrix(J, 0, M.spec)
    return out


def _matrix_inverse(M: PMatrix) -> PMatrix:
    """Inverse of an integral matrix with unit determinant, via Gauss-Jordan over O/p^N."""
    if M.shift:
        raise PrecisionExhausted("inverse needs an integral matrix")
    spec = M.spec
    n = M.data.shape[0]
    A = [[M.entry(k, l) for l in range(n)] for k in range(n)]
    I = [[spec.one() if k == l else spec.zero() for l in range(n)] for k in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col].valuation == 0), None)
        if piv is None:
            raise NotInIwahori("matrix is not invertible over the integers")
        A[col], A[piv] = A[piv], A[col]
        I[col], I[piv] = I[piv], I[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        I[col] = [x * inv for x in I[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                I[r] = [x - f * y for x, y in zip(I[r], I[col])]
    d = np.zeros_like(M.data)
    for k in range(n):
        for l in range(n):
            d[k, l] = np.array(I[k][l].coeffs)
    return PMatrix(d, 0, spec)


def norm_map_group(delta: GroupWord, r: int) -> GroupWord:
    """N_r delta = delta theta(delta) ... theta^{r-1}(delta)."""
    out = GroupWord(delta.group, delta.spec, ())
    for i in range(r):
        out = out + galois_act("theta", i, delta)
    return out


# ---------------------------------------------------------------------------
# collection into Iwahori normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IwahoriNormalForm:
    group: str
    spec: LocalRingSpec
    neg: tuple[tuple[int, TruncatedElement], ...]
    torus: tuple[TruncatedElement, ...]
    pos: tuple[tuple[int, TruncatedElement], ...]

    def to_word(self) -> GroupWord:
        gens = [RootElt(i, a) for i, a in self.neg]
        gens.append(TorusElt(self.torus))
        gens += [RootElt(i, a) for i, a in self.pos]
        return GroupWord(self.group, self.spec, tuple(gens))

    def payload(self, i: int) -> TruncatedElement | None:
        for j, a in self.neg + self.pos:
            if j == i:
                return a
        return None

    def valuations(self) -> dict[int, int]:
        return {i: a.valuation for i, a in self.neg + self.pos}


def _order_key(d: BasedRootDatum, gen) -> tuple:
    if isinstance(gen, TorusElt):
        return (1, 0, 0)
    h = d.height(gen.root)
    return (0, h, gen.root) if h < 0 else (2, h, gen.root)


def normal_form(g: GroupWord, budget: int = 200000) -> IwahoriNormalForm:
    d = g.datum
    spec = g.spec
    if d.h is not None and spec.e % d.splitting_degree:
        raise SpecMismatch("quasi-split words live over the splitting field")
    C = structure_constants(g.group)
    facs: list = []
    for gen in g.gens:
        if isinstance(gen, WeylRep):
            raise NotInIwahori("Weyl representatives have no Iwahori normal form")
        if isinstance(gen, TorusElt):
            if any(gen.translation):
                raise NotInIwahori("non-compact torus factor")
            if any(c.valuation != 0 for c in gen.units):
                raise NotInIwahori("torus coordinates must be units")
        facs.append(gen)
    steps = 0
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(facs) - 1:
            steps += 1
            if steps > budget:
                raise PrecisionExhausted("collection did not terminate within the budget")
            x, y = facs[i], facs[i + 1]
            if isinstance(x, RootElt) and x.payload.is_zero():
                del facs[i]
                changed = True
                continue
            if isinstance(y, RootElt) and y.payload.is_zero():
                del facs[i + 1]
                changed = True
                continue
            kx, ky = _order_key(d, x), _order_key(d, y)
            if kx == ky:
                facs[i:i + 2] = [_merge(x, y)]
                changed = True
                continue
            if kx < ky:
                i += 1
                continue
            facs[i:i + 2] = _swap(d, C, x, y)
            changed = True
        if facs and isinstance(facs[-1], RootElt) and facs[-1].payload.is_zero():
            facs.pop()
            changed = True
    neg, pos = [], []
    torus = tuple(spec.one() for _ in d.cochar_basis)
    for f in facs:
        if isinstance(f, TorusElt):
            torus = f.units
        elif d.is_positive(f.root):
            pos.append((f.root, f.payload))
        else:
            if f.payload.valuation < 1:
                raise NotInIwahori(f"negative root {f.root} payload has valuation 0")
            neg.append((f.root, f.payload))
    return IwahoriNormalForm(g.group, spec, tuple(neg), torus, tuple(pos))


def _merge(x, y):
    if isinstance(x, TorusElt):
        return TorusElt(tuple(a * b for a, b in zip(x.units, y.units)))
    return RootElt(x.root, x.payload + y.payload)


def _swap(d: BasedRootDatum, C, x, y) -> list:
    """Rewrite the out-of-order pair x*y as an equal product with y moved left."""
    if isinstance(x, TorusElt):  # t u_b(b) = u_b(b(t) b) t, b negative
        return [RootElt(y.root, torus_root_value(d, y.root, x) * y.payload), x]
    if isinstance(y, TorusElt):  # u_a(a) t = t u_a(a(t)^-1 a)
        return [y, RootElt(x.root, torus_root_value(d, x.root, y).inverse() * x.payload)]
    if d.roots[x.root] == tuple(-c for c in d.roots[y.root]):
        a, b = x.payload, y.payload
        s = a.spec.one() + a * b
        if s.valuation != 0:
            raise NotInIwahori("1 + ab is not a unit")
        si = s.inverse()
        return [RootElt(y.root, b * si), coroot_point(d, x.root, s), RootElt(x.root, a * si)]
    # x y = y x [x^-1, y^-1]
    out = [y, x]
    ma, mb = -x.payload, -y.payload
    for i, j, gidx, c in C[(x.root, y.root)]:
        out.append(RootElt(gidx, (ma ** i) * (mb ** j) * c))
    return out


def membership_depth(g: GroupWord, depths: dict[int, int], torus_depth: int = 0) -> bool:
    """True iff g lies in the group generated by u_alpha(p^depths[alpha]) and ^0T (or 1+p^torus_depth)."""
    try:
        nf = normal_form(g)
    except NotInIwahori:
        return False
    for i, a in nf.neg + nf.pos:
        if a.valuation < depths[i]:
            return False
    if torus_depth:
        one = g.spec.one()
        return all((c - one).valuation >= torus_depth for c in nf.torus)
    return True


# ---------------------------------------------------------------------------
# random words
# ---------------------------------------------------------------------------

def random_iwahori_word(group: str, spec: LocalRingSpec, rng: random.Random, length: int = 6,
                        depths: dict[int, int] | None = None) -> GroupWord:
    d = build_root_datum(group)
    if depths is None:
        depths = {i: (0 if d.is_positive(i) else 1) for i in range(len(d.roots))}
    gens = []
    for _ in range(length):
        if rng.random() < 0.2:
            gens.append(TorusElt(tuple(spec.random(rng, unit=True) for _ in d.cochar_basis)))
        else:
            i = rng.randrange(len(d.roots))
            gens.append(RootElt(i, spec.random(rng, min_val=depths[i])))
    return GroupWord(group, spec, tuple(gens))


def random_word(group: str, spec: LocalRingSpec, rng: random.Random, length: int = 6) -> GroupWord:
    """Arbitrary words including Weyl representatives (for oracle multiplicativity)."""
    d = build_root_datum(group)
    W = weyl_generate(d)
    gens = []
    for _ in range(length):
        r = rng.random()
        if r < 0.15:
            gens.append(WeylRep(rng.choice(W)))
        elif r < 0.3:
            gens.append(TorusElt(tuple(spec.random(rng, unit=True) for _ in d.cochar_basis)))
        else:
            i = rng.randrange(len(d.roots))
            gens.append(RootElt(i, spec.random(rng)))
    return GroupWord(group, spec, tuple(gens))


# ---------------------------------------------------------------------------
# commutator relations against the oracle
# ---------------------------------------------------------------------------

def commutator(x: GroupWord, y: GroupWord) -> GroupWord:
    """[x, y] = x y x^-1 y^-1."""
    return x + y + x.inverse() + y.inverse()


def _same(a: GroupWord, b: GroupWord) -> bool:
    return matrix_oracle(a).equals(matrix_oracle(b))


@dataclass
class RelationReport:
    group: str
    counts: dict
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_relations(group: str, spec: LocalRingSpec, rng: random.Random, trials: int = 1000) -> RelationReport:
    """Relations (1) non-opposite roots, (2) opposite roots, (3) torus against root, on random payloads."""
    d = build_root_datum(group)
    C = structure_constants(group)
    e1, e2 = opposite_signs(group)
    counts = {"1": 0, "2": 0, "3": 0}
    failures = []
    nroots = len(d.roots)
    one = spec.one()
    for t in range(trials):
        kind = t % 3
        i = rng.randrange(nroots)
        others = [k for k in range(nroots) if k != i and k != d.neg(i)]
        if kind == 0 and not others:  # rank one: relation (1) is vacuous
            kind = 1 + t % 2
        if kind == 0:
            j = rng.choice(others)
            a, b = spec.random(rng), spec.random(rng)
            lhs = commutator(word(group, spec, RootElt(i, a)), word(group, spec, RootElt(j, b)))
            rhs = word(group, spec, *(RootElt(g, (a ** ii) * (b ** jj) * c) for ii, jj, g, c in C[(i, j)]))
            key = "1"
        elif kind == 1:
            j = d.neg(i)
            a, b = spec.random(rng), spec.random(rng, min_val=1)
            s = one - a * b
            si = s.inverse()
            lhs = commutator(word(group, spec, RootElt(i, a)), word(group, spec, RootElt(j, b)))
            rhs = word(group, spec, RootElt(i, a * a * b * si * e1), coroot_point(d, i, si),
                       RootElt(j, a * b * b * si * e2))
            key = "2"
        else:
            j = rng.randrange(nroots)
            b = spec.random(rng, min_val=1)
            a = spec.random(rng)
            k = pair(d.coroots[i], d.roots[j])
            tt = coroot_point(d, i, one + b)
            lhs = commutator(word(group, spec, tt), word(group, spec, RootElt(j, a)))
            rhs = word(group, spec, RootElt(j, ((one + b) ** k - one) * a))
            key = "3"
        counts[key] += 1
        if not _same(lhs, rhs):
            failures.append((key, i, lhs.to_record()))
    return RelationReport(group, counts, failures)


def verify_normal_form_roundtrip(group: str, spec: LocalRingSpec, rng: random.Random, trials: int = 200,
                                 length: int = 6) -> int:
    """Number of random Iwahori words whose normal form disagrees with the oracle."""
    bad = 0
    for _ in range(trials):
        g = random_iwahori_word(group, spec, rng, length)
        nf = normal_form(g)
        if not _same(nf.to_word(), g) or normal_form(nf.to_word()) != nf:
            bad += 1
    return bad
