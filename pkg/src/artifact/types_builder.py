"""Types (J_s, rho_s) of principal-series blocks, built from root conductors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .characters import (
    SmoothCharacter,
    StabilizerW0chi,
    TorusPoint,
    conductors,
    stabilizer_W0chi,
    unit_group,
)
from .chevalley import GroupWord, PMatrix, membership_depth, model_for, normal_form
from .errors import ConfigError, NonClosedSubsystem, NotInType
from .padic_arith import LocalRingSpec, TruncatedElement
from .root_data import BasedRootDatum, weyl_group_order
from .scalars import Cyclo


@dataclass(frozen=True)
class PrincipalClass:
    datum: BasedRootDatum
    chi: SmoothCharacter

    @property
    def layer(self) -> int:
        return self.chi.layer

    def __post_init__(self):
        p = self.chi.p
        if weyl_group_order(self.datum) % p == 0:
            raise ConfigError(f"p={p} divides |W_E|={weyl_group_order(self.datum)}")


@dataclass(frozen=True)
class ConcaveFunction:
    values: tuple[int, ...]  # indexed like datum.roots

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def as_dict(self) -> dict[int, int]:
        return dict(enumerate(self.values))


def concave_function(cls: PrincipalClass) -> ConcaveFunction:
    """f(alpha) = [cond/2] on positive roots and [(cond+1)/2] on negative roots."""
    d = cls.datum
    cond = conductors(cls.chi)
    vals = []
    for i in range(len(d.roots)):
        c = cond[i]
        vals.append(c // 2 if d.is_positive(i) else (c + 1) // 2)
    return ConcaveFunction(tuple(vals))


def is_concave(datum: BasedRootDatum, f: ConcaveFunction) -> bool:
    for i in range(len(datum.roots)):
        for j in range(len(datum.roots)):
            k = datum.sum_root(i, j)
            if k is not None and f[k] > f[i] + f[j]:
                return False
    return True


@dataclass(frozen=True)
class TwistedLeviSequence:
    subsystems: tuple[frozenset, ...]
    depths: tuple[int, ...]  # r_1 >= r_2 > ... > r_d

    @property
    def d(self) -> int:
        return len(self.depths)


def twisted_levi_from_conductors(cls: PrincipalClass, cond: dict[int, int] | None = None) -> TwistedLeviSequence:
    """Phi(G^1) = Phi and Phi(G^i) = {cond <= r_i}, the r_i (i >= 2) being the distinct values cond-1 > 0.

    `cond` overrides the computed conductors, which lets callers probe the
    closure check with conductor patterns no character produces.
    """
    d = cls.datum
    cond = cond if cond is not None else conductors(cls.chi)
    allroots = frozenset(range(len(d.roots)))
    thresholds = sorted({c - 1 for c in cond.values() if c >= 2}, reverse=True)
    r1 = cls.chi.depth_level - 1
    subs = [allroots]
    for r in thresholds:
        s = frozenset(i for i in allroots if cond[i] <= r)
        if not d.is_closed(s):
            raise NonClosedSubsystem(f"{{alpha : cond(alpha) <= {r}}} is not a closed subsystem")
        subs.append(s)
    depths = (max(r1, thresholds[0] if thresholds else 0),) + tuple(thresholds)
    return TwistedLeviSequence(tuple(subs), depths)


@dataclass(frozen=True)
class TypeDatum:
    cls: PrincipalClass
    f: ConcaveFunction

    @property
    def datum(self) -> BasedRootDatum:
        return self.cls.datum

    @property
    def chi(self) -> SmoothCharacter:
        return self.cls.chi

    @property
    def depths(self) -> dict[int, int]:
        return self.f.as_dict()

    def is_iwahori(self) -> bool:
        return self.f.values == iwahori_depths(self.datum).values

    def index_in_iwahori(self, q: int) -> int:
        """[I : J] = prod over roots of q^(f_J - f_I)."""
        fi = iwahori_depths(self.datum)
        out = 1
        for i in range(len(self.datum.roots)):
            out *= q ** (self.f[i] - fi[i])
        return out


def iwahori_depths(datum: BasedRootDatum) -> ConcaveFunction:
    return ConcaveFunction(tuple(0 if datum.is_positive(i) else 1 for i in range(len(datum.roots))))


def build_type(cls: PrincipalClass) -> TypeDatum:
    f = concave_function(cls)
    if not is_concave(cls.datum, f):
        raise NonClosedSubsystem("conductor depths are not concave")
    return TypeDatum(cls, f)


def rho_exponent(tp: TypeDatum, g: GroupWord) -> int:
    """k with rho(g) = zeta_M^k, M = chi.order."""
    if not membership_depth(g, tp.depths):
        raise NotInType("element is not in J_s")
    nf = normal_form(g)
    return tp.chi.exponent(TorusPoint(tuple(nf.torus)))


def rho_eval(tp: TypeDatum, g: GroupWord) -> Cyclo:
    return Cyclo.zeta(tp.chi.order, rho_exponent(tp, g))


# ---------------------------------------------------------------------------
# matrix-level membership (LDU with depth bounds)
# ---------------------------------------------------------------------------

def torus_coords_from_diag(datum: BasedRootDatum, diag: Sequence[TruncatedElement]) -> tuple[TruncatedElement, ...]:
    """Coordinates c_i of prod lambda_i(c_i) from the diagonal of the natural representation."""
    if datum.name == "GL2":
        return tuple(diag)
    out, acc = [], None
    for k in range(datum.rank):
        acc = diag[k] if acc is None else acc * diag[k]
        out.append(acc)
    return tuple(out)


def weight_depth_table(datum: BasedRootDatum, f: ConcaveFunction) -> list[list[int | None]]:
    m = model_for(datum.name)
    n = m.n
    tab = [[None] * n for _ in range(n)]
    for k in range(n):
        for l in range(n):
            if k != l:
                v = tuple(a - b for a, b in zip(m.weights[k], m.weights[l]))
                i = datum.root_index(v)
                tab[k][l] = f[i] if i is not None else 0
    return tab


def ldu(M: PMatrix) -> tuple[list, list, list] | None:
    """L, D, U over the ring with unit pivots; None when a pivot is not a unit."""
    if M.shift:
        return None
    n = M.data.shape[0]
    A = [[M.entry(k, l) for l in range(n)] for k in range(n)]
    spec = M.spec
    L = [[spec.zero()] * n for _ in range(n)]
    U = [[spec.zero()] * n for _ in range(n)]
    D = []
    for k in range(n):
        piv = A[k][k]
        if piv.valuation != 0:
            return None
        inv = piv.inverse()
        D.append(piv)
        for i in range(k + 1, n):
            L[i][k] = A[i][k] * inv
            U[k][i] = A[k][i] * inv
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - L[i][k] * piv * U[k][j]
    return L, D, U


def matrix_in_type(tp_or_datum, M: PMatrix, f: ConcaveFunction | None = None):
    """(True, torus coords) when the matrix lies in the group of depth f, else (False, None)."""
    datum = tp_or_datum.datum if isinstance(tp_or_datum, TypeDatum) else tp_or_datum
    f = f if f is not None else tp_or_datum.f
    M = M.normalized()
    res = ldu(M)
    if res is None:
        return False, None
    L, D, U = res
    tab = weight_depth_table(datum, f)
    n = len(D)
    N = M.spec.N
    for i in range(n):
        for j in range(n):
            if i > j and L[i][j].valuation < min(tab[i][j], N):
                return False, None
            if i < j and U[i][j].valuation < min(tab[i][j], N):
                return False, None
    return True, torus_coords_from_diag(datum, D)


def rho_matrix_exponent(tp: TypeDatum, M: PMatrix) -> int | None:
    ok, coords = matrix_in_type(tp, M)
    if not ok:
        return None
    return tp.chi.exponent(TorusPoint(coords))


@dataclass(frozen=True)
class SupportPrediction:
    stabilizer: StabilizerW0chi
    tp: TypeDatum

    def predicted(self, w, translation=None) -> bool:
        """An element of I w~ I is predicted supported iff it lies in J w~ J and w is in W_0chi."""
        return self.stabilizer.contains(w)

    def intertwines(self, g: PMatrix, g_inv: PMatrix, witnesses: list[PMatrix]) -> tuple[bool, PMatrix | None]:
        """Test rho(g j g^-1) = rho(j) on the given j in J; returns a witness of failure if any."""
        for j in witnesses:
            ej = rho_matrix_exponent(self.tp, j)
            if ej is None:
                continue
            conj = (g @ j @ g_inv).normalized()
            ec = rho_matrix_exponent(self.tp, conj)
            if ec is None:
                continue
            if ec != ej:
                return False, j
        return True, None


def support_prediction(tp: TypeDatum) -> SupportPrediction:
    return SupportPrediction(stabilizer_W0chi(tp.chi), tp)


# ---------------------------------------------------------------------------
# empirical Hecke support (SL2)
# ---------------------------------------------------------------------------

@dataclass
class SupportRow:
    lam: int
    w: int  # 0 = identity, 1 = s
    x: int
    y: int
    in_JwJ: bool
    predicted: bool
    empirical: bool | None  # None: no witness found either way

    @property
    def ok(self) -> bool:
        return self.empirical is not None and self.empirical == self.predicted


@dataclass
class SupportCensus:
    rows: list
    transversals_ok: bool

    @property
    def ok(self) -> bool:
        return self.transversals_ok and all(r.ok for r in self.rows)

    def summary(self) -> dict:
        return {
            "candidates": len(self.rows),
            "in_JwJ": sum(r.in_JwJ for r in self.rows),
            "supported": sum(bool(r.empirical) for r in self.rows),
            "inconclusive": sum(r.empirical is None for r in self.rows),
            "mismatches": sum(not r.ok for r in self.rows),
        }


def _unit_table(ch, c: int) -> np.ndarray:
    spec = LocalRingSpec(ch.p, 1, c)
    tab = np.zeros(ch.p ** c, dtype=np.int64)
    for n in range(ch.p ** c):
        if n % ch.p:
            tab[n] = ch.exponent(spec.element(n))
    return tab


def support_census(tp: TypeDatum, max_len: int = 2, W: int = 16, pool_depth: int = 5) -> SupportCensus:
    """Test every g = x w~ y (x, y over I/J, w~ = t_lam n_w, |lam| <= max_len) for intertwining rho.

    Candidates in J w~ J are tested on the generators of J cap g^-1 J g; the
    others need a witness h in J cap g^-1 J g with rho(g h g^-1) != rho(h).
    """
    from . import _mat2 as m2
    from ._kernels import Ring

    datum = tp.datum
    if datum.name != "SL2" or tp.chi.layer != 1:
        raise ConfigError("the support census runs on SL2 over the base field")
    ch = tp.chi.coords[0]
    p, M = ch.p, ch.order
    c = max(1, ch.level)
    tab = _unit_table(ch, c)
    spec = LocalRingSpec(p, 1, W)
    R = Ring.from_spec(spec)
    pos, neg = datum.positive[0], datum.neg(datum.positive[0])
    fp, fn = tp.f[pos], tp.f[neg]
    stab = stabilizer_W0chi(tp.chi)
    s_in_stab = any(w.length == 1 for w in stab.finite)

    def rho(Z: m2.M2):
        ok, m1, _ = Z.member(fp, fn)
        ex = np.full(len(Z), -1, dtype=np.int64)
        ex[ok] = tab[m1[:, 0] % p ** c] % M
        return ex

    def in_J(Z: m2.M2):
        return Z.member(fp, fn)[0]

    # torus generators and root-element generators of J
    units = [u for u in unit_group(p, 1, c).generators]
    one = m2.scalar(R, 1)

    def torus_gen(u):
        d = np.array(spec.element(u).coeffs, dtype=np.int64)
        di = np.array(spec.element(u).inverse().coeffs, dtype=np.int64)
        return m2.from_entries(R, d, m2.scalar(R, 0), m2.scalar(R, 0), di)

    base_pool = [torus_gen(u) for u in units]
    for k in range(pool_depth + 1):
        for v in range(1, p):
            base_pool.append(m2.upper(R, m2.scalar(R, v * p ** (fp + k))))
            base_pool.append(m2.lower(R, m2.scalar(R, v * p ** (fn + k))))
    pool = base_pool[0]
    for P in base_pool[1:]:
        pool = pool.concat(P)

    I = m2.iwahori_over_j(R, fp, fn)
    transversal_ok = len(I) == tp.index_in_iwahori(p) and m2.distinct_cosets(I, in_J)
    Iinv = I.inverse()
    rows = []
    for lam in range(-max_len, max_len + 1):
        t = m2.torus(R, one, one, lam, -lam)
        for w in (0, 1):
            wt = t @ m2.weyl_s(R) if w else t
            wt_inv = wt.inverse()
            # J / (J cap w~ J w~^-1): depth h(beta) = f(w^-1 beta) + <beta, lam>
            fw_pos, fw_neg = (fn, fp) if w else (fp, fn)
            hp, hn = max(fp, fw_pos + 2 * lam), max(fn, fw_neg - 2 * lam)
            J1 = m2.product_reps(R, (fp, hp), (fn, hn))
            J1_inv = J1.inverse()
            # the representatives must be pairwise distinct modulo J cap w~ J w~^-1
            if len(J1) <= 729:

                def in_cap(Z):
                    return in_J(Z) & in_J(wt_inv.repeat(len(Z)) @ Z @ wt.repeat(len(Z)))

                transversal_ok &= m2.distinct_cosets(J1, in_cap)
            for xi in range(len(I)):
                for yi in range(len(I)):
                    g = Iinv[xi] @ wt @ I[yi]
                    g_inv = Iinv[yi] @ wt_inv @ I[xi]
                    # g in J w~ J: some j1 with w~^-1 j1^-1 g in J
                    Z = wt_inv.repeat(len(J1)) @ J1_inv @ g.repeat(len(J1))
                    hits = np.nonzero(in_J(Z))[0]
                    inside = len(hits) > 0
                    predicted = inside and (w == 0 or s_in_stab)
                    if inside:
                        j2 = Z[int(hits[0])].normalized()
                        j2_inv = j2.inverse()
                        gens = _cap_generators(R, tp, wt, wt_inv, fp, fn, units, torus_gen)
                        H = j2_inv.repeat(len(gens)) @ gens @ j2.repeat(len(gens))
                        empirical = _intertwines(H, g, g_inv, rho, in_J)
                    else:
                        yk = I[yi]
                        H = pool.concat(Iinv[yi].repeat(len(pool)) @ pool @ yk.repeat(len(pool)))
                        conj = g.repeat(len(H)) @ H @ g_inv.repeat(len(H))
                        mask = in_J(conj)
                        a, b = rho(H), rho(conj)
                        empirical = False if (mask & (a != b)).any() else None
                    rows.append(SupportRow(lam, w, xi, yi, inside, predicted, empirical))
    return SupportCensus(rows, bool(transversal_ok))


def _cap_generators(R, tp, wt, wt_inv, fp, fn, units, torus_gen):
    """Torus and root generators of J cap w~^-1 J w~."""
    from . import _mat2 as m2

    p = R.p
    gens = [torus_gen(u) for u in units]
    for depth_base, maker in ((fp, m2.upper), (fn, m2.lower)):
        for k in range(depth_base, R.W // 2):
            E = maker(R, m2.scalar(R, p ** k))
            conj = wt.repeat(1) @ E @ wt_inv.repeat(1)
            if conj.member(fp, fn)[0][0]:
                gens.append(E)
                break
    out = gens[0]
    for G in gens[1:]:
        out = out.concat(G)
    return out


def _intertwines(H, g, g_inv, rho, in_J) -> bool | None:
    conj = g.repeat(len(H)) @ H @ g_inv.repeat(len(H))
    ok_h, ok_c = in_J(H), in_J(conj)
    if not (ok_h & ok_c).all():
        return None
    return bool((rho(H) == rho(conj)).all())


# ---------------------------------------------------------------------------
# closure of U_c and T_c under commutators
# ---------------------------------------------------------------------------

@dataclass
class ClosureReport:
    counts: dict
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def _in_Uc(tp: TypeDatum, nf, c: int) -> bool:
    return all(a.valuation >= max(c, tp.f[i]) for i, a in nf.neg + nf.pos)


def _coroot_parameter(datum, i: int, torus) -> object | None:
    """s with torus = alpha_i^vee(s), or None."""
    from .chevalley import coroot_point
    from .root_data import coords_of_cochar

    n = coords_of_cochar(datum, datum.coroots[i])
    for k, nk in enumerate(n):
        if nk in (1, -1):
            s = torus[k] if nk == 1 else torus[k].inverse()
            return s if coroot_point(datum, i, s).units == tuple(torus) else None
    return None


def commutator_closure(tp: TypeDatum, rng, samples: int = 200, N: int = 8, cmax: int = 2) -> ClosureReport:
    """Sample the three commutator statements for U_c and T_c and check normal-form valuations.

    (a) [u_a(x)^-1, u_b(y)^-1] in <U_c> for a != -b, with same-sign factors when a, b share a sign;
    (b) for b = -a the commutator lies in <U_c, T_c>;
    (c) [t^-1, u_b(y)^-1] in U_c for t = a^vee(1 + z) in T_c.
    The partner payload y lies in the Iwahori subgroup with val(y) >= cond(b) - 1 - c
    ((b) asks val(y) >= cond(b) - c).
    """
    from .chevalley import RootElt, TorusElt, commutator, coroot_point

    datum = tp.datum
    e = datum.splitting_degree if datum.h is not None else tp.chi.layer
    spec = LocalRingSpec(tp.chi.p, e, N)
    cond = conductors(tp.chi)
    nroots = len(datum.roots)
    counts = {"a": 0, "b": 0, "c": 0}
    failures = []

    def partner(j: int, floor: int):
        low = 0 if datum.is_positive(j) else 1
        return spec.random(rng, min_val=max(low, floor))

    def w(*gens):
        return GroupWord(datum.name, spec, tuple(gens))

    for t in range(samples):
        part = "abc"[t % 3]
        c = rng.randint(1, cmax)
        i = rng.randrange(nroots)
        x = spec.random(rng, min_val=max(c, tp.f[i]))
        if part == "a":
            j = rng.choice([k for k in range(nroots) if k != datum.neg(i)])
            y = partner(j, cond[j] - 1 - c)
            nf = normal_form(commutator(w(RootElt(i, -x)), w(RootElt(j, -y))))
            ok = _in_Uc(tp, nf, c) and all(u == spec.one() for u in nf.torus)
            if datum.is_positive(i) == datum.is_positive(j):
                ok &= all(datum.is_positive(k) == datum.is_positive(i) for k, _ in nf.neg + nf.pos)
        elif part == "b":
            j = datum.neg(i)
            y = partner(j, cond[j] - c)
            nf = normal_form(commutator(w(RootElt(i, -x)), w(RootElt(j, -y))))
            s = _coroot_parameter(datum, i, nf.torus)
            ok = _in_Uc(tp, nf, c) and s is not None and (s - spec.one()).valuation >= max(cond[i], c)
        else:
            z = spec.random(rng, min_val=max(cond[i], c))
            tt = coroot_point(datum, i, spec.one() + z)
            j = rng.randrange(nroots)
            y = partner(j, cond[j] - 1 - c)
            tinv = TorusElt(tuple(u.inverse() for u in tt.units))
            nf = normal_form(commutator(w(tinv), w(RootElt(j, -y))))
            ok = _in_Uc(tp, nf, c) and all(u == spec.one() for u in nf.torus)
        counts[part] += 1
        if not ok:
            failures.append((part, i, c))
    return ClosureReport(counts, failures)

