"""Root data for the built-in catalog, Weyl groups and their extended affine versions.

Characters and cocharacters are written in ambient coordinates (weights of the
natural representation), and the pairing is the dot product.  For every
catalog group the roots and coroots are proportional in these coordinates, so
a Weyl element is a signed permutation matrix acting the same way on X^* and
X_*.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidLevi, UnknownGroup

Vec = tuple[int, ...]

CATALOG = ("SL2", "GL2", "SL3", "Sp4", "SU3")


def pair(x: Sequence[int], y: Sequence[int]) -> int:
    return int(sum(a * b for a, b in zip(x, y)))


def _add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def _scale(k, x):
    return tuple(k * a for a in x)


@dataclass(frozen=True)
class WeylElement:
    """A finite Weyl element: its matrix on ambient coordinates and a reduced word."""

    matrix: tuple[tuple[int, ...], ...]
    word: tuple[int, ...]

    def act(self, v: Sequence[int]) -> Vec:
        return tuple(int(sum(r[j] * v[j] for j in range(len(v)))) for r in self.matrix)

    @property
    def length(self) -> int:
        return len(self.word)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        m = tuple(map(tuple, (np.array(self.matrix) @ np.array(other.matrix)).tolist()))
        return WeylElement(m, self.word + other.word)

    def inverse(self) -> "WeylElement":
        m = tuple(map(tuple, np.array(self.matrix).T.tolist()))
        return WeylElement(m, tuple(reversed(self.word)))

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return "w[" + "".join(f"s{i + 1}" for i in self.word) + "]" if self.word else "w[1]"


@dataclass(frozen=True)
class ExtendedAffineWeylElement:
    """t_lambda * w with multiplication t_l w . t_m v = t_{l + w m} (w v)."""

    translation: Vec
    finite: WeylElement

    def __mul__(self, other: "ExtendedAffineWeylElement") -> "ExtendedAffineWeylElement":
        return ExtendedAffineWeylElement(
            _add(self.translation, self.finite.act(other.translation)), self.finite * other.finite
        )

    def inverse(self) -> "ExtendedAffineWeylElement":
        wi = self.finite.inverse()
        return ExtendedAffineWeylElement(_scale(-1, wi.act(self.translation)), wi)

    def __eq__(self, other):
        return (
            isinstance(other, ExtendedAffineWeylElement)
            and self.translation == other.translation
            and self.finite == other.finite
        )

    def __hash__(self):
        return hash((self.translation, self.finite))


@dataclass(frozen=True)
class DiagramAutomorphism:
    """Permutation h of the absolute roots with the pinning constants x_alpha."""

    perm: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]  # action on ambient X^* (and X_*)
    x_const: tuple[int, ...]  # x_alpha in {+1, -1}, constant on h-orbits

    @property
    def order(self) -> int:
        k, cur = 1, self.perm
        ident = tuple(range(len(self.perm)))
        while cur != ident:
            cur = tuple(self.perm[i] for i in cur)
            k += 1
        return k

    def orbits(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            orb, j = [], i
            while j not in orb:
                orb.append(j)
                j = self.perm[j]
            seen.update(orb)
            out.append(tuple(orb))
        return out


@dataclass(frozen=True)
class BasedRootDatum:
    name: str
    ambient_dim: int
    roots: tuple[Vec, ...]
    coroots: tuple[Vec, ...]
    simple: tuple[int, ...]  # indices into roots
    cochar_basis: tuple[Vec, ...]  # Z-basis of X_*(T) in ambient coordinates
    split_basis: tuple[Vec, ...]  # Z-basis of X_*(A)
    h: DiagramAutomorphism | None = None
    splitting_degree: int = 1  # degree of E over F

    # -- root bookkeeping ----------------------------------------------------
    @cached_property
    def index(self) -> dict[Vec, int]:
        return {r: i for i, r in enumerate(self.roots)}

    def root_index(self, v: Sequence[int]) -> int | None:
        return self.index.get(tuple(v))

    @cached_property
    def simple_coeffs(self) -> tuple[tuple[int, ...], ...]:
        """Coordinates of each root in the simple-root basis."""
        S = np.array([self.roots[i] for i in self.simple], dtype=float).T
        out = []
        for r in self.roots:
            c, *_ = np.linalg.lstsq(S, np.array(r, dtype=float), rcond=None)
            ci = tuple(int(round(x)) for x in c)
            out.append(ci)
        return tuple(out)

    @cached_property
    def positive(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.simple_coeffs) if sum(c) > 0)

    @cached_property
    def negative(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.simple_coeffs) if sum(c) < 0)

    def height(self, i: int) -> int:
        return sum(self.simple_coeffs[i])

    def is_positive(self, i: int) -> bool:
        return self.height(i) > 0

    def neg(self, i: int) -> int:
        return self.index[_scale(-1, self.roots[i])]

    @property
    def rank(self) -> int:
        return len(self.cochar_basis)

    @cached_property
    def rho2(self) -> Vec:
        """2 rho, the sum of positive roots."""
        out = (0,) * self.ambient_dim
        for i in self.positive:
            out = _add(out, self.roots[i])
        return out

    def sum_root(self, i: int, j: int) -> int | None:
        return self.root_index(_add(self.roots[i], self.roots[j]))

    def combos(self, i: int, j: int) -> list[tuple[int, int, int]]:
        """All (a, b, k) with a, b > 0 and a*root_i + b*root_j = root_k."""
        out = []
        for a in range(1, 4):
            for b in range(1, 4):
                k = self.root_index(_add(_scale(a, self.roots[i]), _scale(b, self.roots[j])))
                if k is not None:
                    out.append((a, b, k))
        return sorted(out, key=lambda t: (t[0] + t[1], t[0]))

    def is_closed(self, subset: Iterable[int]) -> bool:
        """Closed and symmetric: alpha, beta in S with alpha+beta a root implies alpha+beta in S."""
        s = set(subset)
        for i in s:
            if self.neg(i) not in s:
                return False
            for j in s:
                k = self.sum_root(i, j)
                if k is not None and k not in s:
                    return False
        return True

    # -- Weyl group ----------------------------------------------------------
    def reflection(self, i: int) -> WeylElement:
        a, av = self.roots[i], self.coroots[i]
        n = self.ambient_dim
        m = [[(1 if r == c else 0) - av[c] * a[r] for c in range(n)] for r in range(n)]
        return WeylElement(tuple(map(tuple, m)), ())

    @cached_property
    def simple_reflections(self) -> tuple[WeylElement, ...]:
        out = []
        for k, i in enumerate(self.simple):
            out.append(WeylElement(self.reflection(i).matrix, (k,)))
        return tuple(out)

    def weyl_act_root(self, w: WeylElement, i: int) -> int:
        return self.index[w.act(self.roots[i])]

    def inversions(self, w: WeylElement) -> list[int]:
        """Positive roots alpha with w(alpha) negative."""
        return [i for i in self.positive if not self.is_positive(self.weyl_act_root(w, i))]

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "roots": [list(r) for r in self.roots],
            "coroots": [list(r) for r in self.coroots],
            "simple": list(self.simple),
            "pairing": [[pair(self.roots[i], self.coroots[j]) for j in self.simple] for i in self.simple],
            "h": list(self.h.perm) if self.h else None,
        }


def _type_A(n: int):
    roots = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [0] * n
                v[i], v[j] = 1, -1
                roots.append(tuple(v))
    simple = [roots.index(tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n))) for k0, i in
              enumerate(range(n - 1))]
    return tuple(roots), tuple(roots), tuple(simple)


def _simple_coroot_basis(n: int):
    return tuple(tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n)) for i in range(n - 1))


@lru_cache(maxsize=None)
def build_root_datum(name: str) -> BasedRootDatum:
    if name == "SL2" or name == "SL3" or name == "SU3":
        n = 2 if name == "SL2" else 3
        roots, coroots, simple = _type_A(n)
        basis = _simple_coroot_basis(n)
        if name != "SU3":
            return BasedRootDatum(name, n, roots, coroots, simple, basis, basis)
        # quasi-split unitary group: h(e_i) = -e_{n+1-i}
        hm = tuple(tuple(-1 if c == n - 1 - r else 0 for c in range(n)) for r in range(n))
        act = lambda v: tuple(int(sum(hm[r][c] * v[c] for c in range(n))) for r in range(n))
        perm = tuple(roots.index(act(r)) for r in roots)
        # x_alpha = 1 on the orbit of simple roots; on h-fixed roots the value is forced to -1
        x = tuple(-1 if perm[i] == i else 1 for i in range(len(roots)))
        h = DiagramAutomorphism(perm, hm, x)
        return BasedRootDatum(name, n, roots, coroots, simple, basis, ((1, 0, -1),), h, 2)
    if name == "GL2":
        roots = ((1, -1), (-1, 1))
        basis = ((1, 0), (0, 1))
        return BasedRootDatum(name, 2, roots, roots, (0,), basis, basis)
    if name == "Sp4":
        roots = ((1, -1), (-1, 1), (0, 2), (0, -2), (1, 1), (-1, -1), (2, 0), (-2, 0))
        coroots = tuple(tuple(Fraction(2 * a, pair(r, r)) for a in r) for r in roots)
        coroots = tuple(tuple(int(a) for a in c) for c in coroots)
        basis = ((1, -1), (0, 1))  # simple coroots
        return BasedRootDatum(name, 2, roots, coroots, (0, 2), basis, basis)
    raise UnknownGroup(f"{name!r} is not in the catalog {CATALOG}")


@lru_cache(maxsize=None)
def weyl_generate(datum: BasedRootDatum) -> tuple[WeylElement, ...]:
    """All Weyl elements with shortest (hence reduced) words, by breadth-first search."""
    n = datum.ambient_dim
    ident = WeylElement(tuple(tuple(int(r == c) for c in range(n)) for r in range(n)), ())
    seen = {ident.matrix: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in datum.simple_reflections:
                v = w * s
                if v.matrix not in seen:
                    seen[v.matrix] = v
                    nxt.append(v)
        frontier = nxt
    return tuple(sorted(seen.values(), key=lambda w: (w.length, w.word)))


def weyl_fixed_by_h(datum: BasedRootDatum) -> tuple[WeylElement, ...]:
    """The subgroup (W_E)^h of Weyl elements commuting with the diagram automorphism."""
    W = weyl_generate(datum)
    if datum.h is None:
        return W
    H = np.array(datum.h.matrix)
    return tuple(w for w in W if (H @ np.array(w.matrix) == np.array(w.matrix) @ H).all())


def longest_element(datum: BasedRootDatum) -> WeylElement:
    return max(weyl_generate(datum), key=lambda w: w.length)


def restrict_root(datum: BasedRootDatum, i: int) -> Vec:
    """Res: the restriction of an absolute root to the split torus A.

    For split groups A = T and Res is the identity.  Otherwise the result is
    the vector of pairings with the basis of X_*(A), which is h-invariant.
    """
    if datum.h is None:
        return datum.roots[i]
    return tuple(pair(datum.roots[i], b) for b in datum.split_basis)


def relative_roots(datum: BasedRootDatum) -> list[Vec]:
    return sorted({restrict_root(datum, i) for i in range(len(datum.roots))})


def levi_roots(datum: BasedRootDatum, levi: Sequence[int]) -> list[int]:
    """Roots of the standard Levi spanned by the given simple roots (positions in datum.simple)."""
    levi = tuple(levi)
    if any(k < 0 or k >= len(datum.simple) for k in levi):
        raise InvalidLevi(f"{levi} is not a subset of simple root positions")
    out = []
    for i, c in enumerate(datum.simple_coeffs):
        if all(c[k] == 0 for k in range(len(c)) if k not in levi):
            out.append(i)
    return out


def levi_weyl(datum: BasedRootDatum, levi: Sequence[int]) -> list[WeylElement]:
    roots = set(levi_roots(datum, levi))
    out = []
    for w in weyl_generate(datum):
        if all(datum.weyl_act_root(w, i) in roots for i in roots):
            # W_M is generated by the simple reflections of M
            if all(k in levi for k in w.word):
                out.append(w)
    return out


def min_coset_reps(datum: BasedRootDatum, levi: Sequence[int]) -> list[WeylElement]:
    """Minimal-length representatives of W_M \\ W: w with w^-1(alpha) > 0 for alpha in Phi_M^+."""
    mroots = [i for i in levi_roots(datum, levi) if datum.is_positive(i)]
    out = []
    for w in weyl_generate(datum):
        wi = w.inverse()
        if all(datum.is_positive(datum.weyl_act_root(wi, i)) for i in mroots):
            out.append(w)
    W, WM = weyl_generate(datum), levi_weyl(datum, levi)
    if len(out) * len(WM) != len(W):
        raise InvalidLevi("coset representative count mismatch")
    return out


def pairing_height(datum: BasedRootDatum, nu: Sequence[int]) -> int:
    """<2 rho, nu>."""
    return pair(datum.rho2, nu)


def is_dominant(datum: BasedRootDatum, nu: Sequence[int]) -> bool:
    return all(pair(datum.roots[i], nu) >= 0 for i in datum.positive)


def is_regular(datum: BasedRootDatum, nu: Sequence[int]) -> bool:
    return all(pair(datum.roots[i], nu) > 0 for i in datum.positive)


def cochar_from_coords(datum: BasedRootDatum, coords: Sequence[int], split: bool = False) -> Vec:
    basis = datum.split_basis if split else datum.cochar_basis
    out = (0,) * datum.ambient_dim
    for c, b in zip(coords, basis):
        out = _add(out, _scale(c, b))
    return out


def coords_of_cochar(datum: BasedRootDatum, v: Sequence[int], split: bool = False) -> Vec:
    basis = datum.split_basis if split else datum.cochar_basis
    B = np.array(basis, dtype=float).T
    c, *_ = np.linalg.lstsq(B, np.array(v, dtype=float), rcond=None)
    ci = tuple(int(round(x)) for x in c)
    if cochar_from_coords(datum, ci, split) != tuple(v):
        raise ValueError(f"{v} is not in the lattice spanned by the basis")
    return ci


def weyl_group_order(datum: BasedRootDatum) -> int:
    return len(weyl_generate(datum))
