"""Batched 2x2 matrices p^-shift * data over O_e / p^W, for SL2 and GL2 enumerations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._kernels import Ring, np_frob, np_inv, np_matmul, np_mul, np_udl_2x2, np_val
from .errors import PrecisionExhausted


@dataclass
class M2:
    data: np.ndarray  # (n, 2, 2, e)
    shift: int
    R: Ring

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, idx) -> "M2":
        d = self.data[idx]
        if d.ndim == 3:
            d = d[None]
        return M2(d, self.shift, self.R)

    def __matmul__(self, other: "M2") -> "M2":
        return M2(np_matmul(self.data, other.data, self.R), self.shift + other.shift, self.R)

    def repeat(self, k: int) -> "M2":
        return M2(np.repeat(self.data, k, axis=0), self.shift, self.R)

    def tile(self, k: int) -> "M2":
        return M2(np.tile(self.data, (k, 1, 1, 1)), self.shift, self.R)

    def theta(self, k: int = 1) -> "M2":
        return M2(np_frob(self.data, self.R, k) if self.R.e > 1 else self.data, self.shift, self.R)

    def det(self) -> np.ndarray:
        d, R = self.data, self.R
        return (np_mul(d[:, 0, 0], d[:, 1, 1], R) - np_mul(d[:, 0, 1], d[:, 1, 0], R)) % R.pw

    def inverse(self) -> "M2":
        """Inverse via the adjugate; the determinants must share one valuation."""
        R, p = self.R, self.R.p
        det = self.det()
        v = np_val(det, R)
        if len(v) == 0:
            return self
        if (v != v[0]).any() or v[0] >= R.W:
            raise PrecisionExhausted("determinant valuations differ or vanish at this precision")
        v = int(v[0])
        u = np_inv(det // p ** v, R)
        d = self.data
        adj = np.empty_like(d)
        adj[:, 0, 0] = d[:, 1, 1]
        adj[:, 1, 1] = d[:, 0, 0]
        adj[:, 0, 1] = (-d[:, 0, 1]) % R.pw
        adj[:, 1, 0] = (-d[:, 1, 0]) % R.pw
        adj = np_mul(adj, u[:, None, None, :], R)
        # (p^-s X)^-1 = p^(s - v) u^-1 adj(X)
        new_shift = v - self.shift
        if new_shift < 0:
            adj = adj * p ** (-new_shift) % R.pw
            new_shift = 0
        return M2(adj, new_shift, R)

    def normalized(self) -> "M2":
        """Lower the shift while every entry of the batch is divisible by p (costs precision)."""
        d, s, p = self.data, self.shift, self.R.p
        while s > 0 and not (d % p).any():
            d = d // p
            s -= 1
        return M2(d, s, self.R)

    def member(self, fpos: int, fneg: int, nu=(0, 0)):
        """Mask of rows in J_+ diag(p^nu) ^0T J_-, plus the diagonal unit parts."""
        return np_udl_2x2(self.data, self.R, self.shift, nu[0], nu[1], fpos, fneg)

    def concat(self, other: "M2") -> "M2":
        a, b = self.align(other)
        return M2(np.concatenate([a.data, b.data]), a.shift, self.R)

    def align(self, other: "M2") -> tuple["M2", "M2"]:
        s = max(self.shift, other.shift)
        p, pw = self.R.p, self.R.pw
        a = self.data * p ** (s - self.shift) % pw
        b = other.data * p ** (s - other.shift) % pw
        return M2(a, s, self.R), M2(b, s, self.R)


def ring(p: int, e: int, W: int, modulus, frob) -> Ring:
    return Ring(p, e, W, modulus, frob)


def scalar(R: Ring, v: int) -> np.ndarray:
    out = np.zeros(R.e, dtype=np.int64)
    out[0] = v % R.pw
    return out


def elements(R: Ring, k: int, min_val: int = 0) -> np.ndarray:
    """Representatives p^min_val * z of p^min_val O / p^k O, as an (n, e) array."""
    if k <= min_val:
        return np.zeros((1, R.e), dtype=np.int64)
    m = R.p ** (k - min_val)
    rows = list(itertools.product(range(m), repeat=R.e))
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), R.e)
    return arr * R.p ** min_val % R.pw


def from_entries(R: Ring, a, b, c, d, shift: int = 0) -> M2:
    """Batch from four (n, e) arrays (or single e-vectors)."""
    arrs = [np.atleast_2d(np.asarray(x, dtype=np.int64)) for x in (a, b, c, d)]
    n = max(x.shape[0] for x in arrs)
    out = np.zeros((n, 2, 2, R.e), dtype=np.int64)
    for (i, j), x in zip(((0, 0), (0, 1), (1, 0), (1, 1)), arrs):
        out[:, i, j] = np.broadcast_to(x, (n, R.e)) % R.pw
    return M2(out, shift, R)


def upper(R: Ring, a: np.ndarray) -> M2:
    one, zero = scalar(R, 1), scalar(R, 0)
    return from_entries(R, one, a, zero, one)


def lower(R: Ring, b: np.ndarray) -> M2:
    one, zero = scalar(R, 1), scalar(R, 0)
    return from_entries(R, one, zero, b, one)


def weyl_s(R: Ring) -> M2:
    """n_s = u(1) u_-(-1) u(1)."""
    return from_entries(R, scalar(R, 0), scalar(R, 1), scalar(R, -1), scalar(R, 0))


def identity(R: Ring) -> M2:
    return from_entries(R, scalar(R, 1), scalar(R, 0), scalar(R, 0), scalar(R, 1))


def torus(R: Ring, d1, d2, lam1: int = 0, lam2: int = 0) -> M2:
    s = max(0, -min(lam1, lam2))
    p = R.p
    d1 = np.atleast_2d(np.asarray(d1, dtype=np.int64)) * p ** (lam1 + s)
    d2 = np.atleast_2d(np.asarray(d2, dtype=np.int64)) * p ** (lam2 + s)
    z = np.zeros_like(d1)
    return from_entries(R, d1, z, z, d2, shift=s)


def product_reps(R: Ring, pos_range: tuple[int, int], neg_range: tuple[int, int]) -> M2:
    """u_+(a) u_-(b), a over p^lo O / p^hi O (pos_range) and b likewise (neg_range)."""
    a = elements(R, pos_range[1], pos_range[0])
    b = elements(R, neg_range[1], neg_range[0])
    U = upper(R, a).repeat(len(b))
    L = lower(R, b).tile(len(a))
    return U @ L


def iwahori_over_j(R: Ring, fpos: int, fneg: int) -> M2:
    """Representatives of I/J: u_+(a), a in O/p^fpos, times u_-(b), b in pO/p^fneg."""
    return product_reps(R, (0, fpos), (1, fneg))


def k_over_i(R: Ring) -> M2:
    """{1} and u_+(c) n_s for c in the residue field: representatives of K/I."""
    c = elements(R, 1)
    return identity(R).concat(upper(R, c) @ weyl_s(R).repeat(len(c)))


def k_over_j(R: Ring, fpos: int, fneg: int) -> M2:
    ki = k_over_i(R)
    ij = iwahori_over_j(R, fpos, fneg)
    return ki.repeat(len(ij)) @ ij.tile(len(ki))


def distinct_cosets(reps: M2, member, chunk: int = 256) -> bool:
    """True iff r_i^-1 r_j lies in the subgroup exactly when i = j (left cosets r J)."""
    n = len(reps)
    inv = reps.inverse()
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        block = inv[lo:hi].repeat(n) @ reps.tile(hi - lo)
        ok = member(block).reshape(hi - lo, n)
        expect = np.zeros((hi - lo, n), dtype=bool)
        expect[np.arange(hi - lo), np.arange(lo, hi)] = True
        if not (ok == expect).all():
            return False
    return True
