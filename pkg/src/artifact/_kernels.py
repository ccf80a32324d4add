"""Hot loops over truncated rings, in two interchangeable implementations.

Ring elements are int64 coefficient vectors of length e modulo pw = p^W.  The
numba path compiles scalar loops with @njit; the numpy path vectorizes the
same arithmetic over a batch axis.  ARTIFACT_KERNELS=numpy forces the numpy
path, as does a missing numba install.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly by the backend flag
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

INT_LIMIT = 2 ** 62


def backend() -> str:
    want = os.environ.get("ARTIFACT_KERNELS", "numba").strip().lower()
    if want == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def check_overflow(p: int, W: int, e: int) -> None:
    from .errors import PrecisionExhausted

    if (p ** W) ** 2 * (2 * e + 2) >= INT_LIMIT:
        raise PrecisionExhausted(f"p^{W} is too large for int64 kernels")


class Ring:
    """Parameters of O_e / p^W in array form."""

    def __init__(self, p: int, e: int, W: int, modulus, frob_cols):
        check_overflow(p, W, e)
        self.p, self.e, self.W = p, e, W
        self.pw = p ** W
        self.mod = np.array(modulus, dtype=np.int64) % self.pw
        # F[j, i]: coefficient i of theta(x)^j
        self.F = np.array(frob_cols, dtype=np.int64).reshape(e, e) % self.pw

    @classmethod
    def from_spec(cls, spec):
        return cls(spec.p, spec.e, spec.N, spec.modulus, spec.frobenius_matrix)

    def key(self):
        return (self.p, self.e, self.W, tuple(self.mod), tuple(self.F.ravel()))


# ---------------------------------------------------------------------------
# numpy path (batched on leading axes)
# ---------------------------------------------------------------------------

def np_mul(a, b, R: Ring):
    e, pw = R.e, R.pw
    if e == 1:
        return (a * b) % pw
    shape = np.broadcast_shapes(a.shape, b.shape)
    prod = np.zeros(shape[:-1] + (2 * e - 1,), dtype=np.int64)
    for i in range(e):
        for j in range(e):
            prod[..., i + j] = (prod[..., i + j] + a[..., i] * b[..., j]) % pw
    for k in range(2 * e - 2, e - 1, -1):
        lead = prod[..., k].copy()
        for j in range(e):
            prod[..., k - e + j] = (prod[..., k - e + j] - lead * R.mod[j]) % pw
    return prod[..., :e]


def np_frob(a, R: Ring, k: int = 1):
    k %= R.e
    for _ in range(k):
        out = np.zeros_like(a)
        for i in range(R.e):
            acc = np.zeros(a.shape[:-1], dtype=np.int64)
            for j in range(R.e):
                acc = (acc + a[..., j] * R.F[j, i]) % R.pw
            out[..., i] = acc
        a = out
    return a


def np_const(value: int, shape, R: Ring):
    out = np.zeros(tuple(shape) + (R.e,), dtype=np.int64)
    out[..., 0] = value % R.pw
    return out


def np_val(a, R: Ring):
    """Coefficient-wise minimum valuation, capped at W."""
    v = np.full(a.shape[:-1], R.W, dtype=np.int64)
    for k in range(R.W - 1, -1, -1):
        pk = R.p ** k
        nz = np.any(a % (pk * R.p) != 0, axis=-1)
        v = np.where(nz, k, v)
    return v


def _pow_mod_vec(x, n, m):
    out = np.ones_like(x)
    base = x % m
    while n:
        if n & 1:
            out = (out * base) % m
        base = (base * base) % m
        n >>= 1
    return out


def np_norm(a, R: Ring):
    out = a
    cur = a
    for _ in range(1, R.e):
        cur = np_frob(cur, R)
        out = np_mul(out, cur, R)
    return out


def np_inv(a, R: Ring):
    """Inverse of units (entries that are not units give garbage)."""
    conj = np_const(1, a.shape[:-1], R)
    cur = a
    for _ in range(1, R.e):
        cur = np_frob(cur, R)
        conj = np_mul(conj, cur, R)
    n = np_mul(conj, a, R)[..., 0]
    phi = R.pw // R.p * (R.p - 1)
    ninv = _pow_mod_vec(n, phi - 1, R.pw)
    c = np.zeros(conj.shape, dtype=np.int64)
    c[..., 0] = ninv
    return np_mul(conj, c, R)


def np_matmul(A, B, R: Ring):
    n = A.shape[-2]
    shape = np.broadcast_shapes(A.shape[:-3], B.shape[:-3])
    out = np.zeros(shape + (n, B.shape[-2], R.e), dtype=np.int64)
    for i in range(n):
        for j in range(B.shape[-2]):
            acc = np.zeros(shape + (R.e,), dtype=np.int64)
            for k in range(A.shape[-2]):
                acc = (acc + np_mul(A[..., i, k, :], B[..., k, j, :], R)) % R.pw
            out[..., i, j, :] = acc
    return out


def np_div_p(a, k: int, R: Ring):
    return a // (R.p ** k)


def _exponent_from_tables(units, R: Ring, tab, c: int):
    """Table lookup of a base-ring character at N_r(unit) mod p^c."""
    n = np_norm(units, R)[..., 0] % (R.p ** c)
    return tab[n]


def np_orbital_2x2(R: Ring, d1u, d2u, lam1, lam2, S, B, xs, kinv, kth,
                   nu1, nu2, fpos, fneg, coord_mode, tab1, tab2, c, M, sign, ct=0):
    """Histogram of function-value exponents over all (x, k) pairs; numpy path.

    The middle factor is n_x^-1 delta theta(n_x) (ct=0) or delta n_x (ct=1),
    with x = a / p^B for a in xs, scaled by p^S to be integral.
    """
    p, pw = R.p, R.pw
    nx, nk = xs.shape[0], kinv.shape[0]
    a = np.repeat(xs, nk, axis=0)
    Ki = np.tile(kinv, (nx, 1, 1, 1))
    Kt = np.tile(kth, (nx, 1, 1, 1))
    n = a.shape[0]
    lmin = min(lam1, lam2)
    P = np.zeros((n, 2, 2, R.e), dtype=np.int64)
    P[:, 0, 0, :] = (d1u * (p ** (S + lam1))) % pw
    P[:, 1, 1, :] = (d2u * (p ** (S + lam2))) % pw
    if ct:
        t1 = np_mul(np.broadcast_to(d1u, a.shape), a, R) * (p ** (lam1 - lmin))
        t2 = np.zeros_like(t1)
    else:
        th_a = np_frob(a, R) if R.e > 1 else a
        t1 = np_mul(np.broadcast_to(d1u, th_a.shape), th_a, R) * (p ** (lam1 - lmin))
        t2 = np_mul(np.broadcast_to(d2u, a.shape), a, R) * (p ** (lam2 - lmin))
    P[:, 0, 1, :] = ((t1 - t2) % pw) * (p ** (S - B + lmin)) % pw
    Y = np_matmul(np_matmul(Ki, P, R), Kt, R)
    ok, m1, m2 = np_udl_2x2(Y, R, S, nu1, nu2, fpos, fneg)
    hist = np.zeros(M, dtype=np.int64)
    if not ok.any():
        return hist
    ex = _exponent_from_tables(m1, R, tab1, c)
    if coord_mode == 1:
        ex = ex + _exponent_from_tables(m2, R, tab2, c)
    ex = (sign * ex) % M
    np.add.at(hist, ex, 1)
    return hist


def np_udl_2x2(Y, R: Ring, S, nu1, nu2, fpos, fneg):
    """Test p^-S Y in J_+ diag(p^nu) ^0T J_- for a batch of 2x2 matrices.

    Returns (mask, m1, m2) with m1, m2 the unit parts of the diagonal factor
    (rows where the mask is False are dropped from m1, m2).
    """
    p = R.p
    y11, y12, y21, y22 = Y[:, 0, 0], Y[:, 0, 1], Y[:, 1, 0], Y[:, 1, 1]
    det = (np_mul(y11, y22, R) - np_mul(y12, y21, R)) % R.pw
    k2, k1 = S + nu2, S + nu1
    ok = (np_val(y22, R) == k2) & (np_val(det, R) == k1 + k2)
    ok &= (np_val(y12, R) >= k2 + fpos) & (np_val(y21, R) >= k2 + fneg)
    y22s, dets = y22[ok], det[ok]
    m2 = y22s // (p ** k2)
    m1 = np_mul(dets // (p ** (k1 + k2)), np_inv(m2, R), R)
    return ok, m1, m2


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_mul(a, b, out, mod, e, pw):
        if e == 1:
            out[0] = (a[0] * b[0]) % pw
            return
        prod = np.zeros(2 * e - 1, dtype=np.int64)
        for i in range(e):
            for j in range(e):
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % pw
        for k in range(2 * e - 2, e - 1, -1):
            lead = prod[k]
            for j in range(e):
                prod[k - e + j] = (prod[k - e + j] - lead * mod[j]) % pw
        for i in range(e):
            out[i] = prod[i]

    @njit(cache=True)
    def _nb_frob(a, out, F, e, pw):
        for i in range(e):
            acc = 0
            for j in range(e):
                acc = (acc + a[j] * F[j, i]) % pw
            out[i] = acc

    @njit(cache=True)
    def _nb_val(a, e, p, W):
        best = W
        for i in range(e):
            x = a[i]
            if x == 0:
                continue
            v = 0
            while x % p == 0 and v < W:
                x //= p
                v += 1
            if v < best:
                best = v
        return best

    @njit(cache=True)
    def _nb_powmod(x, n, m):
        out = 1
        base = x % m
        while n > 0:
            if n & 1:
                out = (out * base) % m
            base = (base * base) % m
            n >>= 1
        return out

    @njit(cache=True)
    def _nb_inv(a, out, mod, F, e, p, pw):
        conj = np.zeros(e, dtype=np.int64)
        conj[0] = 1
        cur = a.copy()
        tmp = np.zeros(e, dtype=np.int64)
        for _ in range(1, e):
            _nb_frob(cur, tmp, F, e, pw)
            cur[:] = tmp
            _nb_mul(conj, cur, tmp, mod, e, pw)
            conj[:] = tmp
        _nb_mul(conj, a, tmp, mod, e, pw)
        phi = pw // p * (p - 1)
        ninv = _nb_powmod(tmp[0], phi - 1, pw)
        for i in range(e):
            out[i] = (conj[i] * ninv) % pw

    @njit(cache=True)
    def _nb_norm0(a, mod, F, e, pw):
        out = a.copy()
        cur = a.copy()
        tmp = np.zeros(e, dtype=np.int64)
        for _ in range(1, e):
            _nb_frob(cur, tmp, F, e, pw)
            cur[:] = tmp
            _nb_mul(out, cur, tmp, mod, e, pw)
            out[:] = tmp
        return out[0]

    @njit(cache=True)
    def _nb_matmul2(A, B, C, mod, e, pw):
        tmp = np.zeros(e, dtype=np.int64)
        for i in range(2):
            for j in range(2):
                for t in range(e):
                    C[i, j, t] = 0
                for k in range(2):
                    _nb_mul(A[i, k], B[k, j], tmp, mod, e, pw)
                    for t in range(e):
                        C[i, j, t] = (C[i, j, t] + tmp[t]) % pw

    @njit(cache=True, parallel=True)
    def _nb_orbital_2x2(p, e, W, pw, mod, F, d1u, d2u, lam1, lam2, S, B, xs, kinv, kth,
                        nu1, nu2, fpos, fneg, coord_mode, tab1, tab2, c, M, sign, ct):
        nx = xs.shape[0]
        nk = kinv.shape[0]
        local = np.zeros((nk, M), dtype=np.int64)
        lmin = min(lam1, lam2)
        pc = 1
        for _ in range(c):
            pc *= p
        for kk in prange(nk):
            P = np.zeros((2, 2, e), dtype=np.int64)
            T = np.zeros((2, 2, e), dtype=np.int64)
            Y = np.zeros((2, 2, e), dtype=np.int64)
            tha = np.zeros(e, dtype=np.int64)
            t1 = np.zeros(e, dtype=np.int64)
            t2 = np.zeros(e, dtype=np.int64)
            det = np.zeros(e, dtype=np.int64)
            tmp = np.zeros(e, dtype=np.int64)
            m1 = np.zeros(e, dtype=np.int64)
            m2 = np.zeros(e, dtype=np.int64)
            m2i = np.zeros(e, dtype=np.int64)
            s1 = p ** (S + lam1)
            s2 = p ** (S + lam2)
            sc = p ** (S - B + lmin)
            for xi in range(nx):
                a = xs[xi]
                if ct == 1:
                    _nb_mul(d1u, a, t1, mod, e, pw)
                    for t in range(e):
                        t2[t] = 0
                else:
                    if e > 1:
                        _nb_frob(a, tha, F, e, pw)
                    else:
                        tha[0] = a[0]
                    _nb_mul(d1u, tha, t1, mod, e, pw)
                    _nb_mul(d2u, a, t2, mod, e, pw)
                for t in range(e):
                    P[0, 0, t] = (d1u[t] * s1) % pw
                    P[1, 1, t] = (d2u[t] * s2) % pw
                    P[1, 0, t] = 0
                    v = (t1[t] * p ** (lam1 - lmin) - t2[t] * p ** (lam2 - lmin)) % pw
                    P[0, 1, t] = (v * sc) % pw
                _nb_matmul2(kinv[kk], P, T, mod, e, pw)
                _nb_matmul2(T, kth[kk], Y, mod, e, pw)
                k2 = S + nu2
                k1 = S + nu1
                if _nb_val(Y[1, 1], e, p, W) != k2:
                    continue
                if _nb_val(Y[0, 1], e, p, W) < k2 + fpos:
                    continue
                if _nb_val(Y[1, 0], e, p, W) < k2 + fneg:
                    continue
                _nb_mul(Y[0, 0], Y[1, 1], det, mod, e, pw)
                _nb_mul(Y[0, 1], Y[1, 0], tmp, mod, e, pw)
                for t in range(e):
                    det[t] = (det[t] - tmp[t]) % pw
                if _nb_val(det, e, p, W) != k1 + k2:
                    continue
                q2 = p ** k2
                q12 = p ** (k1 + k2)
                for t in range(e):
                    m2[t] = Y[1, 1, t] // q2
                    tmp[t] = det[t] // q12
                _nb_inv(m2, m2i, mod, F, e, p, pw)
                _nb_mul(tmp, m2i, m1, mod, e, pw)
                ex = tab1[_nb_norm0(m1, mod, F, e, pw) % pc]
                if coord_mode == 1:
                    ex += tab2[_nb_norm0(m2, mod, F, e, pw) % pc]
                ex = (sign * ex) % M
                local[kk, ex] += 1
        hist = np.zeros(M, dtype=np.int64)
        for kk in range(nk):
            for j in range(M):
                hist[j] += local[kk, j]
        return hist


def orbital_2x2(R: Ring, d1u, d2u, lam1, lam2, S, B, xs, kinv, kth,
                nu1, nu2, fpos, fneg, coord_mode, tab1, tab2, c, M, sign, ct=0, which=None):
    which = which or backend()
    args = (d1u.astype(np.int64), d2u.astype(np.int64), int(lam1), int(lam2), int(S), int(B),
            np.ascontiguousarray(xs, dtype=np.int64), np.ascontiguousarray(kinv, dtype=np.int64),
            np.ascontiguousarray(kth, dtype=np.int64), int(nu1), int(nu2), int(fpos), int(fneg),
            int(coord_mode), tab1.astype(np.int64), tab2.astype(np.int64), int(c), int(M), int(sign), int(ct))
    if which == "numba":
        return _nb_orbital_2x2(R.p, R.e, R.W, R.pw, R.mod, R.F, *args)
    return np_orbital_2x2(R, *args)


def set_threads(n: int | None) -> None:
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
