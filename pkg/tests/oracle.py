"""Slow exact reference computations over Q (rational matrices, p-adic valuations by hand).

Nothing here imports the package: values computed here are compared against
the batched modular kernels.
"""
from __future__ import annotations

from fractions import Fraction


def val(x: Fraction, p: int) -> int:
    if x == 0:
        return 10 ** 6
    x = Fraction(x)
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part_mod(x: Fraction, p: int, k: int) -> int:
    """The unit u with x = p^v u, reduced mod p^k."""
    v = val(x, p)
    y = Fraction(x) / Fraction(p) ** v
    m = p ** k
    return y.numerator * pow(y.denominator, -1, m) % m


def primitive_root(p: int, c: int) -> int:
    m = p ** c
    n = (p - 1) * p ** (c - 1)
    primes = [q for q in range(2, n + 1) if n % q == 0 and all(q % s for s in range(2, q))]
    for a in range(2, p * p):
        if a % p and all(pow(a, n // q, m) != 1 for q in primes):
            return a
    raise ValueError


class CyclicChar:
    """chi(g^k) = zeta_order^(k * exponent) on (Z/p^c)^x, g the least primitive root."""

    def __init__(self, p, c, exponent, order):
        self.p, self.c, self.order = p, c, order
        g, m = primitive_root(p, c), p ** c
        self.log = {}
        acc = 1
        for k in range((p - 1) * p ** (c - 1)):
            self.log[acc] = k * exponent % order
            acc = acc * g % m

    def __call__(self, u: int) -> int:
        return self.log[u % self.p ** self.c]

    def conductor(self) -> int:
        for l in range(1, self.c + 1):
            if all(self(1 + self.p ** l * t) == 0 for t in range(self.p ** self.c)):
                return l
        return self.c


def matmul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def inv(A):
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    return ((A[1][1] / det, -A[0][1] / det), (-A[1][0] / det, A[0][0] / det))


def mat(a, b, c, d):
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def k_over_j(p: int, fpos: int, fneg: int):
    ki = [mat(1, 0, 0, 1)] + [matmul(mat(1, c, 0, 1), mat(0, 1, -1, 0)) for c in range(p)]
    ij = [matmul(mat(1, a, 0, 1), mat(1, 0, b, 1))
          for a in range(p ** fpos) for b in range(0, p ** fneg, p)]
    return [matmul(x, y) for x in ki for y in ij]


def elementary_value(g, p, nu, fpos, fneg, chars, k):
    """Exponent of phi(g) (or None off the support): g = U diag(p^nu) t L with U, L in J."""
    d2 = g[1][1]
    if val(d2, p) != nu[1]:
        return None
    if val(g[1][0] / d2, p) < fneg or val(g[0][1] / d2, p) < fpos:
        return None
    d1 = g[0][0] - g[0][1] * g[1][0] / d2
    if val(d1, p) != nu[0]:
        return None
    t1, t2 = unit_part_mod(d1, p, k), unit_part_mod(d2, p, k)
    if len(chars) == 1:
        return (-chars[0](t1)) % chars[0].order
    M = chars[0].order
    return (-(chars[0](t1) + chars[1](t2))) % M


def orbital_histogram(p, chars, nu, delta, B=1):
    """Histogram over Z/order of sum_{x in p^-B Z/Z} sum_{k in K/J} phi(k^-1 n_x^-1 delta n_x k)."""
    if len(chars) == 1:
        cond = chars[0].conductor()
    else:
        # alpha^vee = (1, -1): chi_1 chi_2^-1, conductor by brute force
        c = max(ch.c for ch in chars)
        cond = c
        for l in range(1, c + 1):
            if all((chars[0](1 + p ** l * t) - chars[1](1 + p ** l * t)) % chars[0].order == 0
                   for t in range(p ** c)):
                cond = l
                break
    fpos, fneg = cond // 2, (cond + 1) // 2
    k = max(ch.c for ch in chars)
    M = chars[0].order
    hist = [0] * M
    K = k_over_j(p, fpos, fneg)
    Kinv = [inv(x) for x in K]
    for xn in range(p ** B):
        x = Fraction(xn, p ** B)
        n, ninv = mat(1, x, 0, 1), mat(1, -x, 0, 1)
        middle = matmul(matmul(ninv, delta), n)
        for kk, ki in zip(K, Kinv):
            e = elementary_value(matmul(matmul(ki, middle), kk), p, nu, fpos, fneg, chars, k)
            if e is not None:
                hist[e] += 1
    return hist


def torus_delta(p, units, nu):
    return mat(Fraction(units[0]) * Fraction(p) ** nu[0], 0, 0, Fraction(units[1]) * Fraction(p) ** nu[1])


def coset_count_volume_sl2(p: int, f: int, N: int = 3) -> int:
    """Card(J_u \\ J) for SL2 with f(alpha) = f(-alpha) = f and u = diag(p, p^-1), by brute force.

    J is enumerated modulo the principal congruence subgroup of level N, which lies
    inside J cap u J u^-1 when N >= f + 2.
    """
    m = p ** N
    reps = []
    units = [a for a in range(m) if a % p]
    for a in units:
        for b in range(0, m, p ** f):
            for c in range(0, m, p ** f):
                # d from det = 1 mod p^N
                d = (1 + b * c) * pow(a, -1, m) % m
                j = mat(a, b, c, d)
                found = False
                for r in reps:
                    y = matmul(inv(r), j)
                    # y in u J u^-1  <=>  u^-1 y u in J
                    z = ((y[0][0], y[0][1] / p ** 2), (y[1][0] * p ** 2, y[1][1]))
                    if val(z[0][1], p) >= min(f, N - 2) and val(z[1][0], p) >= f:
                        found = True
                        break
                if not found:
                    reps.append(j)
    return len(reps)
