"""The numpy and numba paths compute the same sums; both agree with scalar ring arithmetic."""
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import _kernels as kern
from artifact.characters import TorusPoint
from artifact.errors import PrecisionExhausted
from artifact.integrals import (
    ElementaryFunction,
    EnumerationWindow,
    _orbital_once,
    layer_type,
)
from artifact.padic_arith import LocalRingSpec, frobenius, norm_to_fixed
from corpus import CORPUS, cls

needs_numba = pytest.mark.skipif(not kern.HAVE_NUMBA, reason="numba not installed")


def ring(spec):
    return kern.Ring.from_spec(spec)


@pytest.mark.parametrize("e", [1, 2, 3])
def test_numpy_ring_ops_match_scalar_arithmetic(e):
    spec = LocalRingSpec(3, e, 4)
    R = ring(spec)
    rng = random.Random(e)
    xs = [spec.random(rng, unit=True) for _ in range(30)]
    ys = [spec.random(rng) for _ in range(30)]
    A = np.array([x.coeffs for x in xs], dtype=np.int64)
    B = np.array([y.coeffs for y in ys], dtype=np.int64)
    assert [tuple(r) for r in kern.np_mul(A, B, R)] == [(x * y).coeffs for x, y in zip(xs, ys)]
    assert [tuple(r) for r in kern.np_inv(A, R)] == [x.inverse().coeffs for x in xs]
    assert [tuple(r) for r in kern.np_frob(A, R)] == [frobenius(x).coeffs for x in xs]
    assert list(kern.np_val(B, R)) == [min(y.valuation, spec.N) for y in ys]
    assert [tuple(r) for r in kern.np_norm(A, R)] == [norm_to_fixed(x).coeffs for x in xs]


def test_overflow_guard():
    with pytest.raises(PrecisionExhausted):
        kern.Ring(3, 2, 40, (1, 0), (1, 0, 0, 1))


def test_backend_flag(monkeypatch):
    monkeypatch.setenv("ARTIFACT_KERNELS", "numpy")
    assert kern.backend() == "numpy"
    monkeypatch.setenv("ARTIFACT_KERNELS", "numba")
    assert kern.backend() == ("numba" if kern.HAVE_NUMBA else "numpy")


CASES = [("SL2", "SL2/c2", 1, (1,)), ("SL2", "SL2/c3", 1, (1,)), ("SL2", "SL2/c2", 2, (1,)), ("GL2", "GL2/c2", 1, (1, -1)),
         ("GL2", "GL2/c2", 2, (1, -1)), ("SL2", "SL2/c2", 2, (0,))]


@needs_numba
@pytest.mark.parametrize("group,label,r,nu", CASES)
def test_orbital_paths_agree(group, label, r, nu):
    c = CORPUS[label]
    phi = ElementaryFunction(layer_type(cls(group, *c.coords), r), nu)
    spec = LocalRingSpec(3, r, 6)
    rng = random.Random(r)
    win = EnumerationWindow(6, 1)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=8)
    def check(seed):
        rng.seed(seed)
        units = tuple(spec.random(rng, unit=True) for _ in c.coords)
        delta = TorusPoint(units, phi.nu)
        a = _orbital_once(phi, delta, win, "numpy")
        b = _orbital_once(phi, delta, win, "numba")
        assert a[0] == b[0] and a[1] == b[1]
        ca = _orbital_once(phi, delta, win, "numpy", ct=True, L=2)
        cb = _orbital_once(phi, delta, win, "numba", ct=True, L=2)
        assert ca[0] == cb[0]

    check()
