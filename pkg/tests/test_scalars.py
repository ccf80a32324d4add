from fractions import Fraction

from hypothesis import given, strategies as st

from artifact.scalars import Cyclo, cyclotomic_poly, euler_phi

ORDERS = st.sampled_from([1, 2, 3, 4, 6, 12, 20])


@st.composite
def cyclo(draw, order=None):
    n = order or draw(ORDERS)
    terms = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(-4, 4)), max_size=4))
    out = Cyclo.rational(Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 5))))
    for k, c in terms:
        out = out + Cyclo.zeta(n, k) * Cyclo.rational(c)
    return out


@given(cyclo(), cyclo(), cyclo())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()


@given(ORDERS, st.integers(-50, 50), st.integers(-50, 50))
def test_roots_of_unity(n, j, k):
    assert Cyclo.zeta(n, j) * Cyclo.zeta(n, k) == Cyclo.zeta(n, j + k)
    assert Cyclo.zeta(n, j) * Cyclo.zeta(n, j).inverse_root_of_unity() == Cyclo.rational(1)
    assert Cyclo.zeta(n, j).conjugate() == Cyclo.zeta(n, -j)


@given(st.integers(1, 30))
def test_sum_of_roots_of_unity(n):
    total = Cyclo.rational(0)
    for k in range(n):
        total = total + Cyclo.zeta(n, k)
    assert total == Cyclo.rational(1 if n == 1 else 0)
    assert len(cyclotomic_poly(n)) == euler_phi(n) + 1


def test_lifting_between_orders():
    assert Cyclo.zeta(6, 2) == Cyclo.zeta(3, 1)
    assert Cyclo.zeta(4, 2) == Cyclo.rational(-1)
    assert Cyclo.from_histogram(6, [1, 0, 0, 1, 0, 0]).is_zero()
    assert Cyclo.from_histogram(2, [3, 1], Fraction(1, 2)) == Cyclo.rational(1)
    assert Cyclo.zeta(12, 5).root_of_unity_exponent() is not None
