from fractions import Fraction

import pytest

import oracle
from artifact.characters import TorusPoint, weyl_act
from artifact.errors import NotInDomain, NotSemisimpleNorm, UnsupportedClass, WindowTooSmall
from artifact.integrals import (
    AxiomCensus,
    ElementaryFunction,
    EnumerationWindow,
    brute_twisted_orbital,
    closed_form_orbital,
    compare_e_rhoI,
    constant_term_numeric,
    discriminant_exponent,
    iwahori_index,
    kj_transversal_checked,
    layer_type,
    stable_orbital,
    unit_function,
    verify_axiom_u,
    verify_descent,
    verify_matching,
    volume_check,
)
from artifact.padic_arith import LocalRingSpec
from artifact.root_data import weyl_generate
from artifact.scalars import Cyclo
from corpus import CORPUS, cls

SPEC1 = LocalRingSpec(3, 1, 6)
UNITS = [1, 2, 4, 5, 7, 8]


def pcls(label):
    c = CORPUS[label]
    return cls(c.datum.name, *c.coords)


@pytest.mark.parametrize("label,cond,exp,order", [("SL2/c2", 2, 1, 6), ("SL2/c3", 3, 1, 18)])
@pytest.mark.parametrize("m", UNITS)
def test_sl2_orbital_matches_rational_oracle(label, cond, exp, order, m):
    phi = ElementaryFunction(layer_type(pcls(label), 1), (1,))
    rep = brute_twisted_orbital(phi, TorusPoint((SPEC1.element(m),), (1,)))
    ch = oracle.CyclicChar(3, cond, exp, order)
    for B in (1, 2):
        delta = oracle.torus_delta(3, (m, Fraction(1, m)), (1, -1))
        hist = oracle.orbital_histogram(3, [ch], (1, -1), delta, B)
        assert Cyclo.from_histogram(order, hist) == rep.value
    assert rep.value == closed_form_orbital(phi, TorusPoint((SPEC1.element(m),)))


@pytest.mark.parametrize("m1,m2", [(1, 1), (2, 1), (4, 7), (5, 2), (8, 8)])
def test_gl2_orbital_matches_rational_oracle(m1, m2):
    phi = ElementaryFunction(layer_type(pcls("GL2/c2"), 1), (1, -1))
    rep = brute_twisted_orbital(phi, TorusPoint((SPEC1.element(m1), SPEC1.element(m2)), (1, -1)))
    chars = [oracle.CyclicChar(3, 2, 1, 6), oracle.CyclicChar(3, 1, 0, 6)]
    hist = oracle.orbital_histogram(3, chars, (1, -1), oracle.torus_delta(3, (m1, m2), (1, -1)))
    assert Cyclo.from_histogram(6, hist) == rep.value


def test_non_conjugate_classes_vanish():
    phi = ElementaryFunction(layer_type(pcls("SL2/c2"), 1), (1,))
    u = SPEC1.element(2)
    for lam in [(2,), (3,), (-2,)]:
        assert brute_twisted_orbital(phi, TorusPoint((u,), lam)).value.is_zero()
    # e_rho-type support at lambda = 0 never meets J u J for nu regular
    assert brute_twisted_orbital(phi, TorusPoint((u,), (0,))).value.is_zero()


def test_report_records_ladder():
    phi = ElementaryFunction(layer_type(pcls("SL2/c2"), 2), (1,))
    spec = LocalRingSpec(3, 2, 6)
    rep = brute_twisted_orbital(phi, TorusPoint((spec.element([2, 1]),), (1,)))
    rec = rep.to_record()
    assert rep.stable and len(rec["ladder"]) == 3
    assert {(w["N"], w["B"]) for w in rec["ladder"]} == {(6, 1), (7, 1), (6, 2)}


def test_matching_sl2_small():
    rep = verify_matching(pcls("SL2/c2"), (1,), 2, EnumerationWindow(6, 1),
                          ms=None, theta_samples=2)
    assert rep.ok and len(rep.rows) == 72 and rep.theta_checks


def test_constant_term_of_unit_at_compact_points():
    tp = layer_type(pcls("SL2/c2"), 1)
    e = unit_function(tp)
    for m in (2, 4, 5):
        pt = TorusPoint((SPEC1.element(m),))
        got = constant_term_numeric(e, pt).value
        want = Cyclo.rational(0)
        for w in weyl_generate(tp.datum):
            ch = weyl_act(w, tp.chi)
            want = want + Cyclo.zeta(ch.order, -ch.exponent(pt))
        assert got == want


@pytest.mark.parametrize("label,r", [("SL2/c2", 1), ("SL2/c2", 2), ("GL2/c2", 1)])
def test_descent(label, r):
    c = pcls(label)
    spec = LocalRingSpec(3, r, 6)
    n = len(c.chi.coords)
    units = [spec.element([2] + [1] * (r - 1)), spec.element([4] + [0] * (r - 1))][:n]
    res = verify_descent(c, TorusPoint(tuple(units)), r)
    assert res["ok"], res


def test_discriminant_exponent():
    d = pcls("GL2/c2").datum
    g = TorusPoint((SPEC1.element(1), SPEC1.element(4)))
    assert discriminant_exponent(d, g) == 2  # val(1 - 4) + val(1 - 1/4)
    with pytest.raises(NotSemisimpleNorm):
        discriminant_exponent(d, TorusPoint((SPEC1.element(2), SPEC1.element(2))))


def test_iwahori_comparison():
    c = pcls("SL2/c2")
    IJ, distinct = iwahori_index(layer_type(c, 1))
    assert IJ == 3 and distinct
    for delta in (TorusPoint((SPEC1.one(),)), TorusPoint((SPEC1.element(2),), (1,))):
        assert compare_e_rhoI(c, delta)["ok"]


@pytest.mark.parametrize("r", [1, 2])
def test_volume_sl2(r):
    rep = volume_check(pcls("SL2/c2"), (1,), r)
    assert rep["ok"] and rep["count"] == 3 ** (2 * r)


def test_volume_sp4_regular_dominant():
    # split coordinates (2, 3) give the cocharacter (2, 1): pairings 1, 2, 3, 4 with the positive roots
    rep = volume_check(pcls("Sp4/c2c2"), (2, 3), 1)
    assert rep["ok"] and rep["pairing"] == 10 and rep["count"] == 3 ** 10


def test_volume_rejects_non_dominant():
    with pytest.raises(NotInDomain):
        volume_check(pcls("Sp4/c2c2"), (2, 1), 1)


def test_volume_against_rational_oracle():
    assert oracle.coset_count_volume_sl2(3, 1) == volume_check(pcls("SL2/c2"), (1,), 1)["count"]


def test_kj_transversal():
    assert kj_transversal_checked(3, 1, 1, 1) == 4 * 3


@pytest.mark.parametrize("label", ["SL2/c2", "SL2/c3"])
def test_axiom_census_sl2(label):
    c = pcls(label)
    for w in weyl_generate(c.datum):
        census = verify_axiom_u(c, w)
        assert isinstance(census, AxiomCensus) and census.ok
        assert census.satisfying == [()]
        assert len(census.witnesses) == census.cosets - 1


def test_errors():
    with pytest.raises(NotInDomain):
        ElementaryFunction(layer_type(pcls("SL2/c2"), 1), (-1,))
    with pytest.raises(UnsupportedClass):
        brute_twisted_orbital(ElementaryFunction(layer_type(pcls("SL3/c2"), 1), (0, 0)),
                              TorusPoint((LocalRingSpec(5, 1, 4).one(),) * 2))
    phi = ElementaryFunction(layer_type(pcls("SL2/c2"), 1), (1,))
    with pytest.raises(UnsupportedClass):
        stable_orbital(phi, TorusPoint((SPEC1.one(),)))
    assert issubclass(WindowTooSmall, Exception)
