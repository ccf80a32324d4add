import random

import pytest

from artifact.characters import (
    ExtendedCharacter,
    SmoothCharacter,
    TorusPoint,
    UnitCharacter,
    base_character,
    check_block,
    conductors,
    cyclic_generator,
    evaluate,
    pullback_norm,
    stabilizer_W0chi,
    unit_group,
    weyl_act,
    weyl_act_extended,
)
from artifact.errors import NotInDomain, WrongBlock
from artifact.padic_arith import LocalRingSpec, norm_to_fixed
from artifact.root_data import build_root_datum, weyl_generate
from artifact.scalars import Cyclo
from corpus import chi


@pytest.mark.parametrize("p,e,c", [(3, 1, 1), (3, 1, 3), (3, 2, 2), (5, 2, 2), (5, 1, 2)])
def test_unit_group_order(p, e, c):
    G = unit_group(p, e, c)
    q = p ** e
    assert len(G.table) == (q - 1) * q ** (c - 1)
    n = 1
    for o in G.orders:
        n *= o
    assert n == len(G.table)


def test_unit_character_is_multiplicative():
    ch = UnitCharacter(5, 2, 2, 20, (0, 4, 0))
    spec = LocalRingSpec(5, 2, 2)
    rng = random.Random(1)
    for _ in range(50):
        a, b = spec.random(rng, unit=True), spec.random(rng, unit=True)
        assert ch.exponent(a * b) == (ch.exponent(a) + ch.exponent(b)) % ch.order


def test_base_character_values_on_generator():
    ch = base_character(3, 2, 1, 6)
    g = cyclic_generator(3, 2)
    for k in range(6):
        assert ch.exponent(g ** k) == k % 6
    assert ch.conductor == 2


def test_base_character_rejects_nonminimal_conductor():
    with pytest.raises(ValueError):
        base_character(3, 2, 3, 6)  # factors through the residue field


def test_conductors_follow_root_characters():
    c = chi("GL2", base_character(3, 2, 1, 6), base_character(3, 2, 1, 6))
    # chi_1 chi_2^-1 is trivial: conductor 1 on both roots
    assert conductors(c) == {0: 1, 1: 1}
    c = chi("GL2", base_character(3, 2, 1, 6), base_character(3, 1, 0, 2))
    assert conductors(c) == {0: 2, 1: 2}


def test_norm_pullback_evaluates_through_norm(corpus):
    c = corpus["SL2/c2"]
    c2 = pullback_norm(c, 2)
    spec = LocalRingSpec(3, 2, 3)
    base = LocalRingSpec(3, 1, 3)
    rng = random.Random(0)
    for _ in range(20):
        u = spec.random(rng, unit=True)
        n = base.element(norm_to_fixed(u).coeffs[0])
        assert c2.exponent(TorusPoint((u,))) == c.exponent(TorusPoint((n,)))
    with pytest.raises(NotInDomain):
        c2.exponent(TorusPoint((base.one(),)))


@pytest.mark.parametrize("label", ["SL2/c2", "GL2/c2", "SL3/c2", "Sp4/c2c2", "SU3/c2"])
def test_weyl_action_is_a_group_action(corpus, label):
    c = corpus[label]
    W = weyl_generate(c.datum) if c.datum.h is None else stabilizer_W0chi(c).finite
    for w in W:
        for v in W:
            lhs = weyl_act(w * v, c)
            rhs = weyl_act(w, weyl_act(v, c))
            assert all(a.same_as(b) for a, b in zip(lhs.coords, rhs.coords))


def test_stabilizer():
    d = build_root_datum("SL2")
    assert len(stabilizer_W0chi(chi("SL2", base_character(3, 1, 0, 2))).finite) == 2
    # the quadratic character of (Z/3)^x is fixed by inversion
    assert len(stabilizer_W0chi(chi("SL2", base_character(3, 1, 1, 2))).finite) == 2
    assert len(stabilizer_W0chi(chi("SL2", base_character(3, 2, 1, 6))).finite) == 1
    assert d.name == "SL2"


def test_extended_characters_and_blocks(corpus):
    c = corpus["GL2/c2"]
    xi = ExtendedCharacter(c, (Cyclo.zeta(12, 1), Cyclo.zeta(12, 5)))
    s = weyl_generate(c.datum)[1]
    xs = weyl_act_extended(s, xi)
    assert check_block(xs, c) == s
    spec = LocalRingSpec(3, 1, 3)
    t = TorusPoint((spec.element(2), spec.element(4)), (1, 0))
    assert evaluate(xi, t) == evaluate(c, TorusPoint(t.units)) * Cyclo.zeta(12, 1)
    other = chi("GL2", base_character(3, 2, 2, 6), base_character(3, 1, 0, 2))
    with pytest.raises(WrongBlock):
        check_block(ExtendedCharacter(other, xi.eta), c)


def test_smooth_character_shape():
    with pytest.raises(ValueError):
        SmoothCharacter(build_root_datum("GL2"), (base_character(3, 2, 1, 6),))
