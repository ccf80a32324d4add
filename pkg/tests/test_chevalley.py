import random

import pytest

from artifact.chevalley import (
    RootElt,
    TorusElt,
    check_in_group,
    galois_act,
    matrix_oracle,
    membership_depth,
    normal_form,
    opposite_signs,
    random_iwahori_word,
    random_word,
    verify_normal_form_roundtrip,
    verify_relations,
    word,
)
from artifact.errors import NotInIwahori
from artifact.padic_arith import LocalRingSpec
from artifact.root_data import CATALOG, build_root_datum


def spec_for(name, N=4):
    d = build_root_datum(name)
    p = 5 if name in ("SL3", "SU3") else 3
    return LocalRingSpec(p, d.splitting_degree if d.h is not None else 1, N)


@pytest.mark.parametrize("name", CATALOG)
def test_relations_small(name):
    rep = verify_relations(name, spec_for(name), random.Random(7), trials=60)
    assert rep.ok, rep.failures[:2]


@pytest.mark.parametrize("name", CATALOG)
def test_normal_form_roundtrip(name):
    assert verify_normal_form_roundtrip(name, spec_for(name), random.Random(3), trials=20) == 0


@pytest.mark.parametrize("name", CATALOG)
def test_oracle_is_multiplicative(name):
    spec = spec_for(name)
    rng = random.Random(11)
    for _ in range(10):
        a, b = random_word(name, spec, rng, 4), random_word(name, spec, rng, 4)
        assert (matrix_oracle(a) @ matrix_oracle(b)).equals(matrix_oracle(a + b))
        assert check_in_group(a)


def test_opposite_signs_are_units():
    for name in CATALOG:
        e1, e2 = opposite_signs(name)
        assert {e1, e2} <= {1, -1}


def test_normal_form_rejects_non_iwahori():
    spec = spec_for("SL2")
    g = word("SL2", spec, RootElt(1, spec.one()))  # u_-(1) is outside I
    with pytest.raises(NotInIwahori):
        normal_form(g)


def test_membership_depth():
    spec = spec_for("SL2")
    d = build_root_datum("SL2")
    pos, neg = d.positive[0], d.neg(d.positive[0])
    g = word("SL2", spec, RootElt(pos, spec.element(3)), RootElt(neg, spec.element(9)))
    assert membership_depth(g, {pos: 1, neg: 2})
    assert not membership_depth(g, {pos: 2, neg: 2})


def test_galois_action_on_su3_is_an_involution_on_words():
    spec = spec_for("SU3")
    rng = random.Random(5)
    g = random_iwahori_word("SU3", spec, rng, 5)
    twice = galois_act("sigma", 2, g)
    assert matrix_oracle(twice).equals(matrix_oracle(g))
    t = word("SU3", spec, TorusElt((spec.element([2, 1]),)))
    assert check_in_group(t)
