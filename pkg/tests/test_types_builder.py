import random

import pytest

from artifact.characters import conductors
from artifact.chevalley import GroupWord, RootElt, TorusElt
from artifact.errors import ConfigError, NonClosedSubsystem
from artifact.padic_arith import LocalRingSpec
from artifact.root_data import build_root_datum
from artifact.types_builder import (
    PrincipalClass,
    build_type,
    commutator_closure,
    concave_function,
    is_concave,
    iwahori_depths,
    rho_eval,
    support_census,
    twisted_levi_from_conductors,
)
from corpus import CORPUS

LABELS = sorted(CORPUS)


def pc(c):
    return PrincipalClass(c.datum, c)


@pytest.mark.parametrize("label", LABELS)
def test_depths_sum_to_conductor_and_are_concave(label):
    c = CORPUS[label]
    tp = build_type(pc(c))
    cond = conductors(c)
    d = c.datum
    for i in range(len(d.roots)):
        assert tp.f[i] + tp.f[d.neg(i)] == cond[i]
    assert is_concave(d, tp.f)


@pytest.mark.parametrize("label", [k for k in LABELS if "trivial" in k or "tame" in k])
def test_depth_zero_gives_iwahori(label):
    tp = build_type(pc(CORPUS[label]))
    assert tp.is_iwahori()
    assert tp.f == iwahori_depths(tp.datum)
    assert tp.index_in_iwahori(3) == 1


def test_concave_function_values():
    f = concave_function(pc(CORPUS["SL2/c3"]))
    d = CORPUS["SL2/c3"].datum
    pos = d.positive[0]
    assert (f[pos], f[d.neg(pos)]) == (1, 2)


def test_twisted_levi_sequences():
    seq = twisted_levi_from_conductors(pc(CORPUS["SL2/trivial"]))
    assert seq.d == 1
    seq = twisted_levi_from_conductors(pc(CORPUS["SL2/c2"]))
    assert seq.d == 2 and seq.depths[-1] == 1 and not seq.subsystems[-1]
    seq = twisted_levi_from_conductors(pc(CORPUS["SL3/c2"]))
    assert seq.d == 2 and len(seq.subsystems[-1]) == 2


def test_forged_sl3_conductor_pattern_is_rejected():
    """cond = 2 on +-alpha and 1 on +-beta, +-(alpha+beta): {cond <= 1} is not closed."""
    cls = pc(CORPUS["SL3/c2"])
    d = cls.datum
    a, b = d.simple
    ab = d.sum_root(a, b)
    cond = {i: 1 for i in range(len(d.roots))}
    cond[a] = cond[d.neg(a)] = 2
    with pytest.raises(NonClosedSubsystem):
        twisted_levi_from_conductors(cls, cond)
    # the pattern no character produces; real characters put alpha+beta with alpha
    real = conductors(cls.chi)
    assert real[ab] == real[a]


def test_p_dividing_weyl_order_is_a_config_error():
    from artifact.characters import SmoothCharacter, UnitCharacter

    d = build_root_datum("SL3")
    c = SmoothCharacter(d, (UnitCharacter(3, 1, 1, 2, (1,)), UnitCharacter(3, 1, 1, 2, (0,))))
    with pytest.raises(ConfigError):
        PrincipalClass(d, c)


def test_rho_is_a_character_on_j():
    tp = build_type(pc(CORPUS["SL2/c2"]))
    spec = LocalRingSpec(3, 1, 6)
    rng = random.Random(2)
    d = tp.datum
    pos, neg = d.positive[0], d.neg(d.positive[0])

    def rand_j():
        return GroupWord("SL2", spec, (
            RootElt(pos, spec.random(rng, min_val=tp.f[pos])),
            TorusElt((spec.random(rng, unit=True),)),
            RootElt(neg, spec.random(rng, min_val=tp.f[neg])),
        ))

    for _ in range(20):
        x, y = rand_j(), rand_j()
        assert rho_eval(tp, x + y) == rho_eval(tp, x) * rho_eval(tp, y)


@pytest.mark.parametrize("label", ["SL2/trivial", "SL2/tame", "SL2/c2", "SL2/c3"])
def test_support_census_sl2(label):
    census = support_census(build_type(pc(CORPUS[label])))
    s = census.summary()
    assert census.ok, s
    assert s["inconclusive"] == 0


@pytest.mark.parametrize("label", ["SL2/c2", "GL2/c2", "SL3/c2", "Sp4/c2c2", "SU3/c2"])
def test_commutator_closure(label):
    rep = commutator_closure(build_type(pc(CORPUS[label])), random.Random(4), samples=30)
    assert rep.ok, rep.failures[:2]
