import pytest

from artifact.errors import InvalidLevi, UnknownGroup
from artifact.root_data import (
    CATALOG,
    build_root_datum,
    cochar_from_coords,
    coords_of_cochar,
    is_dominant,
    is_regular,
    levi_weyl,
    longest_element,
    min_coset_reps,
    pair,
    pairing_height,
    weyl_group_order,
    weyl_generate,
)

EXPECTED = {  # (number of roots, |W_E|, rank)
    "SL2": (2, 2, 1),
    "GL2": (2, 2, 2),
    "SL3": (6, 6, 2),
    "Sp4": (8, 8, 2),
    "SU3": (6, 6, 2),
}


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_shapes(name):
    d = build_root_datum(name)
    n, w, rank = EXPECTED[name]
    assert len(d.roots) == n
    assert weyl_group_order(d) == w == len(weyl_generate(d))
    assert d.rank == rank
    assert len(d.positive) == n // 2


@pytest.mark.parametrize("name", CATALOG)
def test_pairing_and_reflections(name):
    d = build_root_datum(name)
    for i, (a, av) in enumerate(zip(d.roots, d.coroots)):
        assert pair(a, av) == 2
        s = d.reflection(i)
        assert s.act(a) == tuple(-x for x in a)
        # the Weyl group permutes the roots
        for w in weyl_generate(d):
            assert d.weyl_act_root(w, i) is not None
    w0 = longest_element(d)
    assert w0.length == len(d.positive)
    assert sorted(d.inversions(w0)) == sorted(d.positive)


@pytest.mark.parametrize("name", CATALOG)
def test_rho_pairing(name):
    d = build_root_datum(name)
    for i in d.simple:
        assert pair(d.rho2, d.coroots[i]) == 2


def test_closure():
    d = build_root_datum("SL3")
    a, b = d.simple
    assert not d.is_closed(set(d.positive))  # closure here includes symmetry
    assert d.is_closed({a, d.neg(a)})
    assert not d.is_closed({a, d.neg(a), b, d.neg(b)})
    assert d.is_closed(range(len(d.roots)))


def test_cochar_coordinates_roundtrip():
    for name in CATALOG:
        d = build_root_datum(name)
        for v in d.coroots:
            assert cochar_from_coords(d, coords_of_cochar(d, v)) == tuple(v)


def test_dominance():
    d = build_root_datum("SL2")
    nu = cochar_from_coords(d, (1,), split=True)
    assert is_dominant(d, nu) and is_regular(d, nu)
    assert pairing_height(d, nu) == 2
    assert not is_dominant(d, cochar_from_coords(d, (-1,), split=True))


def test_levi_and_coset_reps():
    d = build_root_datum("Sp4")
    assert len(levi_weyl(d, ())) == 1
    assert len(levi_weyl(d, (0,))) == 2
    assert len(levi_weyl(d, (0, 1))) == 8
    assert len(min_coset_reps(d, (0,))) == 4
    with pytest.raises(InvalidLevi):
        levi_weyl(d, (5,))


def test_unknown_group():
    with pytest.raises(UnknownGroup):
        build_root_datum("G2")
