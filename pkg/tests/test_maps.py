from fractions import Fraction

import pytest

from densitylab import (
    BuckFactorial,
    CantorBase,
    CantorSeries,
    FactorialCantor,
    FreeGroupCoset,
    GeneratorPermutation,
    GroupInversion,
    GroupTranslation,
    Identity,
    Inverse,
    JordanRational,
    PrimePower,
    RadicalInverse,
    SemigroupElement,
    check_preserves_density,
    parse_map,
    vdc,
)
from densitylab.divisor import DivisorCosetSystem


def test_identity_on_buck():
    rep = check_preserves_density(Identity(), BuckFactorial(), BuckFactorial(), 4)
    assert rep.passed
    assert len(rep.rows) == 24
    assert all(r.slack == 0 for r in rep.rows)


def test_radical_inverse_level_five():
    rep = check_preserves_density(RadicalInverse.prime(2), PrimePower(2), JordanRational(ground=2), 5)
    assert rep.passed and rep.target_level == 32
    assert {r.image_outer for r in rep.rows} == {Fraction(1, 32)}


def test_factorial_cantor():
    src = CantorSeries(CantorBase.factorial())
    rep = check_preserves_density(FactorialCantor(), src, JordanRational(), 3)
    assert rep.passed and rep.target_level == 6


def test_inverse_direction():
    rep = check_preserves_density(Inverse(RadicalInverse.prime(3)), JordanRational(ground=3), PrimePower(3), 9)
    assert rep.passed


def test_forward_inverse():
    g = RadicalInverse.prime(2)
    assert g.forward(3) == Fraction(3, 4)
    assert g.inverse(Fraction(3, 4)) == 3
    assert all(g.inverse(g.forward(n)) == n for n in range(1, 300))


def test_mismatched_base_fails():
    # the 2-adic map does not carry 3-adic classes onto single intervals
    with pytest.raises(ValueError):
        check_preserves_density(RadicalInverse.prime(2), PrimePower(3), JordanRational(ground=2), 2)


@pytest.mark.parametrize("level", [1, 2, 3])
def test_free_group_maps(level):
    fg = FreeGroupCoset()
    assert check_preserves_density(GroupInversion(), fg, fg, level).passed
    assert check_preserves_density(GroupTranslation(Fraction(2)), fg, fg, level).passed
    assert check_preserves_density(GroupTranslation(Fraction(15, 4)), fg, fg, level).passed


def test_group_maps_are_bijections():
    inv, tr = GroupInversion(), GroupTranslation(Fraction(2, 3))
    for q in (Fraction(1, 2), Fraction(9, 5), Fraction(7)):
        assert inv.inverse(inv.forward(q)) == q
        assert tr.inverse(tr.forward(q)) == q


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generator_swaps(n):
    d = DivisorCosetSystem()
    for i in range(1, n):
        assert check_preserves_density(GeneratorPermutation.swap(i, i + 1), d, d, n).passed


def test_generator_permutation_forward():
    g = GeneratorPermutation.swap(1, 3)
    a = SemigroupElement.from_support({1: 2, 2: 1})
    assert g.forward(a) == SemigroupElement.from_support({3: 2, 2: 1})
    assert g.inverse(g.forward(a)) == a


@pytest.mark.parametrize(
    "text,name",
    [("identity", "identity"), ("vdc:3", None), ("cantor", None), ("inversion", None), ("translate:2", None), ("permute:1-2", None)],
)
def test_parse_map(text, name):
    m = parse_map(text)
    if name:
        assert m.name == name


def test_parse_map_vdc_is_vdc():
    assert parse_map("vdc:3").forward(5) == vdc(3, 5)
