from fractions import Fraction

import pytest

from densitylab import (
    Box,
    Complement,
    ExpSet,
    ExponentBox,
    FiniteSet,
    FullSupportMin,
    IntervalUnion,
    Intersection,
    InvalidParameters,
    Permute,
    PerfectPower,
    PointOutsideGroundSet,
    ResidueUnion,
    SemigroupElement,
    SparseMin,
    Squarefree,
    SubsemigroupH,
    Translate,
    Union,
    format_point,
    interval_normal_form,
    parse_element,
    parse_point,
    parse_set,
    residue_normal_form,
    set_from_json,
    set_to_json,
    to_box,
)


def elem(**kw) -> SemigroupElement:
    return SemigroupElement.from_support({int(k[1:]): v for k, v in kw.items()})


class TestSemigroup:
    def test_arithmetic(self):
        a, b = elem(p1=2), elem(p1=1, p3=1)
        assert (a * b) == elem(p1=3, p3=1)
        assert b.divides((a * b))
        assert (a * b).quotient(b) == a
        assert str((a * b)) == "p1^3*p3"

    def test_quotient_requires_division(self):
        with pytest.raises(ValueError):
            elem(p1=1).quotient(elem(p2=1))

    def test_expset(self):
        s = ExpSet.values({0}) | ExpSet.at_least(3)
        assert [v for v in range(8) if v in s] == [0, 3, 4, 5, 6, 7]
        assert s.count_upto(5) == 4
        assert s.complement().count_upto(5) == 2
        assert ExpSet.multiples(3).class_meets(1, 4)
        assert not ExpSet.values({0, 1}).class_meets(2, 4)
        assert ExpSet.at_least(2).class_covered(3, 4)

    def test_box_counts(self):
        box = Box((), ExpSet.values({0, 1}))
        assert box.divisor_count(3) == 8
        assert box.coset_count(4) == 16


class TestContains:
    def test_residue_union(self):
        s = ResidueUnion(((1, 4), (0, 6)))
        assert [n for n in range(1, 14) if s.contains(n)] == [1, 5, 6, 9, 12, 13]
        assert residue_normal_form(s) == (frozenset({0, 1, 5, 6, 9}), 12)

    def test_interval_union(self):
        s = IntervalUnion(((Fraction(0), Fraction(1, 4)), (Fraction(1, 8), Fraction(1, 2))))
        assert s.merged() == [(Fraction(0), Fraction(1, 2))]
        assert s.measure() == Fraction(1, 2)
        assert not s.contains(Fraction(1, 2))
        assert interval_normal_form(Complement(s)).merged() == [(Fraction(1, 2), Fraction(1))]

    def test_predicates(self):
        sq = Squarefree()
        assert sq.contains(30) and not sq.contains(12)
        assert sq.contains(elem(p1=1, p4=1)) and not sq.contains(elem(p2=2))
        assert PerfectPower(2).contains(elem(p1=2, p2=4))
        assert SubsemigroupH((2, 3)).contains(elem(p1=2, p2=3, p5=1))
        assert not SubsemigroupH((2, 3)).contains(elem(p2=2))
        assert SparseMin(2).contains(elem(p1=2, p7=3))
        assert not SparseMin(2).contains(elem(p7=1))
        assert FullSupportMin(1).contains(elem(p1=1, p2=1), window=2)
        assert not FullSupportMin(1).contains(elem(p1=1), window=2)
        assert not FullSupportMin(2).contains(elem(p1=2, p2=2, p3=1), window=2)

    def test_full_support_min_needs_window(self):
        with pytest.raises(InvalidParameters):
            FullSupportMin(1).contains(elem(p1=1))

    def test_wrong_point_type(self):
        assert PerfectPower(2).contains(49) and not PerfectPower(2).contains(50)
        with pytest.raises(PointOutsideGroundSet):
            SparseMin(2).contains(4)

    def test_algebra(self):
        s = ResidueUnion.single(0, 2) | ResidueUnion.single(0, 3)
        assert isinstance(s, Union)
        t = ~s & ResidueUnion.single(1, 5)
        assert isinstance(t, Intersection)
        assert [n for n in range(1, 30) if t.contains(n)] == [1, 11]

    def test_translate_and_permute(self):
        s = Translate(elem(p1=1), Squarefree())
        assert s.contains(elem(p1=2)) and not s.contains(elem(p2=1))
        perm = Permute(((1, 2), (2, 1)), SubsemigroupH((2, 3)))
        assert perm.contains(elem(p1=3, p2=2))
        box = to_box(perm)
        assert box.divisor_count(6) == 3 * 4 * 7**4


class TestSyntax:
    @pytest.mark.parametrize(
        "text",
        [
            "residue:3+(4)",
            "residue:1+(6),5+(6)",
            "interval:[1/4,1/2),[3/4,1)",
            "finite:1,2,5",
            "box:1=0%2,3=1",
            "squarefree",
            "perfect-power:2",
            "subsemigroup-h:2,3",
            "sparse-min:2",
            "full-support-min:1",
            "order-interval-at-most-one",
            "~squarefree",
            "squarefree | perfect-power:3 & sparse-min:2",
            "{residue:0+(2) | residue:0+(3)} & ~residue:0+(5)",
            "translate[p1^2*p3]squarefree",
            "permute[1-2]subsemigroup-h:2,3",
        ],
    )
    def test_json_round_trip(self, text):
        spec = parse_set(text)
        assert set_from_json(set_to_json(spec)) == spec

    def test_precedence(self):
        spec = parse_set("residue:0+(2) | residue:0+(3) & residue:0+(5)")
        assert isinstance(spec, Union)
        assert spec.contains(2) and not spec.contains(3) and spec.contains(15)

    @pytest.mark.parametrize("bad", ["", "residue:", "bogus", "{squarefree", "perfect-power", "squarefree &", "box:1=x"])
    def test_errors(self, bad):
        with pytest.raises(InvalidParameters):
            parse_set(bad)

    def test_box_atom(self):
        spec = parse_set("box:1=0%2,3=1")
        assert isinstance(spec, ExponentBox)
        assert spec.contains(elem(p1=4, p3=1)) and not spec.contains(elem(p1=1, p3=1))

    def test_finite_rationals(self):
        assert parse_set("finite:1/2,3") == FiniteSet(frozenset({Fraction(1, 2), 3}))

    def test_points(self):
        assert parse_point("7", "natural") == 7
        assert parse_point("3/2", "rational") == Fraction(3, 2)
        assert parse_point("(1,0,1)", "tuple") == (1, 0, 1)
        assert parse_point("p1^2*p3", "element") == elem(p1=2, p3=1)
        assert parse_element("1") == SemigroupElement()
        assert format_point(Fraction(3, 2)) == "3/2"
        assert format_point((1, 2)) == "(1,2)"
