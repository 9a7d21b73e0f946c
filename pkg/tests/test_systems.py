from fractions import Fraction
from itertools import islice

import pytest
from sympy.ntheory import factorint

from densitylab import (
    Answer,
    BuckFactorial,
    CantorBase,
    CantorSeries,
    Cell,
    FiniteCofinite,
    FiniteSet,
    FreeGroupCoset,
    IncompatibleLevel,
    IntervalUnion,
    JordanRational,
    OrderIntervalAtMostOne,
    PrimePower,
    ProductGroups,
    ResidueUnion,
    Squarefree,
    build_system,
    factorial,
    parse_system,
    point_mass_at_zero,
    system_from_json,
    system_to_json,
)


def squarefree_brute(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


class TestBuild:
    def test_buck_level_three(self):
        s = build_system("buck")
        cells = list(s.cells(3))
        assert len(cells) == 6
        assert {s.mass(c) for c in cells} == {Fraction(1, 6)}

    def test_prime_power(self):
        s = build_system("prime-power", p=2)
        assert s.cell_count(5) == 32
        assert s.mass(s.cell(5, 1)) == Fraction(1, 32)

    def test_free_group(self):
        s = build_system("free-group")
        assert s.cell_count(3) == 27
        assert s.mass(s.cell(3, 5)) == Fraction(1, 27)

    @pytest.mark.parametrize(
        "text", ["buck", "prime-power:3", "jordan", "jordan:2", "jordan-naive", "cantor-series:1,2,6", "free-group", "product:2,3", "finite-cofinite"]
    )
    def test_descriptor_round_trip(self, text):
        s = parse_system(text)
        assert system_from_json(system_to_json(s)).descriptor() == s.descriptor()

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            parse_system("nope")

    def test_level_zero_rejected(self):
        with pytest.raises(IncompatibleLevel):
            BuckFactorial().cell_count(0)


class TestLocate:
    def test_buck(self):
        s = BuckFactorial()
        c = s.locate(7, 3)
        assert s.describe_cell(c) == "1+(6)"

    def test_jordan(self):
        s = JordanRational()
        c = s.locate(Fraction(1, 3), 6)
        assert s.cell_bounds(c) == (Fraction(2, 6), Fraction(3, 6))

    def test_free_group(self):
        s = FreeGroupCoset()
        c = s.locate(Fraction(3, 2), 2)
        assert s.coset_exponents(c) == (1, 1)

    def test_point_outside(self):
        with pytest.raises(ValueError):
            JordanRational().locate(Fraction(3, 2), 4)
        with pytest.raises(ValueError):
            JordanRational(ground=2).locate(Fraction(1, 3), 4)


class TestDescriptors:
    def test_examples(self):
        assert BuckFactorial().describe_cell(Cell("buck", 3, 2)) == "1+(6)"
        j = JordanRational()
        assert j.describe_cell(j.cell(4, 4)) == "[3/4,1)∩ℚ"
        c = CantorSeries(CantorBase.geometric(2))
        assert c.describe_cell(c.cell(3, 3)) == "2+(4)"

    @pytest.mark.parametrize("system,level", [(BuckFactorial(), 3), (JordanRational(), 5), (FreeGroupCoset(), 2), (ProductGroups([2, 3]), 2)])
    def test_parse_inverts_describe(self, system, level):
        for cell in system.cells(level):
            assert system.parse_cell(system.describe_cell(cell)) == cell

    def test_representatives_are_inside(self):
        for s, level in [(BuckFactorial(), 4), (JordanRational(ground=3), 9), (FreeGroupCoset(), 2), (ProductGroups([2, 3]), 3)]:
            for cell in s.cells(level):
                assert s.locate(s.representative(cell), level) == cell
                for x in islice(s.sample_points(cell), 5):
                    assert s.locate(x, level) == cell


class TestOracles:
    def test_buck_squarefree_witness(self):
        s = BuckFactorial()
        d = s.meets(s.locate(3, 6), Squarefree())
        assert d.answer is Answer.YES
        assert d.witness % 720 == 3 and squarefree_brute(d.witness)

    def test_buck_squarefree_refutation(self):
        s = BuckFactorial()
        assert s.meets(s.locate(4, 6), Squarefree()).answer is Answer.NO

    def test_crt_rule_matches_scan(self):
        s = BuckFactorial()
        for r in range(720):
            scan = any(squarefree_brute(x) for x in (r + 720 * t for t in range(60)) if x > 0)
            assert (s.meets(s.cell(6, r + 1), Squarefree()).answer is Answer.YES) == scan

    def test_free_group_order_interval(self):
        s = FreeGroupCoset()
        for cell in s.cells(2):
            d = s.meets(cell, OrderIntervalAtMostOne())
            assert d.answer is Answer.YES
            assert 0 < d.witness <= 1 and s.locate(d.witness, 2) == cell

    def test_decision_is_not_a_bool(self):
        s = BuckFactorial()
        with pytest.raises(TypeError):
            bool(s.meets(s.cell(2, 1), Squarefree()))

    def test_finite_cofinite(self):
        s = FiniteCofinite()
        assert s.cell_count(3) == 3
        assert s.mass(s.locate(7, 3)) == 1
        assert s.mass(s.locate(2, 3)) == 0
        assert s.meets(s.cell(3, 1), FiniteSet(frozenset({1, 2}))).answer is Answer.NO

    def test_point_mass(self):
        s = point_mass_at_zero()
        assert s.mass(s.locate(24, 4)) == 1
        assert s.mass(s.locate(5, 4)) == 0


class TestProduct:
    def test_orders_repeat(self):
        s = ProductGroups([2, 3])
        assert [s.order(i) for i in range(1, 5)] == [2, 3, 3, 3]
        assert s.cell_count(3) == 2 * 3 * 3

    def test_residues_in_product_group(self):
        s = ProductGroups([2])
        c = s.locate((1, 0, 1), 2)
        assert s.describe_cell(c) == "(1,0,*)"

    def test_intervals_in_jordan(self):
        s = JordanRational()
        iv = IntervalUnion.single(Fraction(1, 4), Fraction(1, 2))
        assert s.meets(s.cell(8, 3), iv).answer is Answer.YES
        assert s.covers(s.cell(8, 3), iv).answer is Answer.YES
        assert s.meets(s.cell(8, 5), iv).answer is Answer.NO

    def test_residue_meets_with_witness(self):
        s = PrimePower(3)
        d = s.meets(s.cell(2, 5), ResidueUnion.single(1, 3))
        assert d.answer is Answer.YES and d.witness % 9 == 4 and d.witness % 3 == 1


def test_factorial_levels():
    assert BuckFactorial().modulus(5) == factorial(5)
