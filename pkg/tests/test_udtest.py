from fractions import Fraction

import numpy as np
import pytest

from densitylab import (
    BuckFactorial,
    DriverSequence,
    IncoherentDelta,
    IncompatibleLevel,
    IntervalUnion,
    JordanRational,
    PointMassDelta,
    ResidueUnion,
    SequenceSpec,
    TableDelta,
    UniformDelta,
    bud_report,
    check_coherence,
    counting_set,
    delta_from_distribution,
    distribution_function,
    factorial,
    parse_driver,
    star_discrepancy,
    ud_in_Z_report,
    uniform_continuity_check,
    vdc,
    weyl_sum,
)

EVENS = ResidueUnion.single(0, 2)


class TestCountingSet:
    def test_evens(self):
        assert counting_set(EVENS, lambda n: n, 10) == [2, 4, 6, 8, 10]

    def test_progression(self):
        assert counting_set(ResidueUnion.single(3, 4), lambda n: 2 * n + 1, 8) == [1, 3, 5, 7]

    def test_vdc(self):
        half = IntervalUnion.single(Fraction(0), Fraction(1, 2))
        assert counting_set(half, lambda n: vdc(2, n), 4) == [2, 4]


class TestUDInZ:
    def test_identity(self):
        assert ud_in_Z_report(DriverSequence.identity(), [5], 1000).max_deviation <= Fraction(1, 200)

    def test_doubling(self):
        rep = ud_in_Z_report(DriverSequence.affine(2, 0), [2], 1000)
        assert {(r.residue, r.deviation) for r in rep.rows} == {(0, Fraction(1, 2)), (1, Fraction(1, 2))}

    def test_block_shuffle(self):
        rep = ud_in_Z_report(DriverSequence.shuffle(7), [2, 3, 4], 10**4)
        assert rep.max_deviation <= Fraction(2, 100)

    def test_shuffle_is_a_permutation_of_blocks(self):
        vals = DriverSequence.shuffle(3, 16).values(64)
        assert sorted(vals) == list(range(1, 65))
        assert DriverSequence.shuffle(3, 16).values(20) == vals[:20]

    def test_parse(self):
        assert parse_driver("shift:1000") == DriverSequence.affine(1, 1000)
        assert parse_driver("shuffle:7,32").block == 32
        with pytest.raises(ValueError):
            parse_driver("random")


class TestBud:
    def test_consistent(self):
        rep = bud_report(BuckFactorial(), [ResidueUnion.single(1, 2)], lambda n: n, [DriverSequence.identity()], 10**4, 3)
        assert rep.rows[0].empirical == Fraction(1, 2)
        assert rep.verdict == "consistent"

    def test_disproved(self):
        rep = bud_report(BuckFactorial(), [EVENS], lambda n: 2 * n, [DriverSequence.identity()], 10**4, 3)
        assert rep.rows[0].empirical == 1
        assert rep.verdict == "disproved"

    def test_jordan_vdc(self):
        half = IntervalUnion.single(Fraction(0), Fraction(1, 2))
        rep = bud_report(JordanRational(), [half], lambda n: vdc(2, n), [DriverSequence.identity()], 2**10, 8)
        assert rep.rows[0].empirical == Fraction(1, 2)


class TestDiscrepancy:
    def test_examples(self):
        assert star_discrepancy([Fraction(1, 2)]) == Fraction(1, 2)
        assert star_discrepancy([Fraction(1, 2), Fraction(1, 4)]) == Fraction(1, 2)

    def test_against_brute_force(self):
        # sup over anchored intervals [0, t), checked at every point and just past it
        pts = SequenceSpec.vdc(3).points(50)
        n = len(pts)
        cands = set(pts) | {Fraction(1)}
        brute = max(
            max(abs(Fraction(sum(1 for p in pts if p < t), n) - t), abs(Fraction(sum(1 for p in pts if p <= t), n) - t))
            for t in cands
        )
        assert star_discrepancy(pts) == brute

    def test_float_input(self):
        assert star_discrepancy([0.5]) == pytest.approx(0.5)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            star_discrepancy([Fraction(1)])


class TestWeyl:
    def test_constant(self):
        assert weyl_sum([0] * 7, 1) == pytest.approx(1.0)

    def test_antipodal(self):
        assert weyl_sum([0, Fraction(1, 2)], 1) == pytest.approx(0.0, abs=1e-12)

    def test_matches_numpy_direct(self):
        pts = SequenceSpec.vdc(5).points(300)
        direct = abs(np.mean(np.exp(2j * np.pi * 3 * np.array([float(p) for p in pts]))))
        assert weyl_sum(pts, 3) == pytest.approx(direct, abs=1e-9)

    def test_zero_harmonic(self):
        with pytest.raises(ValueError):
            weyl_sum([Fraction(1, 2)], 0)


class TestDistribution:
    def test_uniform(self):
        xs = [Fraction(k, 24) for k in range(25)]
        assert distribution_function(UniformDelta(), 4, xs) == xs

    def test_point_mass(self):
        assert distribution_function(PointMassDelta(), 2, [Fraction(1, 2)]) == [1]

    def test_table(self):
        delta = TableDelta({1: {0: 1}, 2: {0: Fraction(1, 3), 1: Fraction(2, 3)}})
        assert distribution_function(delta, 2, [Fraction(1, 2)]) == [Fraction(1, 3)]

    def test_off_grid(self):
        with pytest.raises(IncompatibleLevel):
            distribution_function(UniformDelta(), 3, [Fraction(1, 4)])

    def test_incoherent(self):
        bad = TableDelta({1: {0: 1}, 2: {0: Fraction(1, 4), 1: Fraction(1, 4)}})
        with pytest.raises(IncoherentDelta):
            check_coherence(bad, [1, 2])


class TestContinuity:
    def test_uniform(self):
        rep = uniform_continuity_check(UniformDelta(), range(2, 7))
        assert rep.maxima == tuple(Fraction(1, factorial(n)) for n in range(2, 7))
        assert rep.decreasing

    def test_point_mass(self):
        rep = uniform_continuity_check(PointMassDelta(), range(2, 7))
        assert set(rep.maxima) == {1} and not rep.decreasing

    def test_square(self):
        rep = uniform_continuity_check(delta_from_distribution(lambda x: x * x), range(2, 6))
        expected = tuple(1 - Fraction(factorial(n) - 1, factorial(n)) ** 2 for n in range(2, 6))
        assert rep.maxima == expected and rep.decreasing
