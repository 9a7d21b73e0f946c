import random
from fractions import Fraction

import numpy as np
import pytest
from sympy.ntheory import factorint

from densitylab import (
    CantorBase,
    NotRepresentable,
    ModulusMismatch,
    SequenceSpec,
    box_class,
    cantor_factorial,
    cantor_factorial_inverse,
    class_of_interval,
    digits,
    fmt_float,
    fmt_rational,
    from_digits,
    image_interval,
    is_squarefree,
    mixed_radix_inverse,
    mixed_radix_point,
    multidim_point,
    nth_prime,
    valuation,
    vdc,
    vdc_inverse,
)


def vdc_by_strings(p: int, n: int) -> Fraction:
    # reverse the base-p numeral; independent of the Horner code path
    s = np.base_repr(n, base=p)[::-1]
    return sum((Fraction(int(ch, 36), p ** (i + 1)) for i, ch in enumerate(s)), Fraction(0))


def factorial_point_greedy(n: int) -> Fraction:
    out, j, fact = Fraction(0), 1, 1
    while n:
        d = n % (j + 1)
        out += Fraction(d, fact * (j + 1))
        n //= j + 1
        fact *= j + 1
        j += 1
    return out


class TestExact:
    def test_formats(self):
        assert fmt_rational(Fraction(3, 4)) == "3/4"
        assert fmt_rational(2) == "2/1"
        assert fmt_float(0.1) == "0.1"
        assert float(fmt_float(1 / 3)) == 1 / 3

    def test_primes_and_valuations(self):
        assert [nth_prime(i) for i in range(1, 7)] == [2, 3, 5, 7, 11, 13]
        assert valuation(720, 2) == 4
        assert valuation(720, 3) == 2
        for n in range(1, 500):
            assert is_squarefree(n) == all(e == 1 for e in factorint(n).values())


class TestVdc:
    @pytest.mark.parametrize("p,n,q", [(2, 1, Fraction(1, 2)), (2, 3, Fraction(3, 4)), (3, 5, Fraction(7, 9))])
    def test_values(self, p, n, q):
        assert vdc(p, n) == q
        assert vdc_inverse(p, q) == n

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_against_string_reversal(self, p):
        for n in range(1, 2000):
            assert vdc(p, n) == vdc_by_strings(p, n)

    def test_zero_has_no_preimage(self):
        with pytest.raises(NotRepresentable):
            vdc_inverse(2, 0)

    def test_non_p_adic_rejected(self):
        with pytest.raises(NotRepresentable):
            vdc_inverse(2, Fraction(1, 3))
        with pytest.raises(ValueError):
            vdc_inverse(2, Fraction(3, 2))


class TestRandomRationals:
    """Round trips starting from the rational side, 10^3 draws per map."""

    @pytest.mark.parametrize("p", [2, 3])
    def test_vdc(self, p):
        rng = random.Random(p)
        for _ in range(1000):
            k = rng.randint(1, 40)
            q = Fraction(rng.randint(1, p**k - 1), p**k)
            assert vdc(p, vdc_inverse(p, q)) == q

    def test_cantor_factorial(self):
        # every rational in (0, 1) has a terminating factorial expansion
        rng = random.Random(0)
        for _ in range(1000):
            b = rng.randint(2, 2000)
            q = Fraction(rng.randint(1, b - 1), b)
            assert cantor_factorial(cantor_factorial_inverse(q)) == q


class TestCantorFactorial:
    @pytest.mark.parametrize("n,q", [(1, Fraction(1, 2)), (3, Fraction(2, 3)), (5, Fraction(5, 6))])
    def test_values(self, n, q):
        assert cantor_factorial(n) == q
        assert cantor_factorial_inverse(q) == n

    def test_against_greedy(self):
        for n in range(1, 3000):
            assert cantor_factorial(n) == factorial_point_greedy(n)

    def test_digits_bounded_by_radix(self):
        base = CantorBase.factorial()
        for n in range(1, 1000):
            ds = digits(base, n)
            assert all(0 <= d <= j for j, d in enumerate(ds, 1))
            assert from_digits(base, ds) == n


class TestMixedRadix:
    def test_geometric_matches_vdc(self):
        base = CantorBase.geometric(2)
        for n in range(1, 3000):
            assert mixed_radix_point(base, n) == vdc(2, n)

    def test_factorial_moduli(self):
        assert mixed_radix_point([1, 2, 6, 24, 120], 3) == Fraction(2, 3)

    def test_powers_of_three(self):
        assert mixed_radix_point([1, 3, 9], 5) == Fraction(7, 9)
        assert mixed_radix_inverse([1, 3, 9], Fraction(7, 9)) == 5

    def test_finite_list_overflow(self):
        with pytest.raises(NotRepresentable):
            mixed_radix_point([1, 3, 9], 9)

    def test_moduli_must_divide(self):
        with pytest.raises(ValueError):
            CantorBase.from_moduli([1, 2, 5])

    def test_multidim(self):
        specs = [SequenceSpec.vdc(2), SequenceSpec.vdc(3)]
        assert multidim_point(specs, 1) == (Fraction(1, 2), Fraction(1, 3))
        assert multidim_point(specs, 5) == (Fraction(5, 8), Fraction(7, 9))
        assert multidim_point([SequenceSpec.vdc(2)], 6) == (vdc(2, 6),)


class TestImageInterval:
    def test_examples(self):
        assert image_interval(SequenceSpec.vdc(2), 1, 4) == (Fraction(1, 2), Fraction(3, 4))
        assert image_interval(SequenceSpec.cantor(), 0, 2) == (Fraction(0), Fraction(1, 2))
        assert image_interval(SequenceSpec.cantor(), 5, 6) == (Fraction(5, 6), Fraction(1))

    def test_modulus_must_be_a_level(self):
        with pytest.raises(ModulusMismatch):
            image_interval(SequenceSpec.vdc(2), 1, 6)

    def test_class_law_factorial(self):
        spec = SequenceSpec.cantor()
        for m in (2, 6, 24):
            for r in range(m):
                lo, hi = image_interval(spec, r, m)
                for t in range(40):
                    n = r + t * m
                    if n:
                        assert lo <= spec.point(n) < hi

    def test_class_of_interval_inverts(self):
        spec = SequenceSpec.vdc(3)
        for r in range(27):
            lo, _ = image_interval(spec, r, 27)
            assert class_of_interval(spec, int(lo * 27), 27) == r

    def test_box_class_crt(self):
        specs = [SequenceSpec.vdc(2), SequenceSpec.vdc(3)]
        b, m = box_class(specs, [4, 9], [1, 2])
        assert m == 36
        for n in range(1, 400):
            x, y = multidim_point(specs, n)
            inside = Fraction(1, 4) <= x < Fraction(2, 4) and Fraction(2, 9) <= y < Fraction(3, 9)
            assert inside == (n % 36 == b % 36)
