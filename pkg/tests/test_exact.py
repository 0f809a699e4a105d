"""Exact-arithmetic primitives: factorials, telescoping tail sums, embedding."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from progcode import (
    embed_float,
    factorial,
    factorial_log_ratio_bound_holds,
    tail_sum_k_over_factorial,
)


def brute_tail_sum(lower: int, upper: int) -> Fraction:
    """Independent oracle: term-by-term summation of k/(k+1)!."""
    return sum((Fraction(k, factorial(k + 1)) for k in range(lower, upper + 1)), Fraction(0))


class TestFactorial:
    def test_empty_product(self):
        assert factorial(0) == 1

    def test_definition(self):
        assert factorial(5) == 120

    def test_against_iterated_multiplication(self):
        acc = 1
        for i in range(1, 14):
            acc *= i
        assert factorial(13) == acc == 6227020800

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            factorial(-1)


class TestTailSum:
    def test_infinite_sum_is_inverse_factorial(self):
        assert tail_sum_k_over_factorial(2) == Fraction(1, 2)

    def test_single_term(self):
        assert tail_sum_k_over_factorial(1, 1) == Fraction(1, 2)

    def test_three_terms_against_brute_force(self):
        expected = brute_tail_sum(1, 3)
        assert expected == Fraction(23, 24)
        assert tail_sum_k_over_factorial(1, 3) == expected

    @pytest.mark.parametrize("lower", [1, 2, 5, 17, 50])
    def test_matches_brute_force(self, lower):
        for upper in range(lower, lower + 12):
            assert tail_sum_k_over_factorial(lower, upper) == brute_tail_sum(lower, upper)

    def test_telescoping_closure(self):
        # finite sum + dropped tail restores the closed form, exactly
        for lower in range(1, 51):
            for upper in range(lower, min(lower + 9, 60) + 1):
                total = tail_sum_k_over_factorial(lower, upper) + Fraction(1, factorial(upper + 1))
                assert total == Fraction(1, factorial(lower))

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            tail_sum_k_over_factorial(0)
        with pytest.raises(ValueError):
            tail_sum_k_over_factorial(3, 2)


class TestEmbedFloat:
    def test_exact_dyadic(self):
        assert embed_float(0.5) == Fraction(1, 2)

    def test_tenth_has_the_ieee_value(self):
        # bit decomposition oracle: 0.1 rounds to 3602879701896397 * 2**-55
        mantissa, exponent = math.frexp(0.1)
        num, shift = int(mantissa * 2**53), 53 - exponent
        while num % 2 == 0:
            num, shift = num // 2, shift - 1
        assert (num, shift) == (3602879701896397, 55)
        assert embed_float(0.1) == Fraction(3602879701896397, 2**55)

    def test_negative_integer(self):
        assert embed_float(-2.0) == Fraction(-2, 1)

    def test_rejects_non_finite(self):
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(ValueError):
                embed_float(bad)

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_round_trips_through_float(self, value):
        assert float(embed_float(value)) == value

    @given(st.floats(allow_nan=False, allow_infinity=False),
           st.floats(allow_nan=False, allow_infinity=False))
    def test_injective(self, a, b):
        if a != b:
            assert embed_float(a) != embed_float(b)


class TestFactorialLogRatioBound:
    def test_720_at_6(self):
        # log2(720)=9.4919, log2(9.4919)=3.2468: ratio 2.923 <= 5
        assert factorial_log_ratio_bound_holds(720, 6)

    def test_omega_4(self):
        # log2(4)/log2(log2(4)) = 2/1 = 2 <= 5
        assert factorial_log_ratio_bound_holds(4, 6)

    def test_monotone_in_n(self):
        assert factorial_log_ratio_bound_holds(factorial(6), 7)

    def test_rejects_domain_violations(self):
        with pytest.raises(ValueError):
            factorial_log_ratio_bound_holds(3.9, 6)
        with pytest.raises(ValueError):
            factorial_log_ratio_bound_holds(100.0, 5)
        with pytest.raises(ValueError):
            factorial_log_ratio_bound_holds(factorial(7) + 1, 7)


class TestExactRealAlgebra:
    @given(
        st.fractions(min_value=-1000, max_value=1000),
        st.fractions(min_value=-1000, max_value=1000),
    )
    def test_add_then_subtract_is_identity(self, a, b):
        assert (a + b) - b == a

    @given(st.fractions(min_value=-1000, max_value=1000))
    def test_floor_is_tight(self, a):
        m = math.floor(a)
        assert m <= a < m + 1
