"""Laurent field arithmetic and the Euler-scheme divergence witness."""

from __future__ import annotations

import math
import random

import pytest

from psikp.errors import NotAUnit
from psikp.laurent import (
    LaurentSeries,
    coefficient_limit_check,
    divergence_witness,
    euler_step_product,
)
from psikp.rings import Q


class TestField:
    def test_product_convolves(self):
        a = LaurentSeries({-1: 1, 0: 2})
        b = LaurentSeries({1: 3})
        assert a * b == LaurentSeries({0: 3, 1: 6})

    def test_inverse_roundtrip_randomized(self):
        rng = random.Random(11)
        for _ in range(25):
            coeffs = {
                rng.randint(-4, 4): Q(rng.randint(-5, 5), rng.randint(1, 4))
                for _ in range(rng.randint(1, 5))
            }
            a = LaurentSeries(coeffs)
            if a.is_zero():
                continue
            inv = a.inverse(14)
            prod = a * inv
            assert prod == LaurentSeries.one()
            assert prod.top >= 8

    def test_inverse_of_zero(self):
        with pytest.raises(NotAUnit):
            LaurentSeries.zero().inverse(5)

    def test_inverse_valuation_negates(self):
        a = LaurentSeries({3: Q(2), 5: Q(1)})
        assert a.inverse(6).lowest_degree() == -3

    def test_power(self):
        x = LaurentSeries.x(-1)
        assert (LaurentSeries.one() + x).power(2) == LaurentSeries(
            {0: 1, -1: 2, -2: 1}
        )


class TestEulerProduct:
    def test_n_equals_one(self):
        assert euler_step_product(1) == LaurentSeries({0: 1, -1: 1})

    def test_n_equals_two_coefficients(self):
        p = euler_step_product(2)
        assert p.coeff(-1) == 1
        assert p.coeff(-2) == Q(1, 4)

    def test_binomial_formula(self):
        for n in (3, 7, 12):
            p = euler_step_product(n)
            for m in range(n + 1):
                assert p.coeff(-m) == Q(math.comb(n, m), n**m)

    def test_matches_explicit_power(self):
        n = 6
        base = LaurentSeries.one() + LaurentSeries.x(-1).scale(Q(1, n))
        assert base.power(n) == euler_step_product(n)

    def test_reported_window_is_marked(self):
        p = euler_step_product(9, mmax=4)
        assert p.low == -4
        assert min(p.c) == -4


class TestSandwich:
    def test_m_one_is_exact(self):
        for n in (1, 5, 50):
            value, _ = coefficient_limit_check(1, n)
            assert value == 1

    def test_m_zero(self):
        value, bound = coefficient_limit_check(0, 10)
        assert value == 1 and bound == 1

    def test_m2_n100_closed_form(self):
        value, bound = coefficient_limit_check(2, 100)
        assert value * 2 == Q(99, 100)
        assert bound == Q(99, 100)

    def test_holds_on_a_grid(self):
        for m in range(6):
            for n in (max(m, 1), 10, 100, 1000):
                if n < m:
                    continue
                value, bound = coefficient_limit_check(m, n)
                assert bound <= value * math.factorial(m) <= 1


class TestDivergenceWitness:
    def test_supports_escape(self):
        rep = divergence_witness([1, 2, 3])
        assert rep.lowest_degrees == (-1, -2, -3)
        assert rep.verdict == "pointwise convergent, order-unbounded"

    def test_fixed_degree_monotone_approach(self):
        rep = divergence_witness([2, 4, 8, 16, 64], mmax=2)
        vals = rep.coefficients[-2]
        # C(n,2)/n^2 = (n-1)/(2n) increases toward the limit 1/2
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(v < rep.limits[-2] for v in vals)
        assert rep.limits[-2] == Q(1, 2)

    def test_lowest_degree_strictly_decreasing(self):
        rep = divergence_witness([10, 100, 1000], mmax=3)
        lows = rep.lowest_degrees
        assert lows == (-10, -100, -1000)
        assert all(a > b for a, b in zip(lows, lows[1:]))
