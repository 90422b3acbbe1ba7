"""Coefficient-ring arithmetic: exactness, calculus maps, ring laws."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psikp.errors import NonZeroMean, NotAUnit, RingMismatch, UnsupportedRing
from psikp.rings import (
    FOURIER,
    FOURIER_Z,
    POLY,
    FourierElem,
    GaussRational,
    PolyElem,
    Q,
    ZSeriesElem,
    cos_x,
    fourier,
    poly,
    sin_x,
)

qs = st.builds(Q, st.integers(-9, 9), st.integers(1, 4))
gausses = st.builds(GaussRational, qs, qs)
fouriers = st.builds(
    lambda d: FourierElem(d),
    st.dictionaries(st.integers(-3, 3), gausses, max_size=4),
)
polys = st.builds(
    lambda d: PolyElem(d), st.dictionaries(st.integers(0, 5), qs, max_size=4)
)
zseries2 = st.builds(
    lambda d: ZSeriesElem(FOURIER, d, 2),
    st.dictionaries(st.integers(0, 2), fouriers, max_size=3),
)


class TestGaussRational:
    def test_inverse_roundtrip(self):
        g = GaussRational(Q(3, 4), Q(-2, 5))
        assert g * g.invert() == GaussRational(1)

    def test_zero_not_a_unit(self):
        with pytest.raises(NotAUnit):
            GaussRational(0).invert()

    def test_canonical_components(self):
        g = GaussRational(Q(4, 8), Q(-6, 4))
        assert (g.re.numerator, g.re.denominator) == (1, 2)
        assert (g.im.numerator, g.im.denominator) == (-3, 2)


class TestFourier:
    def test_additive_inverse(self):
        assert (fourier({0: 1}) + fourier({0: -1})).is_zero()

    def test_like_terms(self):
        assert fourier({1: Q(1, 2)}) + fourier({1: Q(1, 2)}) == fourier({1: 1})

    def test_inverse_modes_multiply_to_one(self):
        assert fourier({1: 1}) * fourier({-1: 1}) == FOURIER.one()

    def test_derive_eigenfunction(self):
        e = fourier({1: 1})
        assert e.derive() == e * GaussRational(0, 1)

    def test_derive_constant(self):
        assert FOURIER.coerce(5).derive().is_zero()

    def test_sin_cos(self):
        assert sin_x().derive() == cos_x()
        assert cos_x().derive() == -sin_x()

    def test_antiderive_eigenfunction(self):
        e = fourier({1: 1})
        assert e.antiderive() == e * GaussRational(0, -1)
        assert e.antiderive().derive() == e

    def test_antiderive_nonzero_mean(self):
        with pytest.raises(NonZeroMean):
            FOURIER.coerce(1).antiderive()

    def test_mean_extracts_constant(self):
        a = FOURIER.coerce(3) + fourier({1: 1})
        assert a.mean() == FOURIER.coerce(3)

    def test_mean_kills_derivatives(self):
        a = sin_x() * cos_x(2) + fourier({2: GaussRational(1, 3)})
        assert a.derive().mean().is_zero()

    def test_single_mode_inverse(self):
        a = fourier({3: GaussRational(2, 1)})
        assert a * a.invert() == FOURIER.one()

    def test_multimode_not_a_unit(self):
        with pytest.raises(NotAUnit):
            (FOURIER.one() + fourier({1: 1})).invert()

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            fourier({1: 1}) + poly({1: 1})


class TestPoly:
    def test_product_adds_degrees(self):
        assert poly({2: 1}) * poly({3: 1}) == poly({5: 1})

    def test_derive(self):
        assert poly({3: 1}).derive() == poly({2: 3})

    def test_antiderive_of_one(self):
        assert POLY.one().antiderive() == poly({1: 1})
        assert poly({1: 1}).antiderive().derive() == poly({1: 1})

    def test_no_integration_functional(self):
        with pytest.raises(UnsupportedRing):
            POLY.one().mean()

    def test_constant_inverse(self):
        assert poly({0: 2}).invert() == poly({0: Q(1, 2)})
        with pytest.raises(NotAUnit):
            poly({1: 1}).invert()


class TestZSeries:
    def test_componentwise_add(self):
        a, b, c = sin_x(), cos_x(), fourier({2: 1})
        lhs = ZSeriesElem(FOURIER, {0: a, 1: b}, 2) + ZSeriesElem(FOURIER, {1: c}, 2)
        assert lhs == ZSeriesElem(FOURIER, {0: a, 1: b + c}, 2)

    def test_product_truncates(self):
        a, b = sin_x(), cos_x()
        one = FOURIER.one()
        lhs = ZSeriesElem(FOURIER, {0: one, 1: a}, 1) * ZSeriesElem(
            FOURIER, {0: one, 1: b}, 1
        )
        assert lhs == ZSeriesElem(FOURIER, {0: one, 1: a + b}, 1)

    def test_mean_componentwise(self):
        elem = ZSeriesElem(FOURIER, {1: FOURIER.coerce(2) + fourier({1: 1})}, 2)
        assert elem.mean() == ZSeriesElem(FOURIER, {1: FOURIER.coerce(2)}, 2)

    def test_geometric_inverse(self):
        a = sin_x()
        s = ZSeriesElem(FOURIER, {0: FOURIER.one(), 1: a}, 2)
        inv = s.invert()
        assert inv == ZSeriesElem(FOURIER, {0: FOURIER.one(), 1: -a, 2: a * a}, 2)
        assert s * inv == ZSeriesElem(FOURIER, {0: FOURIER.one()}, 2)

    def test_nonunit(self):
        with pytest.raises(NotAUnit):
            ZSeriesElem(FOURIER, {1: sin_x()}, 2).invert()

    def test_antiderive_obstruction_reports_power(self):
        elem = ZSeriesElem(FOURIER, {1: FOURIER.coerce(1)}, 2)
        with pytest.raises(NonZeroMean):
            elem.antiderive()


# -- randomized laws -----------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(fouriers, fouriers)
def test_leibniz_fourier(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_leibniz_poly(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@settings(max_examples=40, deadline=None)
@given(zseries2, zseries2)
def test_leibniz_zseries(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@settings(max_examples=60, deadline=None)
@given(fouriers, fouriers)
def test_integration_by_parts(a, b):
    lhs = (a.derive() * b).mean()
    rhs = (a * b.derive()).mean()
    assert lhs == -rhs


@settings(max_examples=40, deadline=None)
@given(fouriers, fouriers, fouriers)
def test_ring_axioms_fourier(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)

@settings(max_examples=40, deadline=None)
@given(fouriers)
def test_antiderive_right_inverse(a):
    a = a - a.mean()  # project to the domain of the antiderivative
    assert a.antiderive().derive() == a


@settings(max_examples=40, deadline=None)
@given(fouriers, fouriers)
def test_zseries_agrees_with_base_on_constants(a, b):
    za = ZSeriesElem(FOURIER, {0: a}, 2)
    zb = ZSeriesElem(FOURIER, {0: b}, 2)
    assert (za + zb).c.get(0, FOURIER.zero()) == a + b
    assert (za * zb).c.get(0, FOURIER.zero()) == a * b
    assert za.derive().c.get(0, FOURIER.zero()) == a.derive()


def test_mean_of_z_element():
    # componentwise mean: z*(2 + e^{ix}) integrates to 2z
    inner = FOURIER.coerce(2) + fourier({1: 1})
    elem = ZSeriesElem(FOURIER, {1: inner}, 3)
    assert elem.mean() == ZSeriesElem(FOURIER, {1: FOURIER.coerce(2)}, 3)
