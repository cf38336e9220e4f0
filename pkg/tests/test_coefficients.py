from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cscx.coefficients import (
    GaussianRational,
    PolyCoefficient,
    TrigCoefficient,
    coefficient_from_json,
    coefficient_to_json,
    evaluate,
    partial_derivative,
    poly_ring,
    ring_multiply,
    trig_cos,
    trig_ring,
    trig_sin,
)
from cscx.errors import (
    InvalidAxisError,
    RingMismatchError,
    UnsupportedRingOperationError,
)

from helpers import random_poly, random_trig, rng

POLY = poly_ring(4)
TRIG = trig_ring(4)


fractions = st.builds(
    Fraction, st.integers(-30, 30), st.integers(1, 9)
)
exponents = st.tuples(*[st.integers(0, 3)] * 4)


@st.composite
def polys(draw):
    terms = draw(st.dictionaries(exponents, fractions, max_size=4))
    return PolyCoefficient(4, terms)


@st.composite
def trigs(draw):
    pairs = draw(
        st.lists(
            st.tuples(st.tuples(*[st.integers(-2, 2)] * 4), fractions, fractions),
            max_size=3,
        )
    )
    out: dict = {}
    for freq, re, im in pairs:
        c = GaussianRational(re, im)
        mirror = tuple(-f for f in freq)
        out[freq] = out.get(freq, GaussianRational()) + c
        out[mirror] = out.get(mirror, GaussianRational()) + c.conj()
    return TrigCoefficient(4, out)


class TestRingAxioms:
    @given(polys(), polys(), polys())
    def test_poly_ring_axioms(self, a, b, c):
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) + c == a + (b + c)

    @settings(max_examples=40)
    @given(trigs(), trigs(), trigs())
    def test_trig_ring_axioms(self, a, b, c):
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @given(polys())
    def test_poly_identity(self, f):
        assert ring_multiply(POLY.one(), f) == f

    def test_monomial_product(self):
        x1 = POLY.var(0)
        y1 = POLY.var(1)
        assert (x1 * y1).terms == {(1, 1, 0, 0): Fraction(1)}

    def test_inverse_frequencies_cancel(self):
        from cscx.coefficients import trig_mode

        up = trig_mode(TRIG, (1, 0, 0, 0))
        down = trig_mode(TRIG, (-1, 0, 0, 0))
        assert (up * down) == TRIG.one()


class TestDerivative:
    def test_power_rule(self):
        x = POLY.var(0)
        assert partial_derivative(x * x, 0) == x.scale(2)

    def test_annihilates_independent_variable(self):
        f = random_poly(poly_ring(4), rng("indep"))
        padded = f.pad(5)
        assert partial_derivative(padded, 4).is_zero()

    def test_cos_derivative(self):
        theta = (1, 0, 0, 0)
        assert partial_derivative(trig_cos(TRIG, theta), 0) == -trig_sin(TRIG, theta)

    def test_leibniz_poly_200_random_pairs(self):
        r = rng("leibniz-poly")
        for _ in range(200):
            f = random_poly(POLY, r)
            g = random_poly(POLY, r)
            for var in range(4):
                left = partial_derivative(f * g, var)
                right = f * partial_derivative(g, var) + g * partial_derivative(f, var)
                assert left == right

    def test_leibniz_trig_200_random_pairs(self):
        r = rng("leibniz-trig")
        for _ in range(200):
            f = random_trig(TRIG, r)
            g = random_trig(TRIG, r)
            for var in range(4):
                left = partial_derivative(f * g, var)
                right = f * partial_derivative(g, var) + g * partial_derivative(f, var)
                assert left == right

    @given(polys(), st.integers(0, 3), st.integers(0, 3))
    def test_mixed_partials_commute_poly(self, f, i, j):
        assert f.partial(i).partial(j) == f.partial(j).partial(i)

    @settings(max_examples=40)
    @given(trigs(), st.integers(0, 3), st.integers(0, 3))
    def test_mixed_partials_commute_trig(self, f, i, j):
        assert f.partial(i).partial(j) == f.partial(j).partial(i)

    def test_reality_preserved(self):
        r = rng("reality")
        for _ in range(100):
            f = random_trig(TRIG, r)
            g = random_trig(TRIG, r)
            assert (f * g).is_real()
            assert f.partial(r.randrange(4)).is_real()

    def test_invalid_axis(self):
        with pytest.raises(InvalidAxisError):
            POLY.one().partial(9)


class TestEvaluate:
    def test_monomial(self):
        # x1 * y2 at (1, 2, 3, 4) with coordinate order (x1, y1, x2, y2)
        f = POLY.var(0) * POLY.var(3)
        assert evaluate(f, [Fraction(1), Fraction(2), Fraction(3), Fraction(4)]) == 4

    def test_constant(self):
        assert evaluate(POLY.const(7), [Fraction(0)] * 4) == 7

    def test_constructed_root(self):
        f = POLY.var(0) * POLY.var(0) - POLY.var(1)
        assert evaluate(f, [Fraction(2), Fraction(4), Fraction(1), Fraction(1)]) == 0

    def test_trig_unsupported(self):
        with pytest.raises(UnsupportedRingOperationError):
            evaluate(trig_cos(TRIG, (1, 0, 0, 0)), [Fraction(0)] * 4)

    def test_wrong_point_length(self):
        with pytest.raises(InvalidAxisError):
            evaluate(POLY.one(), [Fraction(0)] * 3)


class TestMismatch:
    def test_cross_ring_product(self):
        with pytest.raises(RingMismatchError):
            ring_multiply(POLY.one(), TRIG.one())

    def test_different_variable_counts(self):
        with pytest.raises(RingMismatchError):
            ring_multiply(POLY.one(), poly_ring(3).one())

    def test_reality_enforced_at_construction(self):
        with pytest.raises(RingMismatchError):
            TrigCoefficient(4, {(1, 0, 0, 0): GaussianRational(Fraction(1))})


class TestSerialization:
    @given(polys())
    def test_poly_round_trip(self, f):
        assert coefficient_from_json(coefficient_to_json(f)) == f

    @settings(max_examples=40)
    @given(trigs())
    def test_trig_round_trip(self, f):
        assert coefficient_from_json(coefficient_to_json(f)) == f

    def test_documented_shape(self):
        f = POLY.var(0)
        payload = coefficient_to_json(f)
        assert payload["ring"] == "poly"
        assert payload["terms"] == [{"exp": [1, 0, 0, 0], "num": "1", "den": "1"}]
