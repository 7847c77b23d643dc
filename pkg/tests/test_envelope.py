from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals, step_functions
from hlvar.algebraic import QuadraticRoot, Surd, compare, rational_between
from hlvar.corpus import F1, F2
from hlvar.envelope import (
    candidate_curves,
    centered_envelope,
    grid_lower_bound,
    noncentered_envelope,
    upper_envelope,
    variation_enclosure,
)
from hlvar.maxop import centered_max, noncentered_max
from hlvar.stepfn import StepFunction, absolute, constant, reflect, variation

# seeded corpus member whose envelope has two irrational crossings
IRRATIONAL = StepFunction.from_json(
    '{"breakpoints": ["-4", "-25/7", "-18/13", "0", "12/11", "19/10"],'
    ' "values": ["-15/8", "-3", "4/3", "44/15", "-2", "-14/15", "-1/6"]}'
)


def sign_diff(a, b) -> int:
    """Exact sign of ``a - b`` for rationals and surds."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    if isinstance(a, Fraction):
        return -(b - a).sign()
    return (a - b).sign()


class TestCandidateCurves:
    def test_count(self):
        assert len(candidate_curves(F1)) == 6
        assert len(candidate_curves(F2)) == 10
        assert len(candidate_curves(constant(3))) == 2

    def test_pointwise_max(self):
        vals = [c.value_at(Fraction(2)) for c in candidate_curves(F1)]
        assert max(v for v in vals if v is not None) == Fraction(1, 4)


class TestUpperEnvelope:
    def test_indicator_regimes(self):
        env = upper_envelope(candidate_curves(F1))
        assert [(p.lo, p.hi) for p in env.pieces] == [(None, 0), (0, 1), (1, None)]
        for x in (Fraction(-3), Fraction(-1, 7)):
            assert env.evaluate(x) == 1 / (2 * (1 - x))
        assert env.evaluate(Fraction(1, 3)) == 1
        for x in (Fraction(5, 4), Fraction(9)):
            assert env.evaluate(x) == 1 / (2 * x)
        assert env.evaluate(0) == env.evaluate(1) == Fraction(1, 2)

    def test_matches_pointwise(self):
        env = centered_envelope(F1)
        for i in range(100):
            x = Fraction(i - 50, 17)
            assert env.evaluate(x) == centered_max(F1, x).value

    def test_constant_single_piece(self):
        env = centered_envelope(constant(5))
        assert len(env.pieces) == 1 and not env.boundaries
        assert env.evaluate(Fraction(12345, 7)) == 5

    def test_mirror(self):
        env, mirrored = centered_envelope(F2), centered_envelope(reflect(F2))
        for i in range(60):
            x = Fraction(i - 30, 7)
            assert mirrored.evaluate(-x) == env.evaluate(x)

    def test_irrational_boundaries(self):
        env = centered_envelope(IRRATIONAL)
        roots = [b.x for b in env.boundaries if not b.rational]
        assert len(roots) == 2 and all(isinstance(r, QuadraticRoot) for r in roots)
        xs = [b.x for b in env.boundaries]
        assert all(compare(a, b) < 0 for a, b in zip(xs, xs[1:]))
        for r in roots:
            lo, hi = r.isolating_interval(20)
            assert lo < hi
            a, b, c = r.coefficients
            assert (a * lo * lo + b * lo + c) * (a * hi * hi + b * hi + c) < 0
            # the envelope is continuous across a crossing
            bd = next(b for b in env.boundaries if b.x == r)
            assert sign_diff(bd.left, bd.point) == 0 and sign_diff(bd.point, bd.right) == 0

    def test_json(self):
        obj = centered_envelope(IRRATIONAL).to_json_obj()
        assert {"pieces", "boundaries"} <= set(obj)
        kinds = [b["x"]["kind"] for b in obj["boundaries"] if isinstance(b["x"], dict)]
        assert kinds.count("quadratic") == 2


class TestVariationEnclosure:
    def test_indicator(self):
        enc = variation_enclosure(centered_envelope(F1), Fraction(1, 100))
        assert (enc.lo, enc.hi) == (2, 2)

    def test_constant(self):
        enc = variation_enclosure(centered_envelope(constant(3)), Fraction(1, 100))
        assert (enc.lo, enc.hi) == (0, 0)

    def test_two_bumps(self):
        eps = Fraction(1, 1000)
        enc = variation_enclosure(centered_envelope(F2), eps)
        assert enc.hi - enc.lo <= eps
        pts = [Fraction(i, 20) for i in range(-100, 160)]
        assert enc.lo >= grid_lower_bound(F2, pts)
        assert enc.lo == Fraction(10, 3)

    def test_irrational_width(self):
        env = centered_envelope(IRRATIONAL)
        for eps in (Fraction(1, 10), Fraction(1, 10**9)):
            enc = variation_enclosure(env, eps)
            assert 0 < enc.hi - enc.lo <= eps
        pts = [Fraction(i, 64) for i in range(-640, 640)]
        assert grid_lower_bound(IRRATIONAL, pts) <= enc.hi

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            variation_enclosure(centered_envelope(F1), 0)


class TestGridLowerBound:
    def test_examples(self):
        pts = [-2, 0, Fraction(1, 2), 1, 3]
        # M values 1/6, 1/2, 1, 1/2, 1/6
        assert grid_lower_bound(F1, pts) == Fraction(5, 3)
        assert grid_lower_bound(F1, [7]) == 0
        assert grid_lower_bound(F1, [3, 1, -2, Fraction(1, 2), 0]) == Fraction(5, 3)


class TestAlgebraic:
    def test_surd_sign(self):
        assert Surd(Fraction(-1), Fraction(1), Fraction(2)).sign() == 1
        assert Surd(Fraction(-3, 2), Fraction(1), Fraction(2)).sign() == -1
        assert Surd(Fraction(-2), Fraction(1), Fraction(4)).sign() == 0

    def test_rational_between(self):
        r = QuadraticRoot(Fraction(0), Fraction(-2), 1)  # sqrt 2
        x = rational_between(Fraction(1), r)
        assert 1 < x and compare(r, x) > 0
        y = rational_between(r, None)
        assert compare(r, y) < 0
        assert rational_between(None, None) == 0


class TestProperties:
    @given(step_functions(), st.lists(rationals(), min_size=1, max_size=12))
    def test_pointwise_agreement(self, f, xs):
        env = centered_envelope(f)
        for x in xs:
            assert env.evaluate(x) == centered_max(f, x).value

    @given(step_functions(max_pieces=4), st.lists(rationals(), min_size=1, max_size=6))
    def test_noncentered_agreement(self, f, xs):
        env = noncentered_envelope(f)
        for x in xs:
            assert env.evaluate(x) == noncentered_max(f, x).value

    @given(step_functions(), st.lists(rationals(), max_size=20))
    def test_lower_bound_below_enclosure(self, f, pts):
        eps = Fraction(1, 10**4)
        enc = variation_enclosure(centered_envelope(f), eps)
        assert enc.lo <= enc.hi and enc.hi - enc.lo <= eps
        assert grid_lower_bound(f, pts) <= enc.hi

    @given(step_functions())
    def test_continuity_and_semicontinuity(self, f):
        env = centered_envelope(f)
        bps = set(absolute(f).breakpoints)
        for b in env.boundaries:
            if not (b.rational and b.x in bps):
                assert sign_diff(b.left, b.point) == 0 and sign_diff(b.point, b.right) == 0
            hi = b.left if sign_diff(b.left, b.right) >= 0 else b.right
            assert sign_diff(b.point, hi) <= 0

    @given(step_functions())
    def test_noncentered_bound(self, f):
        enc = variation_enclosure(noncentered_envelope(f), Fraction(1, 10**6))
        assert enc.hi <= variation(absolute(f))
