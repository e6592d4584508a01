import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from equilens.padic import (
    TAIL_MAX,
    BadicInteger,
    HybridSystemConfig,
    badic_function,
    character,
    hybrid_eval,
    monna_map,
    monna_pseudoinverse,
    radical_inverse,
    regular_digits,
    trig,
    walsh,
)
from equilens.points import PointSet


def test_monna_map_examples():
    assert monna_map(BadicInteger.from_int(3, 2)) == Fraction(3, 4)
    assert monna_map(BadicInteger.from_int(0, 5)) == 0
    assert monna_map(BadicInteger.from_int(123, 10)) == Fraction(321, 1000)


def test_minus_one_maps_to_zero():
    minus_one = BadicInteger(3, (), TAIL_MAX)
    assert minus_one.to_int() == -1
    assert monna_map(minus_one) == 0
    assert BadicInteger.from_int(-1, 3, 4).head == (2, 2, 2, 2)


def test_regular_digits_terminating_form():
    assert regular_digits(Fraction(1, 2), 2, 4) == (1, 0, 0, 0)
    assert regular_digits(0.5, 2, 4) == (1, 0, 0, 0)
    assert regular_digits(Fraction(1, 3), 3, 3) == (1, 0, 0)
    # 0.1 in base 10 stored as a float snaps back to its terminating form
    assert regular_digits(0.1, 10, 3) == (1, 0, 0)


def test_pseudoinverse_precision_and_range():
    z = monna_pseudoinverse(Fraction(5, 8), 2, 3)
    assert z.head == (1, 0, 1)
    with pytest.raises(ValueError):
        monna_pseudoinverse(1, 2)


@given(st.integers(0, 3**8 - 1), st.sampled_from([2, 3, 10]))
def test_pseudoinverse_inverts_on_integers(n, b):
    n %= b**8
    x = radical_inverse(n, b)
    assert monna_pseudoinverse(x, b, 8).to_int() == n


@given(st.fractions(min_value=0, max_value=Fraction(999, 1000)), st.sampled_from([2, 3, 10]))
def test_monna_of_pseudoinverse_is_identity_on_badic_rationals(x, b):
    # exact on b-adic rationals, which have finite regular expansions
    den = b**6
    y = Fraction(int(x * den), den)
    assert monna_map(monna_pseudoinverse(y, b, 6)) == y


def test_character_examples():
    z = BadicInteger.from_int(1, 2, 4)
    assert character(1, z) == -1
    assert character(0, z) == 1
    with pytest.raises(ValueError):
        character(4, BadicInteger(2, (1,)))


def test_badic_and_walsh_values():
    assert badic_function(2, 2, 0.75) == -1j
    assert walsh(3, 2, 0.25) == -1
    assert walsh(1, 3, Fraction(1, 3)) == pytest.approx(cmath.exp(2j * cmath.pi / 3))
    assert trig(1, Fraction(1, 4)) == 1j


def test_walsh_and_badic_agree_on_single_digit_indices():
    for k in range(1, 5):
        for x in np.linspace(0, 0.99, 17):
            assert walsh(k, 5, float(x)) == pytest.approx(badic_function(k, 5, float(x)))


def test_hybrid_example():
    cfg = HybridSystemConfig(s1=1, s3=1, walsh_bases=(2,))
    assert cfg.describe() == "w2,t"
    assert hybrid_eval((3, 1), cfg, (Fraction(1, 2), Fraction(1, 2))) == pytest.approx(1)


def test_coordinate_assignment_and_tags():
    cfg = HybridSystemConfig.from_tags("t,w2,g3")
    assert cfg.describe() == "t,w2,g3"
    assert cfg.signature == ("nonneg", "nonneg", "signed")
    with pytest.raises(ValueError):
        HybridSystemConfig.from_tags("q2")


def test_batched_matches_scalar(rng):
    cfg = HybridSystemConfig.from_tags("w2,g3,t")
    pts = PointSet(rng.random((9, 3)))
    idx = np.array([[a, b, c] for a in range(4) for b in range(10) for c in range(-2, 3)])
    batched = cfg.evaluate(idx, pts)
    for r, k in enumerate(idx):
        for n in range(pts.N):
            assert batched[r, n] == pytest.approx(hybrid_eval(tuple(k), cfg, tuple(pts.values[n])), abs=1e-12)


def test_negative_digit_index_rejected():
    with pytest.raises(ValueError):
        HybridSystemConfig.walsh([2]).check_index((-1,))


def test_exact_pseudoinverse_periodic():
    from equilens.padic import exact_pseudoinverse

    z = exact_pseudoinverse(Fraction(1, 3), 2)
    assert z.head == () and z.cycle == (0, 1)
    assert monna_map(z) == Fraction(1, 3)
    z = exact_pseudoinverse(Fraction(5, 6), 10)
    assert z.head == (8,) and z.cycle == (3,)
    assert exact_pseudoinverse(Fraction(3, 8), 2).cycle == ()
    with pytest.raises(ValueError):
        exact_pseudoinverse(Fraction(1, 3), 2).to_int()
    with pytest.raises(ValueError):
        BadicInteger(2, (1,), "b_minus_1", (0, 1))


@given(st.fractions(min_value=0, max_value=Fraction(999, 1000), max_denominator=5000), st.sampled_from([2, 3, 10]))
def test_exact_pseudoinverse_round_trip(x, b):
    from equilens.padic import exact_pseudoinverse

    assert monna_map(exact_pseudoinverse(x, b)) == x
