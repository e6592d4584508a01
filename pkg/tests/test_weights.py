import itertools
import math

import numpy as np
import pytest

from equilens.errors import CapabilityError
from equilens.padic import HybridSystemConfig
from equilens.weights import builtin_weights, digit_weight, euclidean_weight, hybrid_weight, r_weight


def test_weight_values():
    assert r_weight(3).value(np.array([[2, 0, -3]]))[0] == pytest.approx(1 / 6)
    assert euclidean_weight(2).value(np.array([[3, 4]]))[0] == pytest.approx(1 / 5)
    assert digit_weight([2, 3]).value(np.array([[4, 2]]))[0] == pytest.approx(2**-3 * 3**-1)


def test_catalog():
    assert set(builtin_weights()) >= {"r", "euclidean", "digit", "hybrid"}


def test_tail_sup_bounds_every_outside_index():
    for w, sig in [(r_weight(2), ("signed",) * 2), (euclidean_weight(2), ("signed",) * 2)]:
        for K in (1, 2, 3, 5, 8):
            k = np.array(list(itertools.product(range(-20, 21), repeat=2)))
            norm = np.abs(k).max(axis=1) if w.norm == "max" else np.sqrt((k * k).sum(axis=1))
            outside = k[norm > K]
            assert w.value(outside).max() <= w.tail_sup(K) + 1e-15
    assert euclidean_weight(2).tail_sup(1) == pytest.approx(1 / math.sqrt(2))
    assert r_weight(2).tail_sup(1) == pytest.approx(0.5)


def test_r_tail_power_sum_one_dimension():
    # sum over |k| > 10 of k^-2, from the full series minus the first ten terms
    expected = math.pi**2 / 3 - 2 * math.fsum(k**-2 for k in range(1, 11))
    assert r_weight(1).tail_power_sum(10, 2, ("signed",)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.1903327, abs=1e-7)


def test_zinterhof_normalizer():
    for s in (1, 2, 3):
        got = r_weight(s).power_normalizer(2, ("signed",) * s)
        assert got == pytest.approx((1 + math.pi**2 / 3) ** s - 1, rel=1e-12)


@pytest.mark.parametrize("s", [1, 2])
def test_r_tail_matches_box_sums(s):
    w = r_weight(s)
    sig = ("signed",) * s
    full = w.power_normalizer(2, sig)
    for K in (1, 4, 9):
        ax = np.arange(-K, K + 1)
        box = np.array(list(itertools.product(ax, repeat=s)))
        box = box[np.abs(box).max(axis=1) > 0]
        inside = math.fsum((w.value(box) ** 2).tolist())
        assert inside + w.tail_power_sum(K, 2, sig) == pytest.approx(full, rel=1e-12)


def test_digit_tail_matches_direct_sum():
    w = digit_weight([3])
    sig = ("nonneg",)
    M = 3**9 - 1
    direct = math.fsum((w.value(np.arange(5, M + 1)[:, None]) ** 2).tolist())
    assert w.tail_power_sum(4, 2, sig) - w.tail_power_sum(M, 2, sig) == pytest.approx(direct, rel=1e-12)


def test_digit_tail_two_dimensions():
    w = digit_weight([2, 3])
    sig = ("nonneg", "nonneg")
    full = w.power_normalizer(2.5, sig)
    K = 6
    box = np.array(list(itertools.product(range(K + 1), repeat=2)))[1:]
    inside = math.fsum((w.value(box) ** 2.5).tolist())
    assert inside + w.tail_power_sum(K, 2.5, sig) == pytest.approx(full, rel=1e-12)


def test_normalizers():
    assert r_weight(2).normalizer_for(("signed", "signed")) == 1.0
    assert digit_weight([2, 3]).normalizer_for(("nonneg", "nonneg")) == pytest.approx(0.5)
    assert digit_weight([2]).normalizer_for(("positive",)) == pytest.approx(0.5)


def test_digit_weight_refuses_signed_blocks():
    with pytest.raises(CapabilityError):
        digit_weight([2]).power_normalizer(2, ("signed",))


def test_hybrid_weight_factors():
    w = hybrid_weight(HybridSystemConfig.from_tags("w2,t"))
    assert w.describe()["factors"] == ["digit2", "r"]
    assert w.value(np.array([[3, -4]]))[0] == pytest.approx(0.25 * 0.25)
