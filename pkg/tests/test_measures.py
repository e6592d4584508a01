import json
import math
from fractions import Fraction

import numpy as np
import pytest

from equilens.errors import CapabilityError, ResourceLimitError
from equilens.lattice import LatticeRuleSpec, glp_nodes
from equilens.measures import diaphony, etk_bound, iter_shell, spectral_test, weyl_sum
from equilens.padic import HybridSystemConfig, trig
from equilens.sequences import Halton, Kronecker
from equilens.weights import WeightSpec, digit_weight, euclidean_weight, hybrid_weight, r_weight

T1 = HybridSystemConfig.trigonometric(1)
T2 = HybridSystemConfig.trigonometric(2)


def grid(N):
    return [[Fraction(n, N)] for n in range(N)]


def test_weyl_sum_examples():
    pts = grid(4)
    assert weyl_sum(lambda x: 1, pts, 4) == 1
    assert abs(weyl_sum(lambda x: trig(1, x[0]), pts, 4)) < 1e-15
    assert weyl_sum(lambda x: trig(4, x[0]), pts, 4) == 1
    with pytest.raises(ValueError):
        weyl_sum(lambda x: 1, pts, 0)
    with pytest.raises(ValueError):
        weyl_sum(lambda x: 1, pts, 5)


def test_shell_enumeration_partitions_the_box():
    seen = []
    for lo, hi in [(0, 1), (1, 2), (2, 4)]:
        for chunk in iter_shell(("nonneg", "signed"), lo, hi):
            seen.extend(map(tuple, chunk))
    box = {(a, b) for a in range(5) for b in range(-4, 5)} - {(0, 0)}
    assert len(seen) == len(set(seen)) == len(box)
    assert set(seen) == box


def test_spectral_origin_is_one():
    r = spectral_test([[0.0, 0.0]] * 3, 3, T2, r_weight(2))
    assert r.value == 1.0


@pytest.mark.parametrize("N", [1, 3, 7, 16])
def test_spectral_equidistant_grid(N):
    w = r_weight(1)
    r = spectral_test(grid(N), N, T1, w)
    assert r.value == pytest.approx(1 / N, abs=1e-12)
    assert abs(r.argmax_index[0]) == N


def test_spectral_lattice_euclidean():
    spec = LatticeRuleSpec((1, 2), 5)
    r = spectral_test(glp_nodes(spec), 5, T2, euclidean_weight(2))
    assert r.value == pytest.approx(5**-0.5, abs=1e-12)


def _brute_force(points, N, weight, s):
    # independent route: every index with |k_i| <= N, sums through numpy exp
    ax = np.arange(-N, N + 1)
    k = np.stack(np.meshgrid(*([ax] * s), indexing="ij"), -1).reshape(-1, s)
    k = k[np.abs(k).max(axis=1) > 0]
    x = np.asarray(points.values)
    S = np.abs(np.exp(2j * np.pi * (k @ x.T)).mean(axis=1))
    return float((weight.value(k) * S).max())


@pytest.mark.parametrize("a,N", [((1, 3), 8), ((1, 5), 13), ((1, 7, 11), 17), ((1, 9), 31)])
def test_spectral_matches_exhaustive_search(a, N):
    spec = LatticeRuleSpec(a, N)
    pts = glp_nodes(spec)
    s = len(a)
    for w in (r_weight(s), euclidean_weight(s)):
        got = spectral_test(pts, N, HybridSystemConfig.trigonometric(s), w).value
        assert got == pytest.approx(_brute_force(pts, N, w, s) / w.normalizer_for(("signed",) * s), abs=1e-12)


def test_spectral_termination_is_stable():
    seq = Kronecker(["sqrt2-1", "sqrt3-1"])
    first = spectral_test(seq, 100, T2, r_weight(2))
    again = spectral_test(seq, 100, T2, r_weight(2), min_K=2 * first.shell_bound_used)
    assert again.value == pytest.approx(first.value, abs=1e-12)


def test_van_der_corput_spectral_decreases():
    sys = HybridSystemConfig.badic([2])
    vals = [spectral_test(Halton([2]), N, sys, digit_weight([2])).value for N in (16, 64, 256, 1024)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_spectral_budget_reports_bracket():
    with pytest.raises(ResourceLimitError) as info:
        spectral_test(Kronecker(["sqrt2-1", "sqrt3-1"]), 512, T2, r_weight(2), max_K=4)
    lo, hi = info.value.bracket
    exact = spectral_test(Kronecker(["sqrt2-1", "sqrt3-1"]), 512, T2, r_weight(2)).value
    assert lo <= exact <= hi


def test_spectral_needs_tail_bound():
    w = WeightSpec("bare", lambda k: np.ones(len(k)), normalizer=1.0)
    with pytest.raises(CapabilityError):
        spectral_test(grid(4), 4, T1, w)


def test_etk_bound():
    spec = LatticeRuleSpec((1, 2), 5)
    pts = glp_nodes(spec)
    w = euclidean_weight(2)
    exact = spectral_test(pts, 5, T2, w)
    assert etk_bound(pts, 5, T2, w, 1) == pytest.approx(1 / math.sqrt(2))
    assert etk_bound(pts, 5, T2, w, exact.shell_bound_used) == pytest.approx(exact.value)
    for K in range(1, 10):
        assert etk_bound(pts, 5, T2, w, K) >= exact.value - 1e-15


def test_diaphony_single_point_is_one():
    for method in ("kernel", "shells"):
        d = diaphony([[0.0]], 1, T1, r_weight(1), method=method, rel_tol=1e-2)
        assert d.value == pytest.approx(1.0, abs=max(d.tail_error_bound, 1e-12))


def test_diaphony_two_points_half():
    d = diaphony(grid(2), 2, T1, r_weight(1), method="kernel")
    assert d.value == pytest.approx(0.5, abs=1e-12)
    sh = diaphony(grid(2), 2, T1, r_weight(1), method="shells", rel_tol=1e-3)
    assert abs(sh.value - 0.5) <= sh.tail_error_bound


@pytest.mark.parametrize(
    "tags,seq,N",
    [("w2,w2", Halton([2, 3]), 12), ("g3", Halton([3]), 10), ("w2,g3", Halton([2, 3]), 9), ("t", Halton([5]), 7)],
)
def test_kernel_and_shell_routes_agree(tags, seq, N):
    sys = HybridSystemConfig.from_tags(tags)
    w = hybrid_weight(sys)
    k = diaphony(seq, N, sys, w, method="kernel")
    try:
        sh = diaphony(seq, N, sys, w, method="shells", rel_tol=0.05, max_K=512)
        lo, hi = sh.value, sh.value + sh.tail_error_bound
    except ResourceLimitError as exc:
        lo, hi = exc.bracket
    assert lo - 1e-12 <= k.value <= hi + 1e-12


def test_diaphony_truncation_is_honest():
    sys = HybridSystemConfig.walsh([2])
    pts = Halton([3]).points(20)
    loose = diaphony(pts, 20, sys, digit_weight([2]), method="shells", rel_tol=1e-1)
    tight = diaphony(pts, 20, sys, digit_weight([2]), method="shells", rel_tol=1e-2)
    assert abs(loose.value - tight.value) <= loose.tail_error_bound


def test_diaphony_needs_tail_sum():
    w = euclidean_weight(1)
    with pytest.raises(CapabilityError):
        diaphony(grid(3), 3, T1, w)


def test_thread_count_does_not_change_results():
    seq = Kronecker(["golden", "sqrt2-1"])
    ref = spectral_test(seq, 300, T2, r_weight(2), threads=1).to_dict()
    for t in (2, 8):
        assert spectral_test(seq, 300, T2, r_weight(2), threads=t).to_dict() == ref


def test_result_json_fields():
    r = spectral_test(grid(4), 4, T1, r_weight(1))
    d = json.loads(json.dumps(r.to_dict()))
    assert {"measure", "value", "argmax_index", "K", "tail_bound", "N", "system", "weight"} <= set(d)
    assert d["schema"] == "1"
