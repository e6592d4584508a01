import itertools
from fractions import Fraction

import numpy as np
import pytest

from equilens.discrepancy import (
    IndicatorSystem,
    choose_resolution,
    discrepancy_spectral_test,
    discrete_discrepancy,
    discrete_star_discrepancy,
    epsilon_bounds,
    exact_extreme_discrepancy_small,
    exact_star_discrepancy_1d,
    interval_from_index,
    local_discrepancy,
    rho_g,
    rho_g_weight,
    v_b,
)
from equilens.errors import ResourceLimitError
from equilens.measures import spectral_test
from equilens.sequences import Halton

F = Fraction


def grid(N):
    return [[F(n, N)] for n in range(N)]


def test_interval_from_index():
    J = interval_from_index([0], [2], 1, 2)
    assert (J.lower, J.upper) == ((0,), (1,))
    J = interval_from_index([1], [3], 2, 2)
    assert (J.lower, J.upper) == ((F(1, 2),), (F(3, 4),))
    J = interval_from_index([2], [1], 2, 2)
    assert (J.lower, J.upper) == ((F(1, 4),), (F(1, 2),))
    assert interval_from_index([1], [2], 2, 2) is None
    with pytest.raises(ValueError):
        interval_from_index([4], [1], 2, 2)


def test_local_discrepancy():
    assert local_discrepancy([[0.3, 0.6]], 1, [(0, 1), (0, 1)]) == 0
    assert local_discrepancy([[0.0]], 1, [(0, F(1, 2))]) == 0.5
    assert local_discrepancy(grid(5), 5, [(0, F(2, 5))]) == 0


def test_discrete_examples():
    assert discrete_discrepancy([[0.0]], 1, 2, 1) == 0.5
    assert discrete_star_discrepancy([[0.0]], 1, 2, 1) == 0.5
    assert discrete_discrepancy(grid(4), 4, 2, 2) == 0


def _brute_discrete(pts, N, b, g, star):
    # independent route: enumerate every grid box and count with Fractions
    B = [b**gi for gi in g]
    best = F(0)
    ranges = [[(0, d) for d in range(1, n + 1)] if star else [(a, d) for a in range(n) for d in range(a + 1, n + 1)] for n in B]
    for box in itertools.product(*ranges):
        lo = [F(a, n) for (a, _), n in zip(box, B)]
        hi = [F(d, n) for (_, d), n in zip(box, B)]
        cnt = sum(all(l <= x < h for l, x, h in zip(lo, p, hi)) for p in pts)
        vol = np.prod([h - l for l, h in zip(lo, hi)])
        best = max(best, abs(F(cnt, N) - vol))
    return best


@pytest.mark.parametrize("star", [False, True])
def test_discrete_matches_brute_force(rng, star):
    for _ in range(10):
        N = int(rng.integers(1, 9))
        pts = [[F(int(v), 16) for v in rng.integers(0, 16, 2)] for _ in range(N)]
        g = tuple(int(v) for v in rng.integers(1, 3, 2))
        got = discrete_discrepancy(pts, N, 2, g, star=star, exact=True)
        assert got == _brute_discrete(pts, N, 2, g, star)


def test_star_below_extreme(rng):
    for _ in range(20):
        P = rng.random((int(rng.integers(1, 20)), 2))
        assert discrete_star_discrepancy(P, len(P), (2, 3), (3, 2)) <= discrete_discrepancy(P, len(P), (2, 3), (3, 2)) <= 1


def test_refinement_is_monotone(rng):
    P = rng.random((17, 2))
    vals = [discrete_discrepancy(P, 17, 2, g, exact=True) for g in range(1, 7)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    exact = exact_extreme_discrepancy_small(P, 17, exact=True)
    for g, v in zip(range(1, 7), vals):
        assert v <= exact <= v + epsilon_bounds(2, g).eps


def test_cell_cap():
    with pytest.raises(ResourceLimitError):
        discrete_discrepancy([[0.1, 0.2]], 1, 2, (12, 12), max_cells=1 << 20)


def test_epsilon_bounds():
    e = epsilon_bounds((2, 2), (3, 3))
    assert e.eps == F(7, 16) and e.eps_star == F(15, 64)
    assert e.eps <= e.eps_upper == F(1, 2)
    assert epsilon_bounds(2, 1).eps_star == F(1, 2)


def test_star_1d_oracle():
    assert exact_star_discrepancy_1d(grid(4), 4) == 0.25
    assert exact_star_discrepancy_1d([[0.0], [0.5]], 2) == 0.5
    assert exact_star_discrepancy_1d([[0.5]], 1) == 0.5
    with pytest.raises(ValueError):
        exact_star_discrepancy_1d([[0.1, 0.2]], 1)


def _star_by_critical_points(xs):
    # sup over [0, t) approached at t = x_i (open) and t -> x_i+ (closed) and t = 1
    N = len(xs)
    best = F(0)
    for t in set(xs) | {F(1)}:
        below = sum(x < t for x in xs)
        upto = sum(x <= t for x in xs)
        best = max(best, t - F(below, N), F(upto, N) - t if t < 1 else best)
    return best


def test_star_1d_matches_critical_points(rng):
    for _ in range(50):
        xs = [F(int(v), 97) for v in rng.integers(0, 97, int(rng.integers(1, 15)))]
        assert exact_star_discrepancy_1d([[x] for x in xs], len(xs), exact=True) == _star_by_critical_points(xs)


def _extreme_brute(pts):
    N, s = len(pts), len(pts[0])
    cands = [sorted({F(0), F(1)} | {p[i] for p in pts}) for i in range(s)]
    best = F(0)
    for faces in itertools.product(*[list(itertools.combinations_with_replacement(c, 2)) for c in cands]):
        vol = np.prod([v - u for u, v in faces])
        closed = sum(all(u <= x <= v for (u, v), x in zip(faces, p)) for p in pts)
        opened = sum(all(u < x < v for (u, v), x in zip(faces, p)) for p in pts)
        best = max(best, F(closed, N) - vol, vol - F(opened, N))
    return best


def test_extreme_oracle_examples():
    assert exact_extreme_discrepancy_small([[0.0]], 1) == 1.0
    assert exact_extreme_discrepancy_small(grid(4), 4) == 0.25


def test_extreme_oracle_matches_brute_force(rng):
    for _ in range(12):
        N = int(rng.integers(1, 6))
        s = int(rng.integers(1, 3))
        pts = [[F(int(v), 8) for v in rng.integers(0, 8, s)] for _ in range(N)]
        assert exact_extreme_discrepancy_small(pts, N, exact=True) == _extreme_brute(pts)


def test_extreme_oracle_bounds(rng):
    P = rng.random((10, 1))
    assert exact_extreme_discrepancy_small(P, 10) >= exact_star_discrepancy_1d(P, 10)
    with pytest.raises(ResourceLimitError):
        exact_extreme_discrepancy_small(rng.random((65, 1)), 65)


def test_v_b_and_rho_g():
    assert (v_b(0, 2), v_b(4, 2), v_b(9, 3), v_b(8, 3)) == (0, 3, 3, 2)
    assert rho_g([1], [2], 1, 2) == 1
    assert rho_g([2], [1], 1, 2) == F(1, 8)
    with pytest.raises(ValueError):
        rho_g([0], [0], 1, 2)


def test_rho_g_off_grid_cap():
    g, b = (2, 1), (2, 3)
    cap = max(F(1, bi ** (1 + gi)) for bi, gi in zip(b, g))
    for a0, a1, d0, d1 in itertools.product(range(9), range(9), range(1, 10), range(1, 10)):
        a, d = (a0, a1), (d0, d1)
        in_grid = a0 < 4 and a1 < 3 and d0 <= 4 and d1 <= 3
        if not in_grid:
            assert rho_g(a, d, g, b) <= cap


def test_rho_g_level_sets_are_finite():
    # rho_g > 1/64 forces digit lengths v(a) + v(d) < 6 outside the grid
    bound = F(1, 64)
    big = [(a, d) for a in range(200) for d in range(1, 200) if rho_g([a], [d], 2, 2) > bound]
    assert max(max(a, d) for a, d in big) < 32


def test_discrepancy_spectral_examples():
    pts = grid(4)
    assert discrete_discrepancy(pts, 4, 2, 2) == 0
    assert discrepancy_spectral_test(pts, 4, 2, 2) <= 1 / 8
    P = Halton([2, 3]).points(11)
    d = discrete_discrepancy(P, 11, 2, (2, 2))
    assert d >= 1 / 8
    assert discrepancy_spectral_test(P, 11, 2, (2, 2)) == d


@pytest.mark.parametrize("star", [False, True])
def test_discrepancy_spectral_matches_generic_spectral_test(star):
    for pts in (grid(4), grid(8), [[F(1, 4)], [F(3, 4)]], [[F(1, 3)], [F(5, 7)], [F(1, 9)]]):
        N = len(pts)
        generic = spectral_test(pts, N, IndicatorSystem(2, 2, star), rho_g_weight(2, 2, star), max_K=1 << 12)
        assert generic.value == pytest.approx(discrepancy_spectral_test(pts, N, 2, 2, star), abs=1e-15)


def test_choose_resolution():
    assert choose_resolution(0.5, 2, 1).g == (4,)
    assert choose_resolution(1, (2, 3), 2).g == (4, 2)
    prev = None
    for eps in (1, 0.5, 0.3, 0.1, 0.01):
        g = choose_resolution(eps, (2, 5), 2).g
        if prev:
            assert all(x >= y for x, y in zip(g, prev))
        prev = g
