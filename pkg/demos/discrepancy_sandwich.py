"""Bracketing the extreme discrepancy with b-adic boxes.

Counting points in every b-adic box at resolution g gives a lower bound for
the discrepancy over all boxes.  Adding eps_b(g) gives an upper bound, and
refining g narrows the bracket.  The brute-force oracle is cheap for a small
point set, so the script prints all three.
"""

from equilens import Halton
from equilens.discrepancy import (
    choose_resolution,
    discrepancy_spectral_test,
    discrete_discrepancy,
    epsilon_bounds,
    exact_extreme_discrepancy_small,
)

N, BASES = 20, (2, 3)
pts = Halton(BASES).points(N)
true = exact_extreme_discrepancy_small(pts, N)
print(f"halton{BASES}, N = {N}: extreme discrepancy {true:.6f}\n")

print(f"{'g':<8}{'lower':>10}{'upper':>10}{'width':>10}")
for g in [(1, 1), (2, 1), (3, 2), (4, 3), (6, 4)]:
    lo = discrete_discrepancy(pts, N, BASES, g)
    eps = float(epsilon_bounds(BASES, g).eps)
    print(f"{str(g):<8}{lo:>10.6f}{lo + eps:>10.6f}{eps:>10.6f}")

# the same number comes out of a spectral test over box indicators
print("\naccuracy-driven resolution")
for eps in (0.5, 0.25, 0.1):
    res = choose_resolution(eps, BASES, 2)
    approx = discrepancy_spectral_test(pts, N, BASES, res.g)
    print(f"  eps {eps:<5} g = {str(res.g):<8} spectral value {approx:.6f}  error {abs(approx - true):.6f}")
