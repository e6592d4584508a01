"""Rank-1 lattice rules: nodes, dual lattice and the classical figures of merit.

All searches are exhaustive over the box ``||k||_max <= N``.  That box is
always large enough: ``(N, 0, ..., 0)`` is a dual vector, so the shortest
dual vector has euclidean length at most ``N`` and the smallest ``r(k)`` is
at most ``N``.  An index with some ``|k_i| > N`` has both quantities above
``N`` and can never be a minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .points import PointSet
from .weights import r_weight

LARGE_N = 10**4
LARGE_S = 4


@dataclass(frozen=True)
class LatticeRuleSpec:
    """Generator ``a`` modulo ``N`` with every ``a_i`` coprime to ``N``."""

    a: tuple[int, ...]
    N: int

    def __post_init__(self):
        a = tuple(int(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if len(a) < 2:
            raise ValueError(f"a lattice rule needs dimension >= 2, got {len(a)}")
        for i, v in enumerate(a):
            if math.gcd(v, self.N) != 1:
                raise ValueError(f"a[{i}] = {v} is not coprime to N = {self.N}")

    @property
    def s(self) -> int:
        return len(self.a)


def glp_nodes(spec: LatticeRuleSpec) -> PointSet:
    """Points ``(n a mod N) / N`` for ``n = 0..N-1``, stored exactly."""
    n = np.arange(spec.N, dtype=np.int64)[:, None]
    a = np.array([v % spec.N for v in spec.a], dtype=np.int64)[None, :]
    if spec.N < 2**31:
        num = (n * a) % spec.N
    else:
        num = np.array([[(i * v) % spec.N for v in spec.a] for i in range(spec.N)], dtype=np.int64)
    return PointSet.from_integers(num, spec.N)


def is_dual(k, spec: LatticeRuleSpec) -> bool:
    """``k . a == 0 (mod N)`` in exact integer arithmetic."""
    k = [int(v) for v in k]
    if len(k) != spec.s:
        raise ValueError(f"index has dimension {len(k)}, rule has {spec.s}")
    return sum(x * y for x, y in zip(k, spec.a)) % spec.N == 0


def _dual_blocks(spec: LatticeRuleSpec, K: int):
    """Nonzero dual vectors with ``||k||_max <= K``, grouped by first coordinate."""
    axis = np.arange(-K, K + 1, dtype=np.int64)
    N = spec.N
    a = np.array([v % N for v in spec.a], dtype=np.int64)
    rest = np.stack(np.meshgrid(*([axis] * (spec.s - 1)), indexing="ij"), axis=-1)
    rest = rest.reshape(-1, spec.s - 1)
    rest_dot = (rest * a[1:]).sum(axis=1) % N
    for first in axis:
        sel = (rest_dot + first * a[0]) % N == 0
        if not sel.any():
            continue
        k = np.concatenate([np.full((int(sel.sum()), 1), first, dtype=np.int64), rest[sel]], axis=1)
        if first == 0:
            k = k[np.abs(k).max(axis=1) > 0]
        if len(k):
            yield k


def _check_size(spec: LatticeRuleSpec, allow_large: bool):
    if not allow_large and (spec.s >= LARGE_S or spec.N > LARGE_N):
        raise ValueError(
            f"exhaustive search over |k_i| <= {spec.N} in dimension {spec.s} is large; "
            "pass allow_large=True to run it anyway"
        )


def _minimize(spec: LatticeRuleSpec, key, allow_large: bool):
    _check_size(spec, allow_large)
    best, arg = None, None
    for k in _dual_blocks(spec, spec.N):
        vals = key(k)
        i = int(np.argmin(vals))
        # blocks arrive in lexicographic order, so strict < keeps the first minimizer
        if best is None or vals[i] < best:
            best, arg = vals[i], tuple(int(v) for v in k[i])
    return best, arg


def shortest_dual_vector(spec: LatticeRuleSpec, *, allow_large: bool = False):
    """``(squared euclidean length, k)`` of the lexicographically first shortest dual vector."""
    best, arg = _minimize(spec, lambda k: (k * k).sum(axis=1), allow_large)
    return int(best), arg


def sigma_lattice(spec: LatticeRuleSpec, *, allow_large: bool = False) -> float:
    """Reciprocal euclidean length of the shortest nonzero dual vector."""
    sq, _ = shortest_dual_vector(spec, allow_large=allow_large)
    return 1.0 / math.sqrt(sq)


def min_r_dual_vector(spec: LatticeRuleSpec, *, allow_large: bool = False):
    """``(r(k), k)`` minimizing ``r(k) = prod max(1, |k_i|)`` over nonzero dual vectors."""
    best, arg = _minimize(spec, lambda k: np.maximum(1, np.abs(k)).prod(axis=1), allow_large)
    return int(best), arg


def babenko_zaremba(spec: LatticeRuleSpec, *, allow_large: bool = False) -> float:
    """``1 / min r(k)`` over nonzero dual vectors."""
    r, _ = min_r_dual_vector(spec, allow_large=allow_large)
    return 1.0 / r


def p_alpha(spec: LatticeRuleSpec, alpha: float, K: int | None = None) -> tuple[float, float]:
    """Truncated ``sum r(k)^-alpha`` over nonzero dual ``k`` with a tail bound.

    Parameters
    ----------
    K : int, optional
        Box half-width ``||k||_max <= K``; defaults to ``N``.

    Returns
    -------
    value, tail : float
        The exact truncated sum and an upper bound for the omitted part.
        The bound sums over every index outside the box, dual or not.
    """
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    K = spec.N if K is None else int(K)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    terms = []
    for k in _dual_blocks(spec, K):
        terms.extend((np.maximum(1, np.abs(k)).prod(axis=1).astype(float) ** -alpha).tolist())
    tail = r_weight(spec.s).tail_power_sum(K, alpha, ("signed",) * spec.s)
    return math.fsum(terms), tail


@dataclass
class SloanKachoyanReport:
    spec: LatticeRuleSpec
    K: int
    checked: int
    max_deviation: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def sloan_kachoyan_check(spec: LatticeRuleSpec, K: int, tol: float = 1e-10) -> SloanKachoyanReport:
    """Check ``S_N(e_k) = [k is dual]`` on the lattice nodes for ``||k||_max <= K``."""
    from .measures import weyl_sums
    from .padic import HybridSystemConfig

    system = HybridSystemConfig.trigonometric(spec.s)
    pts = glp_nodes(spec)
    axis = np.arange(-K, K + 1, dtype=np.int64)
    idx = np.stack(np.meshgrid(*([axis] * spec.s), indexing="ij"), axis=-1).reshape(-1, spec.s)
    S = weyl_sums(system, pts, idx)
    a = np.array([v % spec.N for v in spec.a], dtype=np.int64)
    dual = (idx % spec.N * a).sum(axis=1) % spec.N == 0
    dev = np.abs(S - dual.astype(float))
    bad = np.flatnonzero(dev > tol)
    violations = [(tuple(int(v) for v in idx[i]), complex(S[i])) for i in bad]
    return SloanKachoyanReport(spec, K, len(idx), float(dev.max()), violations)
