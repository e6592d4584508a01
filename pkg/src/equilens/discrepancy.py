"""b-adic intervals, discrete discrepancies and exact small-case oracles.

The discrete discrepancy at resolution ``g`` is the largest local
discrepancy over boxes whose faces lie on the grid ``b_i^-g_i Z``.  It is
computed by exact integer counting over the ``prod b_i^g_i`` grid cells
with an ``s``-dimensional prefix-sum table, and it brackets the true
discrepancy from below within ``1 - prod(1 - 2 b_i^-g_i)``.

The same quantity is the grid branch of a spectral test: the system of
centred interval indicators indexed by ``(a, d)`` with the weight
``rho_g`` equals the discrete discrepancy up to a tail of order
``max b_i^(-1-g_i)``.  Both branches are evaluated exactly here.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import ResourceLimitError
from .padic import NONNEG, POSITIVE, digit_length, radical_inverse
from .points import PointSet
from .weights import WeightSpec

DEFAULT_MAX_CELLS = 1 << 24
DEFAULT_MAX_BOXES = 50_000_000
ORACLE_MAX_S = 3
ORACLE_MAX_N = 64
ORACLE_MAX_BOXES = 200_000_000


def v_b(k: int, b: int) -> int:
    """Base-``b`` digit length of ``k >= 0`` (0 for ``k = 0``)."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return digit_length(k, b)


def _bases(b, s: int) -> tuple[int, ...]:
    if isinstance(b, (int, np.integer)):
        out = (int(b),) * s
    else:
        out = tuple(int(v) for v in b)
    if len(out) != s:
        raise ValueError(f"got {len(out)} bases for dimension {s}")
    if any(v < 2 for v in out):
        raise ValueError(f"bases must be >= 2, got {out}")
    return out


@dataclass(frozen=True)
class ResolutionVector:
    """Per-coordinate resolution exponents ``g`` and bases ``b``."""

    g: tuple[int, ...]
    bases: tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(v) for v in self.g)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "bases", _bases(self.bases, len(g)))
        if any(v < 0 for v in g):
            raise ValueError(f"resolution exponents must be >= 0, got {g}")

    @classmethod
    def of(cls, b, g) -> ResolutionVector:
        g = (int(g),) if isinstance(g, (int, np.integer)) else tuple(g)
        return cls(g, _bases(b, len(g)))

    @property
    def s(self) -> int:
        return len(self.g)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b**g for b, g in zip(self.bases, self.g))

    @property
    def delta(self) -> Fraction:
        """``max b_i^-g_i``."""
        return max(Fraction(1, n) for n in self.sizes)


@dataclass(frozen=True)
class BadicInterval:
    """The box ``prod [lower_i, upper_i)`` with b-adic rational endpoints."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    @property
    def volume(self) -> Fraction:
        return math.prod((u - l for l, u in zip(self.lower, self.upper)), start=Fraction(1))

    def contains(self, x) -> bool:
        return all(l <= xi < u for l, xi, u in zip(self.lower, x, self.upper))


def _endpoint(k: int, b: int, g: int) -> Fraction:
    # b^g is the index of the right endpoint 1 at resolution g
    return Fraction(1) if k == b**g else radical_inverse(k, b)


def interval_from_index(a, d, g, b) -> BadicInterval | None:
    """Interval ``prod [phi(a_i), phi(d_i))`` for a grid index pair.

    Returns ``None`` when the pair is not admissible, i.e. when
    ``phi(a_i) >= phi(d_i)`` in some coordinate.

    Raises
    ------
    ValueError
        If ``0 <= a_i < b_i^g_i`` or ``1 <= d_i <= b_i^g_i`` fails.
    """
    res = ResolutionVector.of(b, g)
    a, d = tuple(int(v) for v in a), tuple(int(v) for v in d)
    if len(a) != res.s or len(d) != res.s:
        raise ValueError("a, d and g must have the same length")
    lo, hi = [], []
    for ai, di, bi, gi, n in zip(a, d, res.bases, res.g, res.sizes):
        if not (0 <= ai < n and 1 <= di <= n):
            raise ValueError(f"index pair ({ai}, {di}) outside the grid of size {n}")
        lo.append(radical_inverse(ai, bi))
        hi.append(_endpoint(di, bi, gi))
    if any(l >= u for l, u in zip(lo, hi)):
        return None
    return BadicInterval(tuple(lo), tuple(hi))


def local_discrepancy(points, N: int, J, *, exact: bool = False):
    """``#{n < N: x_n in J} / N - volume(J)`` with exact membership tests.

    ``J`` is a ``BadicInterval`` or a sequence of ``(lower, upper)`` pairs
    describing a half-open box.
    """
    pts = PointSet.coerce(points, N)
    if not isinstance(J, BadicInterval):
        pairs = [(Fraction(l), Fraction(u)) for l, u in J]
        J = BadicInterval(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
    if len(J.lower) != pts.s:
        raise ValueError(f"box has dimension {len(J.lower)}, points have {pts.s}")
    inside = np.ones(pts.N, dtype=bool)
    for i, (l, u) in enumerate(zip(J.lower, J.upper)):
        col = pts.fractions(i) if pts.is_exact(i) else pts.values[:, i].tolist()
        inside &= np.array([l <= x < u for x in col], dtype=bool)
    val = Fraction(int(inside.sum()), N) - J.volume
    return val if exact else float(val)


# --- discrete discrepancy ------------------------------------------------


def _cell_counts(pts: PointSet, res: ResolutionVector, max_cells: int) -> np.ndarray:
    total = math.prod(res.sizes)
    if total > max_cells:
        raise ResourceLimitError(
            f"{total} grid cells exceed the cap of {max_cells}; use a smaller resolution"
        )
    cells = [pts.cells(i, b, g) for i, (b, g) in enumerate(zip(res.bases, res.g))]
    flat = np.ravel_multi_index(cells, res.sizes)
    counts = np.bincount(flat, minlength=total).reshape(res.sizes)
    return counts


def _prefix_sums(counts: np.ndarray) -> np.ndarray:
    P = np.zeros(tuple(n + 1 for n in counts.shape), dtype=np.int64)
    P[tuple(slice(1, None) for _ in counts.shape)] = counts
    for ax in range(counts.ndim):
        np.cumsum(P, axis=ax, out=P)
    return P


def _box_counts(P: np.ndarray, starts, ends) -> np.ndarray:
    """Counts of all boxes ``[starts_i[j], ends_i[j])`` on the prefix table, as an outer grid."""
    D = P
    for ax, (lo, hi) in enumerate(zip(starts, ends)):
        D = D.take(hi, axis=ax) - D.take(lo, axis=ax)
    return D


def _first_axis_chunks(n0: int, rest: int, budget: int = 1 << 22):
    step = max(1, budget // max(rest, 1))
    for i in range(0, n0, step):
        yield slice(i, min(n0, i + step))


def discrete_discrepancy(
    points,
    N: int,
    b,
    g,
    *,
    star: bool = False,
    exact: bool = False,
    max_cells: int = DEFAULT_MAX_CELLS,
    max_boxes: int = DEFAULT_MAX_BOXES,
):
    """Largest ``|local discrepancy|`` over the b-adic boxes of resolution ``g``.

    Parameters
    ----------
    b : int or sequence of int
        Base, or one base per coordinate.
    g : int or sequence of int
        Resolution exponents, each ``>= 1``.
    star : bool
        Restrict to boxes anchored at the origin.
    exact : bool
        Return a ``Fraction`` instead of a float.
    """
    pts = PointSet.coerce(points, N)
    g = (int(g),) * pts.s if isinstance(g, (int, np.integer)) else tuple(g)
    res = ResolutionVector(g, _bases(b, pts.s))
    if any(v < 1 for v in res.g):
        raise ValueError(f"resolution exponents must be >= 1, got {res.g}")
    P = _prefix_sums(_cell_counts(pts, res, max_cells))
    starts, ends = [], []
    for n in res.sizes:
        if star:
            lo, hi = np.zeros(n, dtype=np.int64), np.arange(1, n + 1)
        else:
            lo, hi = np.triu_indices(n + 1, k=1)
        starts.append(lo.astype(np.int64))
        ends.append(hi.astype(np.int64))
    nboxes = math.prod(len(v) for v in starts)
    if nboxes > max_boxes:
        raise ResourceLimitError(f"{nboxes} boxes exceed the cap of {max_boxes}; use a smaller resolution")
    total = math.prod(res.sizes)
    # |count/N - len/total| scaled by N * total
    lengths = [(h - l) for l, h in zip(starts, ends)]
    rest_vol = np.ones((), dtype=np.int64)
    for ln in lengths[1:]:
        rest_vol = np.multiply.outer(rest_vol, ln)
    best = 0
    rest = nboxes // len(starts[0])
    for sl in _first_axis_chunks(len(starts[0]), rest):
        counts = _box_counts(P, [starts[0][sl]] + starts[1:], [ends[0][sl]] + ends[1:])
        vol = np.multiply.outer(lengths[0][sl], rest_vol)
        dev = np.abs(counts * total - N * vol)
        best = max(best, int(dev.max()))
    val = Fraction(best, N * total)
    return val if exact else float(val)


def discrete_star_discrepancy(points, N: int, b, g, **kw):
    """Star version of :func:`discrete_discrepancy`."""
    return discrete_discrepancy(points, N, b, g, star=True, **kw)


class EpsilonBounds(NamedTuple):
    eps: Fraction
    eps_star: Fraction
    eps_upper: Fraction
    eps_star_upper: Fraction


def epsilon_bounds(b, g) -> EpsilonBounds:
    """Discretization gaps for the extreme and star discrepancy at resolution ``g``.

    ``eps = 1 - prod(1 - 2 b_i^-g_i)`` and ``eps_star = 1 - prod(1 - b_i^-g_i)``,
    together with their simpler upper bounds ``2 s delta`` and
    ``s delta`` where ``delta = max b_i^-g_i``.
    """
    res = ResolutionVector.of(b, g)
    if any(v < 1 for v in res.g):
        raise ValueError(f"resolution exponents must be >= 1, got {res.g}")
    inv = [Fraction(1, n) for n in res.sizes]
    eps = 1 - math.prod((1 - 2 * q for q in inv), start=Fraction(1))
    eps_star = 1 - math.prod((1 - q for q in inv), start=Fraction(1))
    return EpsilonBounds(eps, eps_star, 2 * res.s * res.delta, res.s * res.delta)


# --- exact oracles -------------------------------------------------------


def exact_star_discrepancy_1d(points, N: int, *, exact: bool = False):
    """Star discrepancy in one dimension by the sorted-points closed form.

    ``1/(2N) + max_n |x_(n) - (2n - 1)/(2N)|`` with the points sorted
    increasingly and ``n`` counted from 1.
    """
    pts = PointSet.coerce(points, N)
    if pts.s != 1:
        raise ValueError(f"one-dimensional points required, got s = {pts.s}")
    xs = sorted(pts.fractions(0))
    dev = max(abs(x - Fraction(2 * n - 1, 2 * N)) for n, x in enumerate(xs, start=1))
    val = Fraction(1, 2 * N) + dev
    return val if exact else float(val)


def _oracle_axes(col: list[Fraction]):
    """Candidate faces for one coordinate.

    Returns ``(uniq, closed, open_)``: the sorted distinct coordinates and,
    for each side, arrays ``(lower value index, upper value index, rank
    start, rank end)`` over the extended value list ``[0] + uniq + [1]``.
    """
    uniq = sorted(set(col))
    m = len(uniq)
    vals = [Fraction(0)] + uniq + [Fraction(1)]
    # closed boxes [u, v] with u <= v among the point coordinates
    ju, jv = np.triu_indices(m)
    closed = (ju + 1, jv + 1, ju, jv + 1)
    # open boxes (u, v) with u in {0} + uniq and v in uniq + {1}, u < v
    lo_idx, hi_idx, rs, re = [], [], [], []
    for iu in range(0, m + 1):
        # an open face at 0 also excludes points sitting on 0
        start = iu if (iu > 0 or uniq[0] != 0) else 1
        for iv in range(iu + 1, m + 2):
            end = iv - 1  # ranks strictly below vals[iv]
            lo_idx.append(iu)
            hi_idx.append(iv)
            rs.append(start)
            re.append(max(end, start))
    open_ = tuple(np.array(v, dtype=np.int64) for v in (lo_idx, hi_idx, rs, re))
    return vals, closed, open_


def exact_extreme_discrepancy_small(points, N: int, *, exact: bool = False, max_boxes: int = ORACLE_MAX_BOXES):
    """Exact extreme discrepancy by enumerating all critical boxes.

    The supremum over half-open boxes is approached either by closed
    boxes whose faces pass through point coordinates (count too high) or
    by open boxes with faces at point coordinates, 0 or 1 (count too
    low).  Both families are enumerated on the rank grid with prefix
    sums; candidates within ``1e-9`` of the float maximum are then
    re-evaluated in exact rational arithmetic.
    """
    pts = PointSet.coerce(points, N)
    s = pts.s
    if s > ORACLE_MAX_S or N > ORACLE_MAX_N:
        raise ResourceLimitError(
            f"exact extreme discrepancy is limited to s <= {ORACLE_MAX_S}, N <= {ORACLE_MAX_N}"
        )
    cols = [pts.fractions(i) for i in range(s)]
    axes = [_oracle_axes(c) for c in cols]
    nboxes = sum(math.prod(len(ax[side][0]) for ax in axes) for side in (1, 2))
    if nboxes > max_boxes:
        raise ResourceLimitError(f"{nboxes} critical boxes exceed the cap of {max_boxes}")
    ranks = []
    for col, ax in zip(cols, axes):
        pos = {v: j for j, v in enumerate(ax[0][1:-1])}
        ranks.append(np.array([pos[x] for x in col], dtype=np.int64))
    shape = tuple(len(ax[0]) - 2 for ax in axes)
    counts = np.zeros(shape, dtype=np.int64)
    np.add.at(counts, tuple(ranks), 1)
    P = _prefix_sums(counts)
    fvals = [np.array([float(v) for v in ax[0]]) for ax in axes]

    best_f, cands = -1.0, []
    for side, sign in ((1, 1.0), (2, -1.0)):
        lo_i = [ax[side][0] for ax in axes]
        hi_i = [ax[side][1] for ax in axes]
        rs = [ax[side][2] for ax in axes]
        re = [ax[side][3] for ax in axes]
        lens = [fv[h] - fv[l] for fv, l, h in zip(fvals, lo_i, hi_i)]
        rest = math.prod(len(v) for v in rs[1:])
        for sl in _first_axis_chunks(len(rs[0]), rest):
            c = _box_counts(P, [rs[0][sl]] + rs[1:], [re[0][sl]] + re[1:])
            vol = lens[0][sl]
            for ln in lens[1:]:
                vol = np.multiply.outer(vol, ln)
            val = sign * (c / N - vol)
            m = float(val.max())
            if m > best_f + 1e-9:
                cands = [c_ for c_ in cands if c_[0] >= m - 1e-9]
            if m >= best_f - 1e-9:
                hit = np.argwhere(val >= max(m, best_f) - 1e-9)
                for h in hit:
                    cands.append((float(val[tuple(h)]), side, sl.start + int(h[0]), tuple(int(v) for v in h[1:]), int(c[tuple(h)])))
            best_f = max(best_f, m)
    best = Fraction(0)
    for _, side, j0, js, cnt in cands:
        jj = (j0,) + js
        vol = Fraction(1)
        for ax, j in zip(axes, jj):
            vals = ax[0]
            vol *= vals[int(ax[side][1][j])] - vals[int(ax[side][0][j])]
        v = Fraction(cnt, N) - vol
        best = max(best, v if side == 1 else -v)
    return best if exact else float(best)


# --- indicator system and the discrepancy spectral test ------------------


def _coordinate_resolution(a: int, d: int, b: int, g: int) -> int:
    # resolution at which the pair (a, d) names an interval: g itself when
    # the pair fits the grid, else the smallest grid containing both ends
    if a < b**g and 1 <= d <= b**g:
        return g
    return max(digit_length(a, b), digit_length(d - 1, b))


def _in_grid(a, d, res: ResolutionVector) -> bool:
    return all(ai < n and 1 <= di <= n for ai, di, n in zip(a, d, res.sizes))


def index_interval(a, d, res: ResolutionVector) -> BadicInterval | None:
    """Interval named by any index pair ``(a, d)``, ``None`` if not admissible."""
    lo, hi = [], []
    for ai, di, b, g in zip(a, d, res.bases, res.g):
        if di < 1 or ai < 0:
            raise ValueError(f"index pair ({ai}, {di}) outside the index set")
        gi = _coordinate_resolution(ai, di, b, g)
        lo.append(radical_inverse(ai, b))
        hi.append(_endpoint(di, b, gi))
    if any(l >= u for l, u in zip(lo, hi)):
        return None
    return BadicInterval(tuple(lo), tuple(hi))


def rho_g(a, d, g, b) -> Fraction:
    """Weight ``1`` on the resolution-``g`` grid, ``prod b_i^-(v(a_i) + v(d_i))`` elsewhere."""
    res = ResolutionVector.of(b, g)
    a, d = tuple(int(v) for v in a), tuple(int(v) for v in d)
    if any(v < 1 for v in d):
        raise ValueError(f"d must have positive entries, got {d}")
    if any(v < 0 for v in a):
        raise ValueError(f"a must have nonnegative entries, got {a}")
    if _in_grid(a, d, res):
        return Fraction(1)
    e = [Fraction(1, bi ** (digit_length(ai, bi) + digit_length(di, bi))) for ai, di, bi in zip(a, d, res.bases)]
    return math.prod(e, start=Fraction(1))


def _split(k, s: int, star: bool):
    k = [int(v) for v in k]
    if star:
        return (0,) * s, tuple(k)
    return tuple(k[:s]), tuple(k[s:])


class IndicatorSystem:
    """Centred interval indicators ``1_I - volume(I)`` indexed by ``(a, d)``.

    Index rows are ``(a_1..a_s, d_1..d_s)``, or ``(d_1..d_s)`` for the star
    version where every box is anchored at the origin.
    """

    def __init__(self, b, g, star: bool = False):
        g = (int(g),) if isinstance(g, (int, np.integer)) else tuple(g)
        self.res = ResolutionVector(g, _bases(b, len(g)))
        self.star = star

    @property
    def signature(self) -> tuple[str, ...]:
        s = self.res.s
        return (POSITIVE,) * s if self.star else (NONNEG,) * s + (POSITIVE,) * s

    def describe(self) -> str:
        kind = "star-indicator" if self.star else "indicator"
        return f"{kind}(b={list(self.res.bases)}, g={list(self.res.g)})"

    def interval(self, k) -> BadicInterval | None:
        a, d = _split(k, self.res.s, self.star)
        return index_interval(a, d, self.res)

    def evaluate(self, indices: np.ndarray, points: PointSet) -> np.ndarray:
        out = np.zeros((len(indices), points.N), dtype=complex)
        fr = [points.fractions(i) for i in range(points.s)]
        for r, k in enumerate(indices):
            J = self.interval(k)
            if J is None:
                continue
            inside = np.ones(points.N, dtype=bool)
            for i, (l, u) in enumerate(zip(J.lower, J.upper)):
                inside &= np.array([l <= x < u for x in fr[i]], dtype=bool)
            out[r] = inside - float(J.volume)
        return out


def rho_g_weight(b, g, star: bool = False) -> WeightSpec:
    """``rho_g`` as a weight on the indicator index set, with its max-norm tail bound."""
    system = IndicatorSystem(b, g, star)
    res = system.res
    s = res.s

    def value(k):
        out = np.empty(len(k))
        for r, row in enumerate(np.asarray(k)):
            a, d = _split(row, s, star)
            out[r] = float(rho_g(a, d, res.g, res.bases))
        return out

    def tail_sup(K):
        # an index of max norm > K lies off the grid once K >= max b^g, and
        # its large entry has digit length >= v(K+1); every other coordinate
        # carries d_j >= 1, hence a factor at most 1/b_j
        K = math.floor(K)
        if K < max(res.sizes):
            return 1.0
        return max(
            float(bi) ** -digit_length(K + 1, bi) * math.prod(1.0 / bj for j, bj in enumerate(res.bases) if j != i)
            for i, bi in enumerate(res.bases)
        )

    return WeightSpec(
        "rho_g", value, tail_sup, 1.0, params={"bases": list(res.bases), "g": list(res.g), "star": star}
    )


def _patterns(res: ResolutionVector, star: bool):
    """Digit-length patterns ``(va, vd)`` in order of decreasing weight."""
    s = res.s
    logb = [math.log(b) for b in res.bases]

    def weight_log(p):
        return -sum((va + vd) * lb for (va, vd), lb in zip(p, logb))

    start = tuple((0, 1) for _ in range(s))
    heap = [(-weight_log(start), start)]
    seen = {start}
    while heap:
        negw, p = heapq.heappop(heap)
        yield math.exp(-negw), p
        for i in range(s):
            steps = [(0, 1)] if star else [(1, 0), (0, 1)]
            for da, dd in steps:
                q = list(p)
                q[i] = (p[i][0] + da, p[i][1] + dd)
                q = tuple(q)
                if q not in seen:
                    seen.add(q)
                    heapq.heappush(heap, (-weight_log(q), q))


def _length_range(v: int, b: int) -> range:
    return range(0, 1) if v == 0 else range(b ** (v - 1), b**v)


def discrepancy_spectral_test(
    points,
    N: int,
    b,
    g,
    star: bool = False,
    *,
    exact: bool = False,
    max_indices: int = 2_000_000,
):
    """Spectral test of the centred indicator system under ``rho_g``.

    The value is the larger of two branches: the grid branch, equal to the
    discrete discrepancy at resolution ``g``, and the off-grid branch
    ``max rho_g(a, d) |S_N|`` whose weights never exceed
    ``max b_i^(-1-g_i)``.  The off-grid branch is only searched when it can
    matter, in order of decreasing weight until the weight drops to the
    running maximum.
    """
    pts = PointSet.coerce(points, N)
    g = (int(g),) * pts.s if isinstance(g, (int, np.integer)) else tuple(g)
    res = ResolutionVector(g, _bases(b, pts.s))
    best = discrete_discrepancy(pts, N, res.bases, res.g, star=star, exact=True)
    cap = max(Fraction(1, bi * n) for bi, n in zip(res.bases, res.sizes))
    if best < cap:
        fr = [pts.fractions(i) for i in range(pts.s)]
        visited = 0
        for w, pattern in _patterns(res, star):
            if w <= float(best) * (1 - 1e-12):
                break
            ranges = [(_length_range(va, bi), _length_range(vd, bi)) for (va, vd), bi in zip(pattern, res.bases)]
            weight = math.prod(
                (Fraction(1, bi ** (va + vd)) for (va, vd), bi in zip(pattern, res.bases)), start=Fraction(1)
            )
            if weight <= best:
                continue
            for combo in itertools.product(*[itertools.product(ra, rd) for ra, rd in ranges]):
                a = tuple(c[0] for c in combo)
                d = tuple(c[1] for c in combo)
                if _in_grid(a, d, res):
                    continue
                visited += 1
                if visited > max_indices:
                    raise ResourceLimitError(
                        "off-grid search exceeded its index budget",
                        bracket=(float(best), float(max(best, weight))),
                    )
                J = index_interval(a, d, res)
                if J is None:
                    continue
                cnt = sum(all(l <= fr[i][n] < u for i, (l, u) in enumerate(zip(J.lower, J.upper))) for n in range(N))
                val = weight * abs(Fraction(cnt, N) - J.volume)
                if val > best:
                    best = val
    return best if exact else float(best)


def choose_resolution(eps, b, s: int) -> ResolutionVector:
    """Smallest ``g`` with ``b_i^-g_i < eps / (4 s)`` in every coordinate."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    bases = _bases(b, s)
    target = eps / (4 * s)
    g = []
    for bi in bases:
        gi = 0
        while Fraction(1, bi**gi) >= target:
            gi += 1
        g.append(gi)
    return ResolutionVector(tuple(g), bases)
