"""Finite point sets on the unit cube with an exact-rational path.

A column whose entries are all rationals (``Fraction`` or ``int``) is kept
as integer numerators over one common denominator, so digit extraction,
cell counting and trigonometric phases on it are exact.  Any other column
is held as float64 and treated as the exact dyadic rational it stores.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

# denominators at or above this go through Python integers instead of int64
_INT64_SAFE = 2**62


def _is_rational(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


class PointSet:
    """``N`` points in ``[0,1)^s`` with per-column exact storage when possible.

    Parameters
    ----------
    coords : sequence of sequences, or 2-d array
        Row ``n`` is the point ``x_n``.  Rationals keep their exact value.
    """

    def __init__(self, coords):
        if isinstance(coords, np.ndarray) and coords.dtype != object:
            arr = np.asarray(coords, dtype=float)
            if arr.ndim == 1:
                arr = arr[:, None]
            rows = None
        else:
            rows = [tuple(r) if np.ndim(r) else (r,) for r in coords]
            arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
            if arr.size == 0:
                arr = arr.reshape(len(rows), 0 if not rows else len(rows[0]))
        if arr.ndim != 2:
            raise ValueError("points must form a 2-d array (N, s)")
        if arr.shape[0] and arr.shape[1] == 0:
            raise ValueError("points need at least one coordinate")
        self.values = arr
        self.values.setflags(write=False)
        self.N, self.s = arr.shape
        self._exact: list[tuple[np.ndarray, int] | None] = [None] * self.s
        if rows is not None:
            if any(len(r) != self.s for r in rows):
                raise ValueError("all points must have the same dimension")
            for i in range(self.s):
                col = [r[i] for r in rows]
                if col and all(_is_rational(v) for v in col):
                    fr = [Fraction(v) for v in col]
                    den = math.lcm(*(f.denominator for f in fr))
                    num = [f.numerator * (den // f.denominator) for f in fr]
                    dtype = np.int64 if den < _INT64_SAFE else object
                    self._exact[i] = (np.array(num, dtype=dtype), den)
        for i in range(self.s):
            ex = self._exact[i]
            if ex is not None:
                num, den = ex
                bad = [n for n, v in enumerate(num) if not 0 <= v < den]
            else:
                col = arr[:, i]
                bad = np.flatnonzero(~((col >= 0.0) & (col < 1.0))).tolist()
            if bad:
                raise ValueError(
                    f"point {bad[0]} coordinate {i} = {self.coordinate(bad[0], i)} outside [0,1)"
                )
        self._digit_cache: dict = {}

    def __len__(self):
        return self.N

    def __repr__(self):
        kinds = "".join("q" if e is not None else "f" for e in self._exact)
        return f"PointSet(N={self.N}, s={self.s}, columns={kinds})"

    @classmethod
    def coerce(cls, obj, N: int | None = None) -> PointSet:
        """Build the first ``N`` points from a point set, sequence spec or array."""
        if hasattr(obj, "points") and callable(obj.points):
            if N is None:
                raise ValueError("N is required when sampling a sequence")
            return obj.points(N)
        pts = obj if isinstance(obj, PointSet) else cls(obj)
        if N is None:
            return pts
        if N < 1:
            raise ValueError(f"N must be positive, got {N}")
        if N > pts.N:
            raise ValueError(f"point source has only {pts.N} points, {N} requested")
        return pts.head(N)

    @classmethod
    def from_integers(cls, num, den: int) -> PointSet:
        """Exact points ``num / den`` from an ``(N, s)`` integer array."""
        num = np.asarray(num, dtype=np.int64)
        if num.ndim != 2:
            raise ValueError("numerators must form a 2-d array (N, s)")
        if ((num < 0) | (num >= den)).any():
            raise ValueError(f"numerators must lie in [0, {den})")
        out = cls.__new__(cls)
        out.values = num / den
        out.values.setflags(write=False)
        out.N, out.s = num.shape
        out._exact = [(num[:, i].copy(), int(den)) for i in range(out.s)]
        out._digit_cache = {}
        return out

    @classmethod
    def from_columns(cls, columns) -> PointSet:
        """Build from per-column data: ``(numerators, den)`` pairs or float arrays."""
        cols = list(columns)
        if not cols:
            raise ValueError("points need at least one coordinate")
        values, exact = [], []
        for c in cols:
            if isinstance(c, tuple):
                num, den = c
                num = np.asarray(num)
                if num.dtype != object and den >= _INT64_SAFE:
                    num = num.astype(object)
                if ((num < 0) | (num >= den)).any():
                    raise ValueError(f"numerators must lie in [0, {den})")
                values.append(np.array([int(v) / den for v in num]) if num.dtype == object else num / den)
                exact.append((num, int(den)))
            else:
                col = np.asarray(c, dtype=float)
                if not ((col >= 0.0) & (col < 1.0)).all():
                    raise ValueError("float column outside [0,1)")
                values.append(col)
                exact.append(None)
        out = cls.__new__(cls)
        out.values = np.column_stack(values)
        out.values.setflags(write=False)
        out.N, out.s = out.values.shape
        out._exact = exact
        out._digit_cache = {}
        return out

    @classmethod
    def hstack(cls, parts) -> PointSet:
        """Concatenate point sets with equal ``N`` coordinate-wise."""
        parts = list(parts)
        if len({p.N for p in parts}) != 1:
            raise ValueError("point sets to concatenate must have the same N")
        cols = []
        for p in parts:
            for i in range(p.s):
                ex = p.exact_column(i)
                cols.append(ex if ex is not None else p.values[:, i])
        return cls.from_columns(cols)

    def head(self, n: int) -> PointSet:
        if n == self.N:
            return self
        out = PointSet.__new__(PointSet)
        out.values = self.values[:n]
        out.N, out.s = n, self.s
        out._exact = [None if e is None else (e[0][:n], e[1]) for e in self._exact]
        out._digit_cache = {}
        return out

    def is_exact(self, i: int) -> bool:
        return self._exact[i] is not None

    def exact_column(self, i: int):
        """``(numerators, denominator)`` for an exact column, else ``None``."""
        return self._exact[i]

    def coordinate(self, n: int, i: int):
        """Exact value of coordinate ``i`` of point ``n`` (Fraction for exact columns)."""
        ex = self._exact[i]
        if ex is not None:
            return Fraction(int(ex[0][n]), ex[1])
        return float(self.values[n, i])

    def fractions(self, i: int) -> list[Fraction]:
        """Column ``i`` as exact Fractions (floats converted without rounding)."""
        ex = self._exact[i]
        if ex is not None:
            num, den = ex
            return [Fraction(int(v), den) for v in num]
        return [Fraction(float(v)) for v in self.values[:, i]]

    def point(self, n: int) -> tuple:
        return tuple(self.coordinate(n, i) for i in range(self.s))

    def cells(self, i: int, base: int, g: int) -> np.ndarray:
        """``floor(x * base**g)`` for column ``i``, exactly (boundary points go right)."""
        B = base**g
        ex = self._exact[i]
        if ex is not None:
            num, den = ex
            if den * B < _INT64_SAFE and num.dtype != object:
                return (num * B) // den
            return np.array([int(v) * B // den for v in num], dtype=np.int64)
        col = self.values[:, i]
        out = np.floor(col * B).astype(np.int64)
        # float products can round across an integer; settle those exactly
        near = np.flatnonzero(np.abs(col * B - np.rint(col * B)) < 1e-6)
        for n in near:
            out[n] = math.floor(Fraction(float(col[n])) * B)
        return out

    def digits(self, i: int, base: int, depth: int) -> np.ndarray:
        """First ``depth`` regular base-``base`` digits of column ``i``, shape (N, depth)."""
        key = (i, base)
        cached = self._digit_cache.get(key)
        if cached is not None and cached.shape[1] >= depth:
            return cached[:, :depth]
        from .padic import regular_digits

        ex = self._exact[i]
        if ex is not None:
            num, den = ex
            out = np.zeros((self.N, depth), dtype=np.int64)
            r = num.astype(object) if den * base >= _INT64_SAFE else num.copy()
            for j in range(depth):
                r = r * base
                out[:, j] = (r // den).astype(np.int64)
                r = r % den
        else:
            out = np.array(
                [regular_digits(float(v), base, depth) for v in self.values[:, i]],
                dtype=np.int64,
            ).reshape(self.N, depth)
        self._digit_cache[key] = out
        return out
