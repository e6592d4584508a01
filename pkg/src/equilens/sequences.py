"""Point sequences: Halton, Kronecker, good lattice points, hybrids and files.

Every sequence is random access: ``point(n)`` is a pure function of ``n``
and ``points(N)`` returns the first ``N`` points as a :class:`PointSet`.
Halton and lattice points are exact rationals.  Kronecker points
``{n alpha}`` are computed from a 128-bit fixed-point copy of ``alpha``
with exact integer products, so the only error is the final rounding to
a float.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .lattice import LatticeRuleSpec, glp_nodes
from .padic import radical_inverse
from .points import PointSet

FIXED_BITS = 128
_ONE = 1 << FIXED_BITS


class Sequence:
    """Base class; subclasses define ``s``, ``point`` and ``points``."""

    s: int

    def point(self, n: int) -> tuple:
        raise NotImplementedError

    def points(self, N: int) -> PointSet:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()!r})"


class Halton(Sequence):
    """Radical inverses of ``n`` in the given bases, one base per coordinate."""

    def __init__(self, bases):
        self.bases = tuple(int(b) for b in bases)
        if not self.bases:
            raise ValueError("Halton needs at least one base")
        if any(b < 2 for b in self.bases):
            raise ValueError(f"bases must be >= 2, got {self.bases}")
        self.s = len(self.bases)

    def point(self, n: int) -> tuple[Fraction, ...]:
        if n < 0:
            raise ValueError(f"n must be nonnegative, got {n}")
        return tuple(radical_inverse(n, b) for b in self.bases)

    def points(self, N: int) -> PointSet:
        if N < 1:
            raise ValueError(f"N must be positive, got {N}")
        cols = []
        for b in self.bases:
            depth, top = 0, N - 1
            while top:
                top //= b
                depth += 1
            den = b ** max(depth, 1)
            if den < 2**62:
                n = np.arange(N, dtype=np.int64)
                num = np.zeros(N, dtype=np.int64)
            else:
                n = np.arange(N).astype(object)
                num = np.zeros(N, dtype=object)
            scale = den
            for _ in range(max(depth, 1)):
                scale //= b
                num += (n % b) * scale
                n //= b
            cols.append((num, den))
        return PointSet.from_columns(cols)

    def describe(self) -> str:
        return "halton:" + ",".join(map(str, self.bases))


def _isqrt_fixed(m: int) -> int:
    # floor(sqrt(m) * 2^128)
    return math.isqrt(m << (2 * FIXED_BITS))


def parse_alpha(token) -> tuple[int, str]:
    """``(round(frac(alpha) * 2^128), label)`` for a preset name or a literal.

    Accepted forms: ``sqrt2`` (any ``sqrtM``), ``sqrtM-J``, ``golden``,
    decimals such as ``0.4142`` and rationals ``p/q``.
    """
    if isinstance(token, (int, float, Fraction)) and not isinstance(token, bool):
        val = Fraction(token)
        return round((val - math.floor(val)) * _ONE) % _ONE, str(token)
    text = str(token).strip().lower()
    m = re.fullmatch(r"sqrt(\d+)(?:-(\d+))?", text)
    if m:
        root = _isqrt_fixed(int(m.group(1)))
        if root * root == int(m.group(1)) << (2 * FIXED_BITS):
            raise ValueError(f"sqrt({m.group(1)}) is an integer; Kronecker needs an irrational")
        return root % _ONE, text
    if text in ("golden", "phi"):
        # (1 + sqrt5)/2 has fractional part (sqrt5 - 1)/2
        return ((_isqrt_fixed(5) - _ONE) // 2) % _ONE, "golden"
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot read Kronecker parameter {token!r}") from None
    return round((val - math.floor(val)) * _ONE) % _ONE, text


class Kronecker(Sequence):
    """``{n alpha_i}`` with ``alpha`` given as presets or literals."""

    def __init__(self, alphas):
        parsed = [parse_alpha(a) for a in alphas]
        if not parsed:
            raise ValueError("Kronecker needs at least one alpha")
        self.fixed = tuple(p[0] for p in parsed)
        self.labels = tuple(p[1] for p in parsed)
        self.s = len(parsed)

    def point(self, n: int) -> tuple[float, ...]:
        if n < 0:
            raise ValueError(f"n must be nonnegative, got {n}")
        return tuple(((n * A) % _ONE) / _ONE for A in self.fixed)

    def points(self, N: int) -> PointSet:
        if N < 1:
            raise ValueError(f"N must be positive, got {N}")
        n = np.arange(N).astype(object)
        cols = []
        for A in self.fixed:
            frac = (n * A) % _ONE
            col = np.array([v / _ONE for v in frac], dtype=float)
            # a value just below 1 can round up to 1.0
            col[col >= 1.0] = np.nextafter(1.0, 0.0)
            cols.append(col)
        return PointSet.from_columns(cols)

    def describe(self) -> str:
        return "kron:" + ",".join(self.labels)


class GoodLatticePoint(Sequence):
    """The ``N`` nodes ``(n a mod N) / N`` of a rank-1 lattice rule."""

    def __init__(self, a, N: int):
        self.spec = LatticeRuleSpec(tuple(a), int(N))
        self.s = self.spec.s
        self._nodes = None

    @property
    def N(self) -> int:
        return self.spec.N

    def point(self, n: int) -> tuple[Fraction, ...]:
        if not 0 <= n < self.spec.N:
            raise IndexError(f"lattice rule has {self.spec.N} nodes; index {n} out of range")
        return tuple(Fraction((n * a) % self.spec.N, self.spec.N) for a in self.spec.a)

    def points(self, N: int | None = None) -> PointSet:
        N = self.spec.N if N is None else N
        if not 1 <= N <= self.spec.N:
            raise IndexError(f"lattice rule has {self.spec.N} nodes; {N} requested")
        if self._nodes is None:
            self._nodes = glp_nodes(self.spec)
        return self._nodes.head(N)

    def describe(self) -> str:
        return "glp:" + ",".join(map(str, self.spec.a)) + f"@{self.spec.N}"


class Hybrid(Sequence):
    """Coordinate-wise concatenation of component sequences, in order."""

    def __init__(self, parts):
        self.parts = tuple(parts)
        if len(self.parts) < 1:
            raise ValueError("a hybrid needs at least one component")
        self.s = sum(p.s for p in self.parts)

    def point(self, n: int) -> tuple:
        return tuple(c for p in self.parts for c in p.point(n))

    def points(self, N: int) -> PointSet:
        return PointSet.hstack(p.points(N) for p in self.parts)

    def describe(self) -> str:
        return "hybrid:" + "+".join(f"({p.describe()})" for p in self.parts)


class PointFile(Sequence):
    """Points read from a text file; see :func:`load_points`."""

    def __init__(self, path):
        self.path = str(path)
        self._pts = load_points(path)
        self.s = self._pts.s

    @property
    def N(self) -> int:
        return self._pts.N

    def point(self, n: int) -> tuple:
        if not 0 <= n < self._pts.N:
            raise IndexError(f"file holds {self._pts.N} points; index {n} out of range")
        return self._pts.point(n)

    def points(self, N: int) -> PointSet:
        return PointSet.coerce(self._pts, N)

    def describe(self) -> str:
        return f"file:{self.path}"


def point_at(seq: Sequence, n: int) -> tuple:
    """The ``n``-th point of ``seq`` (0-based)."""
    return seq.point(n)


def _parse_token(tok: str, lineno: int, col: int):
    try:
        if "/" in tok:
            p, q = tok.split("/")
            return Fraction(int(p), int(q))
        if re.fullmatch(r"[+-]?\d+", tok):
            return Fraction(int(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"line {lineno}: cannot parse coordinate {col} {tok!r}") from None


def parse_points(text: str) -> PointSet:
    """Parse the point-file format from a string.

    One point per line, whitespace-separated coordinates, each a decimal
    or a rational ``p/q`` in ``[0, 1)``.  Integers and ``p/q`` are kept
    exact; a column with any decimal entry is stored as floats.  Blank lines and lines starting
    with ``#`` are skipped.
    """
    rows, dim = [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = [_parse_token(t, lineno, c) for c, t in enumerate(stripped.split())]
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise ValueError(f"line {lineno}: expected {dim} coordinates, found {len(row)}")
        for c, v in enumerate(row):
            if not 0 <= v < 1:
                raise ValueError(f"line {lineno}: coordinate {c} = {v} outside [0,1)")
        rows.append(row)
    if not rows:
        raise ValueError("no points found")
    return PointSet(rows)


def load_points(path, format: str = "text") -> PointSet:
    """Read a point file (UTF-8 text format, see :func:`parse_points`)."""
    if format != "text":
        raise ValueError(f"unsupported point file format {format!r}")
    return parse_points(Path(path).read_text(encoding="utf-8"))


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def parse_sequence(text: str) -> Sequence:
    """Build a sequence from the one-line description language.

    ``halton:2,3``, ``kron:sqrt2-1,golden``, ``glp:1,5@8``,
    ``hybrid:(halton:2)+(kron:sqrt2)`` and ``file:PATH``.
    """
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"sequence {text!r} lacks a 'kind:' prefix")
    kind = kind.lower()
    if kind == "file":
        return PointFile(body)
    if kind == "hybrid":
        parts = []
        for p in _split_top(body, "+"):
            p = p.strip()
            if not (p.startswith("(") and p.endswith(")")):
                raise ValueError(f"hybrid components must be parenthesized, got {p!r}")
            parts.append(parse_sequence(p[1:-1]))
        return Hybrid(parts)
    items = [t.strip() for t in body.split(",") if t.strip()]
    if kind == "halton":
        try:
            return Halton([int(t) for t in items])
        except ValueError as exc:
            raise ValueError(f"bad Halton bases in {text!r}: {exc}") from None
    if kind in ("kron", "kronecker"):
        return Kronecker(items)
    if kind == "glp":
        gen, at, N = body.partition("@")
        if not at:
            raise ValueError(f"glp needs '@N', got {text!r}")
        try:
            return GoodLatticePoint([int(t) for t in gen.split(",")], int(N))
        except ValueError as exc:
            raise ValueError(f"bad lattice rule {text!r}: {exc}") from None
    raise ValueError(f"unknown sequence kind {kind!r}")
