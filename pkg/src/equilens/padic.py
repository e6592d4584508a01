"""b-adic integers, the Monna map, and the Walsh / b-adic / trigonometric systems.

Scalar functions here evaluate one index at one point with exact rational
phases; ``HybridSystemConfig.evaluate`` is the batched counterpart used by
the measures.  Both reduce every phase to an exact residue before a single
call to the complex exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

TAIL_ZERO = "zero"
TAIL_MAX = "b_minus_1"

NONNEG = "nonneg"
POSITIVE = "positive"
SIGNED = "signed"
SIGNATURES = (NONNEG, POSITIVE, SIGNED)

DEFAULT_PRECISION = 64

_QUARTER = (1 + 0j, 1j, -1 + 0j, -1j)


def unit_root(num: int, den: int) -> complex:
    """``e(num/den) = exp(2 pi i num/den)``; quarter turns are returned exactly."""
    r = num % den
    if (4 * r) % den == 0:
        return _QUARTER[4 * r // den]
    t = 2.0 * math.pi * (r / den)
    return complex(math.cos(t), math.sin(t))


def expi(phase: np.ndarray) -> np.ndarray:
    """Vectorised ``e(t)`` for phases in ``[0, 1)``, exact at quarter turns."""
    phase = np.asarray(phase, dtype=float)
    ang = 2.0 * np.pi * phase
    out = np.cos(ang) + 1j * np.sin(ang)
    q = phase * 4.0
    hit = q == np.floor(q)
    if hit.any():
        out[hit] = np.take(np.array(_QUARTER), q[hit].astype(np.int64) % 4)
    return out


def digit_length(k: int, base: int) -> int:
    """Number of base-``base`` digits of ``k >= 0``; zero for ``k = 0``."""
    if k < 0:
        raise ValueError(f"digit length needs k >= 0, got {k}")
    n = 0
    while k:
        k //= base
        n += 1
    return n


def int_digits(k: int, base: int, length: int | None = None) -> tuple[int, ...]:
    """Digits of ``k >= 0``, least significant first, optionally zero-padded."""
    out = []
    while k:
        k, d = divmod(k, base)
        out.append(d)
    if length is not None:
        if len(out) > length:
            raise ValueError(f"{k} needs more than {length} digits")
        out.extend([0] * (length - len(out)))
    return tuple(out)


@dataclass(frozen=True)
class BadicInteger:
    """Element of ``Z_b`` given by ``head`` digits and a constant ``tail``.

    All digits at positions ``>= len(head)`` equal ``0`` (``tail="zero"``)
    or ``b - 1`` (``tail="b_minus_1"``), so every rational integer has an
    exact representation; ``-1`` is ``BadicInteger(b, (), "b_minus_1")``.
    A nonempty ``cycle`` replaces the constant tail by a repeating block,
    which covers every rational element of ``Z_b``.  Results of
    ``monna_pseudoinverse`` are truncations with a zero tail.
    """

    base: int
    head: tuple[int, ...]
    tail: str = TAIL_ZERO
    cycle: tuple[int, ...] = ()

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.tail not in (TAIL_ZERO, TAIL_MAX):
            raise ValueError(f"tail must be {TAIL_ZERO!r} or {TAIL_MAX!r}, got {self.tail!r}")
        head = tuple(int(d) for d in self.head)
        for j, d in enumerate(head):
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} at position {j} outside 0..{self.base - 1}")
        object.__setattr__(self, "head", head)
        cycle = tuple(int(d) for d in self.cycle)
        if any(not 0 <= d < self.base for d in cycle):
            raise ValueError(f"cycle digits {cycle} outside 0..{self.base - 1}")
        if cycle and self.tail != TAIL_ZERO:
            raise ValueError("give either a constant tail or a cycle, not both")
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def from_int(cls, n: int, base: int, precision: int = DEFAULT_PRECISION) -> BadicInteger:
        """Exact representation of a rational integer with ``precision`` head digits.

        Nonnegative ``n`` must fit in ``precision`` digits; negative ``n``
        must satisfy ``n >= -base**precision``.
        """
        if n >= 0:
            if n >= base**precision:
                raise ValueError(f"{n} does not fit in {precision} base-{base} digits")
            return cls(base, int_digits(n, base, precision), TAIL_ZERO)
        if n < -(base**precision):
            raise ValueError(f"{n} does not fit in {precision} base-{base} digits")
        return cls(base, int_digits(n + base**precision, base, precision), TAIL_MAX)

    @property
    def precision(self) -> int:
        return len(self.head)

    def digit(self, j: int) -> int:
        if j < len(self.head):
            return self.head[j]
        if self.cycle:
            return self.cycle[(j - len(self.head)) % len(self.cycle)]
        return 0 if self.tail == TAIL_ZERO else self.base - 1

    def with_precision(self, precision: int) -> BadicInteger:
        """Same element with the head extended from the tail to ``precision`` digits."""
        if precision <= len(self.head):
            return self
        if self.cycle:
            raise ValueError("cannot extend the head of a periodic element")
        pad = (self.digit(len(self.head)),) * (precision - len(self.head))
        return BadicInteger(self.base, self.head + pad, self.tail)

    def to_int(self) -> int:
        if self.cycle:
            raise ValueError("periodic element is not a rational integer")
        value = sum(d * self.base**j for j, d in enumerate(self.head))
        if self.tail == TAIL_MAX:
            value -= self.base ** len(self.head)
        return value


def _check_unit(x) -> Fraction:
    if not 0 <= x < 1:
        raise ValueError(f"x = {x} is outside [0, 1)")
    return x


def monna_map(z: BadicInteger) -> Fraction:
    """``sum z_j b^(-j-1) (mod 1)``, exact.

    A ``b - 1`` tail after ``P`` head digits contributes ``b^(-P)``.
    """
    b, P = z.base, len(z.head)
    value = Fraction(_digits_to_int(z.head, b), b**P)
    if z.tail == TAIL_MAX:
        value += Fraction(1, b**P)
    if z.cycle:
        L = len(z.cycle)
        value += Fraction(_digits_to_int(z.cycle, b), (b**L - 1) * b**P)
    return value % 1


def _digits_to_int(digits, b: int) -> int:
    # most significant first: d_0 b^(L-1) + ... + d_(L-1)
    acc = 0
    for d in digits:
        acc = acc * b + d
    return acc


def radical_inverse(n: int, base: int) -> Fraction:
    """Monna map restricted to ``n >= 0``: digits of ``n`` mirrored about the point."""
    if n < 0:
        raise ValueError(f"radical inverse needs n >= 0, got {n}")
    num, den = 0, 1
    while n:
        n, d = divmod(n, base)
        num = num * base + d
        den *= base
    return Fraction(num, den)


def _float_to_regular_fraction(x: float, base: int) -> Fraction:
    """Snap a float to the nearest multiple of ``base^-D``, ``D`` its resolvable depth.

    A float cannot tell ``0.0111...`` from ``0.1`` once the run of ``b - 1``
    digits reaches its precision, so the value is rounded to the finest
    base-``base`` grid that is still no finer than one ulp.
    """
    if x == 0.0:
        return Fraction(0)
    exact = Fraction(x)
    ulp = Fraction(math.ulp(x))
    depth, step = 0, Fraction(1)
    while step / base >= ulp:
        step /= base
        depth += 1
    scale = base**depth
    r = round(exact * scale)
    if r >= scale:
        return exact
    return Fraction(r, scale)


def regular_digits(x, base: int, count: int) -> tuple[int, ...]:
    """First ``count`` digits of the regular base-``base`` expansion of ``x``.

    Rationals are expanded exactly, so base-``base`` rationals get their
    terminating form.  Floats are first snapped by
    ``_float_to_regular_fraction`` so trailing runs of ``b - 1`` produced by
    binary rounding collapse to the terminating form as well.
    """
    if isinstance(x, Rational):
        r = Fraction(x)
    else:
        r = _float_to_regular_fraction(float(x), base)
    _check_unit(r)
    num, den = r.numerator, r.denominator
    out = []
    for _ in range(count):
        num *= base
        d, num = divmod(num, den)
        out.append(d)
    return tuple(out)


def monna_pseudoinverse(x, base: int, precision: int = DEFAULT_PRECISION) -> BadicInteger:
    """Truncated ``phi_b^+(x)``: the first ``precision`` regular digits, zero tail."""
    if precision < 1:
        raise ValueError(f"precision must be >= 1, got {precision}")
    _check_unit(x)
    return BadicInteger(base, regular_digits(x, base, precision), TAIL_ZERO)


def exact_pseudoinverse(x, base: int) -> BadicInteger:
    """Untruncated ``phi_b^+(x)`` for rational ``x``: preperiod head plus repeating cycle.

    Long division of the regular expansion, stopping at the first repeated
    remainder.  Terminating expansions get a zero tail.
    """
    if not isinstance(x, Rational):
        raise TypeError("exact_pseudoinverse needs a rational x")
    r = _check_unit(Fraction(x))
    num, den = r.numerator, r.denominator
    seen: dict[int, int] = {}
    digits = []
    while num and num not in seen:
        seen[num] = len(digits)
        num *= base
        d, num = divmod(num, den)
        digits.append(d)
    if not num:
        return BadicInteger(base, tuple(digits), TAIL_ZERO)
    start = seen[num]
    return BadicInteger(base, tuple(digits[:start]), TAIL_ZERO, tuple(digits[start:]))


def _badic_phase(k: int, base: int, prefix_digits) -> Fraction:
    """Phase of ``chi_k`` at the integer with the given leading digits."""
    g = digit_length(k, base)
    if g == 0:
        return Fraction(0)
    kd = int_digits(k, base)
    a = 0
    for d in kd:  # a = phi_b(k) * b^g, digits of k reversed
        a = a * base + d
    z = sum(d * base**j for j, d in enumerate(prefix_digits[:g]))
    mod = base**g
    return Fraction((a * z) % mod, mod)


def character(k: int, z: BadicInteger) -> complex:
    """``chi_k(z) = e(phi_b(k) * z)``, using only the first ``v_b(k)`` digits of ``z``."""
    if k < 0:
        raise ValueError(f"character index must be >= 0, got {k}")
    g = digit_length(k, z.base)
    if z.precision < g:
        raise ValueError(
            f"chi_{k} reads {g} digits but z carries only {z.precision}; "
            "use BadicInteger.with_precision"
        )
    ph = _badic_phase(k, z.base, z.head)
    return unit_root(ph.numerator, ph.denominator)


def badic_function(k: int, base: int, x) -> complex:
    """``gamma_k(x) = chi_k(phi_b^+(x))``."""
    if k < 0:
        raise ValueError(f"index must be >= 0, got {k}")
    _check_unit(x)
    g = max(digit_length(k, base), 1)
    return character(k, monna_pseudoinverse(x, base, g))


def _walsh_phase(k: int, base: int, x) -> Fraction:
    kd = int_digits(k, base)
    xd = regular_digits(x, base, len(kd))
    return Fraction(sum(a * c for a, c in zip(kd, xd)) % base, base)


def walsh(k: int, base: int, x) -> complex:
    """``w_k(x) = e(sum_j k_j x_j / b)`` over the regular digits of ``x``."""
    if k < 0:
        raise ValueError(f"index must be >= 0, got {k}")
    _check_unit(x)
    ph = _walsh_phase(k, base, x)
    return unit_root(ph.numerator, ph.denominator)


def _trig_phase(k: int, x) -> Fraction:
    xr = Fraction(x) if isinstance(x, Rational) else Fraction(float(x))
    return (k * xr) % 1


def trig(k: int, x) -> complex:
    """``e_k(x) = e(k x)``."""
    ph = _trig_phase(int(k), x)
    return unit_root(ph.numerator, ph.denominator)


@dataclass(frozen=True)
class HybridSystemConfig:
    """Which function system acts on which coordinate.

    Index vectors are ordered by system block: ``s1`` Walsh slots, then
    ``s2`` b-adic slots, then ``s3`` trigonometric slots.  Slot ``j`` acts
    on coordinate ``coordinate_assignment[j]`` (0-based); the default is
    the identity.
    """

    s1: int = 0
    s2: int = 0
    s3: int = 0
    walsh_bases: tuple[int, ...] = ()
    badic_bases: tuple[int, ...] = ()
    coordinate_assignment: tuple[int, ...] | None = None

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        s = self.s1 + self.s2 + self.s3
        if s < 1:
            raise ValueError("at least one of s1, s2, s3 must be positive")
        object.__setattr__(self, "walsh_bases", tuple(int(b) for b in self.walsh_bases))
        object.__setattr__(self, "badic_bases", tuple(int(b) for b in self.badic_bases))
        if len(self.walsh_bases) != self.s1 or len(self.badic_bases) != self.s2:
            raise ValueError("need exactly s1 Walsh bases and s2 b-adic bases")
        if any(b < 2 for b in self.walsh_bases + self.badic_bases):
            raise ValueError("bases must be >= 2")
        assign = self.coordinate_assignment
        assign = tuple(range(s)) if assign is None else tuple(int(c) for c in assign)
        if sorted(assign) != list(range(s)):
            raise ValueError(f"coordinate_assignment {assign} is not a permutation of 0..{s - 1}")
        object.__setattr__(self, "coordinate_assignment", assign)

    @classmethod
    def trigonometric(cls, s: int) -> HybridSystemConfig:
        return cls(s3=s)

    @classmethod
    def walsh(cls, bases) -> HybridSystemConfig:
        bases = tuple(bases)
        return cls(s1=len(bases), walsh_bases=bases)

    @classmethod
    def badic(cls, bases) -> HybridSystemConfig:
        bases = tuple(bases)
        return cls(s2=len(bases), badic_bases=bases)

    @classmethod
    def from_coordinates(cls, kinds) -> HybridSystemConfig:
        """Build from per-coordinate ``("walsh", b)``, ``("badic", b)`` or ``("trig", None)``."""
        kinds = list(kinds)
        slots = {"walsh": [], "badic": [], "trig": []}
        for coord, (kind, base) in enumerate(kinds):
            if kind not in slots:
                raise ValueError(f"unknown system kind {kind!r}")
            slots[kind].append((coord, base))
        assign = [c for kind in ("walsh", "badic", "trig") for c, _ in slots[kind]]
        return cls(
            s1=len(slots["walsh"]),
            s2=len(slots["badic"]),
            s3=len(slots["trig"]),
            walsh_bases=tuple(b for _, b in slots["walsh"]),
            badic_bases=tuple(b for _, b in slots["badic"]),
            coordinate_assignment=tuple(assign),
        )

    @classmethod
    def from_tags(cls, text: str) -> HybridSystemConfig:
        """Parse per-coordinate tags such as ``"w2,g3,t"`` (inverse of ``describe``)."""
        kinds = []
        for tag in text.replace(" ", "").split(","):
            if tag == "t":
                kinds.append(("trig", None))
            elif tag[:1] in ("w", "g") and tag[1:].isdigit():
                kinds.append(("walsh" if tag[0] == "w" else "badic", int(tag[1:])))
            else:
                raise ValueError(f"unknown system tag {tag!r}; use wB, gB or t")
        return cls.from_coordinates(kinds)

    @property
    def s(self) -> int:
        return self.s1 + self.s2 + self.s3

    @property
    def slots(self) -> list[tuple[str, int | None, int]]:
        """``(kind, base, coordinate)`` per index slot."""
        kinds = (
            [("walsh", b) for b in self.walsh_bases]
            + [("badic", b) for b in self.badic_bases]
            + [("trig", None)] * self.s3
        )
        return [(k, b, c) for (k, b), c in zip(kinds, self.coordinate_assignment)]

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple(SIGNED if kind == "trig" else NONNEG for kind, _, _ in self.slots)

    @property
    def point_dim(self) -> int:
        return self.s

    def describe(self) -> str:
        """Per-coordinate tag list such as ``"w2,g3,t"``."""
        tags = [""] * self.s
        for kind, b, c in self.slots:
            tags[c] = {"walsh": f"w{b}", "badic": f"g{b}", "trig": "t"}[kind]
        return ",".join(tags)

    def check_index(self, k) -> tuple[int, ...]:
        k = tuple(int(v) for v in k)
        if len(k) != self.s:
            raise ValueError(f"index has {len(k)} entries, system has {self.s} slots")
        for j, (v, sig) in enumerate(zip(k, self.signature)):
            if sig == NONNEG and v < 0:
                raise ValueError(f"index entry {j} = {v} must be >= 0 for a digit system")
        return k

    def phase(self, k, x) -> Fraction:
        """Exact phase of ``xi_k(x)`` in ``[0, 1)``."""
        k = self.check_index(k)
        if len(x) != self.s:
            raise ValueError(f"point has {len(x)} coordinates, system needs {self.s}")
        total = Fraction(0)
        for kj, (kind, b, c) in zip(k, self.slots):
            xc = x[c]
            _check_unit(xc)
            if kind == "walsh":
                total += _walsh_phase(kj, b, xc)
            elif kind == "badic":
                g = digit_length(kj, b)
                total += _badic_phase(kj, b, regular_digits(xc, b, g)) if g else 0
            else:
                total += _trig_phase(kj, xc)
        return total % 1

    def evaluate(self, indices: np.ndarray, points) -> np.ndarray:
        """``xi_k(x_n)`` for a batch of indices, shape ``(len(indices), N)``."""
        indices = np.asarray(indices, dtype=np.int64)
        if indices.ndim != 2 or indices.shape[1] != self.s:
            raise ValueError(f"indices must have shape (m, {self.s})")
        if points.s != self.s:
            raise ValueError(f"points have dimension {points.s}, system needs {self.s}")
        phase = np.zeros((indices.shape[0], points.N))
        for j, (kind, b, c) in enumerate(self.slots):
            k = indices[:, j]
            if not k.any():
                continue
            if kind == "walsh":
                phase += _walsh_phases(k, b, points, c)
            elif kind == "badic":
                phase += _badic_phases(k, b, points, c)
            else:
                phase += _trig_phases(k, points, c)
        return expi(np.remainder(phase, 1.0))


def hybrid_eval(k, config: HybridSystemConfig, x) -> complex:
    """``xi_k(x)``: product of the per-slot functions, as one exponential."""
    ph = config.phase(k, x)
    return unit_root(ph.numerator, ph.denominator)


def _index_digit_matrix(k: np.ndarray, base: int) -> np.ndarray:
    g = max(digit_length(int(v), base) for v in k)
    out = np.zeros((len(k), g), dtype=np.int64)
    rest = k.copy()
    for j in range(g):
        out[:, j] = rest % base
        rest //= base
    return out


def _walsh_phases(k, base, points, coord) -> np.ndarray:
    kd = _index_digit_matrix(k, base)
    xd = points.digits(coord, base, kd.shape[1])
    return ((kd @ xd.T) % base) / base


def _badic_phases(k, base, points, coord) -> np.ndarray:
    kd = _index_digit_matrix(k, base)
    G = kd.shape[1]
    mod = base**G
    xd = points.digits(coord, base, G)
    big = mod >= 2**31
    weights_z = np.array([base**j for j in range(G)], dtype=object if big else np.int64)
    weights_a = weights_z[::-1]
    # a = phi_b(k) * b^G; z = first G digits of x read as an integer
    if big:
        a = (kd.astype(object) * weights_a).sum(axis=1)
        z = (xd.astype(object) * weights_z).sum(axis=1)
        r = np.outer(a, z) % mod
        return np.array(
            [[float(Fraction(int(v), mod)) for v in row] for row in r], dtype=float
        ).reshape(len(k), points.N)
    a = kd @ weights_a
    z = xd @ weights_z
    return (np.outer(a, z) % mod) / mod


def _trig_phases(k, points, coord) -> np.ndarray:
    ex = points.exact_column(coord)
    if ex is not None:
        num, den = ex
        kmax = int(np.abs(k).max())
        if den * max(kmax, 1) < 2**62 and num.dtype != object:
            return (np.outer(k, num) % den) / den
        r = np.outer(k.astype(object), num.astype(object)) % den
        return np.array([[int(v) / den for v in row] for row in r], dtype=float).reshape(
            len(k), points.N
        )
    x = points.values[:, coord]
    return np.remainder(np.outer(k.astype(float), x), 1.0)
