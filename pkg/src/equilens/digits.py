"""Additions on fixed-length digit vectors.

Every abelian group structure on ``A_b^m`` considered here comes from a
partition ``(t_1, ..., t_r)`` of ``m``: the digit positions are cut into
consecutive blocks of sizes ``t_i`` (least significant block first), each
block is added as an element of ``Z/b^t_i Z`` and carries never cross a
block boundary.  The two extreme partitions are the familiar ones:
``(1, ..., 1)`` is digitwise addition without carry and ``(m,)`` is
ordinary integer addition modulo ``b^m``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DigitVector:
    """Digit string in base ``base``, least significant digit at index 0."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        digits = tuple(int(d) for d in self.digits)
        if not digits:
            raise ValueError("a digit vector needs at least one digit")
        for j, d in enumerate(digits):
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} at position {j} outside 0..{self.base - 1}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_int(cls, value: int, base: int, length: int) -> DigitVector:
        """Base-``base`` expansion of ``value mod base**length``."""
        value %= base**length
        digits = []
        for _ in range(length):
            value, d = divmod(value, base)
            digits.append(d)
        return cls(base, tuple(digits))

    @classmethod
    def zero(cls, base: int, length: int) -> DigitVector:
        return cls(base, (0,) * length)

    def __len__(self):
        return len(self.digits)

    def to_int(self) -> int:
        return sum(d * self.base**j for j, d in enumerate(self.digits))


@dataclass(frozen=True)
class Partition:
    """Non-increasing sequence of positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(t) for t in self.parts)
        if not parts or any(t < 1 for t in parts):
            raise ValueError(f"partition parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def total(self) -> int:
        return sum(self.parts)


@dataclass(frozen=True)
class AdditionSpec:
    """A partition-defined addition on ``A_base^m`` with ``m = partition.total``."""

    base: int
    partition: Partition

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if not isinstance(self.partition, Partition):
            object.__setattr__(self, "partition", Partition(tuple(self.partition)))

    @property
    def length(self) -> int:
        return self.partition.total

    @property
    def blocks(self) -> list[tuple[int, int]]:
        """``(start, stop)`` digit positions of each block, least significant first."""
        out, start = [], 0
        for t in self.partition.parts:
            out.append((start, start + t))
            start += t
        return out

    @classmethod
    def xor(cls, base: int, m: int) -> AdditionSpec:
        return cls(base, Partition((1,) * m))

    @classmethod
    def carry(cls, base: int, m: int) -> AdditionSpec:
        return cls(base, Partition((m,)))


def _check_pair(x: DigitVector, y: DigitVector):
    if x.base != y.base:
        raise ValueError(f"base mismatch: {x.base} != {y.base}")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")


def xor_add(x: DigitVector, y: DigitVector) -> DigitVector:
    """Digitwise addition modulo the base, no carries."""
    _check_pair(x, y)
    b = x.base
    return DigitVector(b, tuple((u + v) % b for u, v in zip(x.digits, y.digits)))


def carry_add(x: DigitVector, y: DigitVector) -> DigitVector:
    """Integer addition of the digit values modulo ``base**m``."""
    _check_pair(x, y)
    return DigitVector.from_int(x.to_int() + y.to_int(), x.base, len(x))


def partition_add(x: DigitVector, y: DigitVector, spec: AdditionSpec) -> DigitVector:
    """Blockwise addition with carries confined to each block of ``spec``."""
    _check_pair(x, y)
    if x.base != spec.base or len(x) != spec.length:
        raise ValueError(
            f"operands in A_{x.base}^{len(x)} do not match spec A_{spec.base}^{spec.length}"
        )
    b = spec.base
    out: list[int] = []
    for start, stop in spec.blocks:
        carry = 0
        for j in range(start, stop):
            carry, d = divmod(x.digits[j] + y.digits[j] + carry, b)
            out.append(d)
        # the final carry of the block is discarded
    return DigitVector(b, tuple(out))


def enumerate_partitions(m: int) -> list[Partition]:
    """All partitions of ``m``, each non-increasing, in reverse lexicographic order."""
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")

    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for t in range(min(rest, cap), 0, -1):
            for tail in rec(rest - t, t):
                yield (t,) + tail

    return [Partition(p) for p in rec(m, m)]


def addition_table(spec: AdditionSpec) -> np.ndarray:
    """Cayley table of ``spec`` on the integer encodings ``0 .. b^m - 1``.

    Element ``u`` encodes the digit vector ``DigitVector.from_int(u, b, m)``.
    """
    b, m = spec.base, spec.length
    size = b**m
    dtype = np.int16 if size <= 2**15 else np.int64
    u = np.arange(size, dtype=np.int64)
    x, y = u[:, None], u[None, :]
    table = np.zeros((size, size), dtype=np.int64)
    for start, stop in spec.blocks:
        lo, width = b**start, b ** (stop - start)
        table += (((x // lo) % width + (y // lo) % width) % width) * lo
    return table.astype(dtype)


def element_orders(spec: AdditionSpec) -> np.ndarray:
    """Additive order of every element, indexed by integer encoding."""
    table = addition_table(spec)
    size = table.shape[0]
    elems = np.arange(size)
    orders = np.zeros(size, dtype=np.int64)
    cur = elems.copy()
    n = 1
    while True:
        done = (cur == 0) & (orders == 0)
        orders[done] = n
        if orders.all():
            return orders
        cur = table[cur, elems]
        n += 1
        if n > size:
            raise RuntimeError("element without finite order; table is not a group")


def order_profile(spec: AdditionSpec) -> tuple[tuple[int, int], ...]:
    """Sorted ``(order, count)`` multiset; an isomorphism invariant for abelian p-groups."""
    return tuple(sorted(Counter(element_orders(spec).tolist()).items()))


def max_element_order(spec: AdditionSpec) -> int:
    return int(element_orders(spec).max())


@dataclass
class GroupAxiomReport:
    spec: AdditionSpec
    exhaustive: bool
    checked: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_group_axioms(
    spec: AdditionSpec, exhaustive_limit: int = 4096, samples: int = 2000, seed: int = 0
) -> GroupAxiomReport:
    """Check closure, associativity, identity, inverses and commutativity.

    When ``b^m <= exhaustive_limit`` every element, pair and triple is
    checked on the Cayley table built from ``partition_add`` semantics;
    otherwise ``samples`` random triples of digit vectors are drawn and the
    axioms are checked directly through ``partition_add``.
    """
    b, m = spec.base, spec.length
    size = b**m
    if size <= exhaustive_limit:
        return _verify_exhaustive(spec)
    rng = random.Random(seed)
    zero = DigitVector.zero(b, m)
    report = GroupAxiomReport(spec, exhaustive=False, checked=samples)
    for _ in range(samples):
        x, y, z = (DigitVector.from_int(rng.randrange(size), b, m) for _ in range(3))
        xy = partition_add(x, y, spec)
        if partition_add(xy, z, spec) != partition_add(x, partition_add(y, z, spec), spec):
            report.violations.append(f"associativity fails at {x.digits}, {y.digits}, {z.digits}")
        if xy != partition_add(y, x, spec):
            report.violations.append(f"commutativity fails at {x.digits}, {y.digits}")
        if partition_add(x, zero, spec) != x or partition_add(zero, x, spec) != x:
            report.violations.append(f"identity fails at {x.digits}")
        # exhaustive inverse search is b^m; build the blockwise negation and verify it
        digits = []
        for start, stop in spec.blocks:
            block = DigitVector(b, x.digits[start:stop])
            digits.extend(DigitVector.from_int(-block.to_int(), b, stop - start).digits)
        neg = DigitVector(b, tuple(digits))
        if partition_add(x, neg, spec) != zero:
            report.violations.append(f"no inverse found for {x.digits}")
    return report


def _verify_exhaustive(spec: AdditionSpec) -> GroupAxiomReport:
    table = addition_table(spec)
    size = table.shape[0]
    report = GroupAxiomReport(spec, exhaustive=True, checked=size**3)
    v = report.violations
    if table.min() < 0 or table.max() >= size:
        v.append("closure: table entry outside the carrier")
        return report
    bad = np.argwhere(table != table.T)
    if len(bad):
        v.append(f"commutativity fails at {tuple(bad[0])} ({len(bad)} pairs)")
    elems = np.arange(size)
    if not (np.array_equal(table[0], elems) and np.array_equal(table[:, 0], elems)):
        v.append("identity: zero vector is not a two-sided identity")
    if not (table == 0).any(axis=1).all():
        missing = int(np.flatnonzero(~(table == 0).any(axis=1))[0])
        v.append(f"inverse: element {missing} has no inverse")
    for x in range(size):
        left = np.take(table, table[x], axis=0)  # (x+y)+z, rows y, columns z
        right = table[x].take(table)  # x+(y+z)
        if not np.array_equal(left, right):
            y, z = np.argwhere(left != right)[0]
            v.append(f"associativity fails at ({x}, {y}, {z})")
            break
    return report
