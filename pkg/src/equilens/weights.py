"""Weight functions on index sets, with the tail bounds the measures rely on.

A weight must be strictly positive and vanish at infinity.  Beyond its
values, a weight here carries

* ``tail_sup(K)``: an upper bound for ``rho(k)`` over ``||k|| > K``, which
  makes the spectral test terminate exactly;
* ``tail_power_sum(K, alpha, signature)``: an upper bound for
  ``sum rho(k)^alpha`` over ``||k|| > K`` (optional, needed for diaphony);
* ``normalizer(signature)``: ``sup rho`` over the nonzero indices.

Product weights ``rho(k) = prod f_i(k_i)`` derive all three from their
one-dimensional factors and additionally expose closed-form reproducing
kernels for the L^2 diaphony.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import zeta

from .errors import CapabilityError
from .padic import NONNEG, POSITIVE, SIGNED, digit_length

NORMS = ("max", "euclidean", "l1")


def index_norm(k: np.ndarray, norm: str) -> np.ndarray:
    """Integer-valued norm surrogate: max, squared euclidean, or l1."""
    a = np.abs(k)
    if norm == "max":
        return a.max(axis=1)
    if norm == "euclidean":
        return (a * a).sum(axis=1)
    if norm == "l1":
        return a.sum(axis=1)
    raise ValueError(f"unknown norm {norm!r}")


def norm_threshold(K: int, norm: str) -> int:
    """Value of ``index_norm`` at radius ``K`` (squared for the euclidean norm)."""
    return K * K if norm == "euclidean" else K


@dataclass
class WeightSpec:
    """A weight on an index set plus the bounds the measures need.

    ``value`` maps an ``(m, s)`` integer array to ``m`` positive floats.
    ``normalizer`` is either a number or a callable of the index-set
    signature; ``power_normalizer(alpha, signature)`` returns
    ``sum rho^alpha`` over the nonzero indices.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    tail_sup: Callable[[float], float] | None = None
    normalizer: float | Callable | None = None
    norm: str = "max"
    tail_power_sum: Callable | None = None
    power_normalizer: Callable | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}, got {self.norm!r}")

    def normalizer_for(self, signature) -> float:
        if self.normalizer is None:
            raise CapabilityError(f"weight {self.name!r} does not declare its supremum")
        if callable(self.normalizer):
            return float(self.normalizer(tuple(signature)))
        return float(self.normalizer)

    def describe(self) -> dict:
        return {"name": self.name, "norm": self.norm, **self.params}


class RFactor:
    """``1 / max(1, |k|)``, the one-dimensional factor of ``1/r(k)``."""

    name = "r"

    def values(self, k: np.ndarray) -> np.ndarray:
        return 1.0 / np.maximum(1, np.abs(k)).astype(float)

    def at(self, k: int) -> float:
        return 1.0 / max(1, abs(k))

    def full_power_sum(self, alpha: float, sig: str) -> float:
        z = float(zeta(alpha))
        return {SIGNED: 1 + 2 * z, NONNEG: 1 + z, POSITIVE: z}[sig]

    def tail_power_sum(self, K: int, alpha: float, sig: str) -> float:
        # sum over |k| > K is a Hurwitz zeta value
        t = float(zeta(alpha, K + 1))
        return 2 * t if sig == SIGNED else t


class DigitFactor:
    """``b^(-v_b(k))`` with ``v_b`` the base-``b`` digit length, for ``k >= 0``."""

    name = "digit"

    def __init__(self, base: int):
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        self.base = base

    def values(self, k: np.ndarray) -> np.ndarray:
        if (k < 0).any():
            raise CapabilityError("digit-length weight is defined on nonnegative indices only")
        v = np.zeros(k.shape, dtype=float)
        rest = k.astype(np.int64).copy()
        while rest.any():
            v += rest > 0
            rest //= self.base
        return np.power(float(self.base), -v)

    def at(self, k: int) -> float:
        return float(self.base) ** -digit_length(abs(k), self.base)

    def _level_sum(self, alpha: float, first_level: int) -> float:
        # sum over digit lengths v >= first_level of (b-1) b^(v-1) b^(-alpha v)
        b = self.base
        q = b ** (1.0 - alpha)
        return (b - 1) / b * q**first_level / (1.0 - q)

    def full_power_sum(self, alpha: float, sig: str) -> float:
        if sig == SIGNED:
            raise CapabilityError("digit-length weight needs a nonnegative index block")
        rest = self._level_sum(alpha, 1)
        return 1.0 + rest if sig == NONNEG else rest

    def tail_power_sum(self, K: int, alpha: float, sig: str) -> float:
        if sig == SIGNED:
            raise CapabilityError("digit-length weight needs a nonnegative index block")
        b = self.base
        vK = digit_length(K, b)
        # indices K+1 .. b^vK - 1 share K's digit length, the rest are longer
        same = (b**vK - 1 - K) * float(b) ** (-alpha * vK) if vK else 0.0
        return same + self._level_sum(alpha, vK + 1)


class ProductWeight(WeightSpec):
    """``rho(k) = prod_i f_i(k_i)`` under the max norm."""

    def __init__(self, name: str, factors, params=None):
        self.factors = tuple(factors)
        super().__init__(
            name=name,
            value=self._value,
            tail_sup=self._tail_sup,
            normalizer=self._normalizer,
            norm="max",
            tail_power_sum=self._tail_power_sum,
            power_normalizer=self._power_normalizer,
            params=dict(params or {}),
        )

    def _value(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k)
        if k.shape[1] != len(self.factors):
            raise ValueError(f"index dimension {k.shape[1]} != weight dimension {len(self.factors)}")
        out = np.ones(k.shape[0])
        for i, f in enumerate(self.factors):
            out *= f.values(k[:, i])
        return out

    def _tail_sup(self, K: float) -> float:
        # ||k||_max > K forces some |k_i| >= floor(K) + 1; every factor is
        # non-increasing in |k_i| and at most 1
        K1 = math.floor(K) + 1
        return max(f.at(K1) for f in self.factors)

    def _normalizer(self, signature) -> float:
        sig = self._sig(signature)
        if POSITIVE in sig:
            return math.prod(f.at(1 if s == POSITIVE else 0) for f, s in zip(self.factors, sig))
        return max(f.at(1) for f in self.factors)

    def _power_normalizer(self, alpha: float, signature) -> float:
        sig = self._sig(signature)
        total = math.prod(f.full_power_sum(alpha, s) for f, s in zip(self.factors, sig))
        return total - (0.0 if POSITIVE in sig else 1.0)

    def _tail_power_sum(self, K: float, alpha: float, signature) -> float:
        if alpha <= 1:
            raise ValueError(f"alpha must exceed 1, got {alpha}")
        sig = self._sig(signature)
        K = math.floor(K)
        # prod(full) - prod(box) without cancellation:
        # sum_i box_1..box_{i-1} * tail_i * full_{i+1}..full_s
        diff, box_prod = 0.0, 1.0
        for f, s in zip(self.factors, sig):
            full = f.full_power_sum(alpha, s)
            tail = f.tail_power_sum(K, alpha, s)
            diff = diff * full + box_prod * tail
            box_prod *= full - tail
        return diff

    def _sig(self, signature):
        sig = tuple(signature)
        if len(sig) != len(self.factors):
            raise ValueError(f"signature {sig} does not match {len(self.factors)} weight factors")
        return sig


def r_weight(s: int) -> ProductWeight:
    """``rho(k) = 1/r(k)`` with ``r(k) = prod max(1, |k_i|)``."""
    return ProductWeight("r", [RFactor()] * s)


def digit_weight(bases) -> ProductWeight:
    """``rho(k) = prod b_i^(-v_{b_i}(k_i))`` on nonnegative indices."""
    bases = tuple(int(b) for b in bases)
    return ProductWeight("digit", [DigitFactor(b) for b in bases], {"bases": list(bases)})


def hybrid_weight(system) -> ProductWeight:
    """Digit-length factors on Walsh and b-adic slots, ``1/r`` factors on trigonometric ones."""
    factors, tags = [], []
    for kind, b, _ in system.slots:
        if kind == "trig":
            factors.append(RFactor())
            tags.append("r")
        else:
            factors.append(DigitFactor(b))
            tags.append(f"digit{b}")
    return ProductWeight("hybrid", factors, {"factors": tags})


def euclidean_weight(s: int) -> WeightSpec:
    """``rho(k) = 1/||k||_2`` with euclidean shells."""

    def value(k):
        k = np.asarray(k)
        return 1.0 / np.sqrt((k * k).sum(axis=1).astype(float))

    def tail_sup(K):
        # ||k||_2^2 is an integer exceeding K^2
        return 1.0 / math.sqrt(math.floor(K * K) + 1)

    def normalizer(signature):
        positive = sum(1 for sg in signature if sg == POSITIVE)
        return 1.0 / math.sqrt(max(positive, 1))

    return WeightSpec("euclidean", value, tail_sup, normalizer, norm="euclidean")


def builtin_weights() -> dict[str, Callable[..., WeightSpec]]:
    """Constructors of the built-in weights, keyed by name."""
    return {
        "euclidean": euclidean_weight,
        "r": r_weight,
        "digit": digit_weight,
        "hybrid": hybrid_weight,
    }
