"""Weyl sums, the weighted spectral test and the L^alpha diaphony.

The spectral test is a supremum over infinitely many indices.  It is
evaluated by enumerating index shells ``K/2 < ||k|| <= K`` for
``K = 1, 2, 4, ...`` while tracking ``A``, the largest weighted Weyl sum
seen so far.  Every index outside the shells enumerated so far satisfies
``rho(k) |S_N| <= rho(k) <= tail_sup(K)``, so once ``tail_sup(K) <= A`` the
running maximum is the exact value.  Inside a shell, indices with
``rho(k)`` no larger than the maximum at the start of the shell cannot
change the result and are skipped.

The index enumeration is cut into fixed-size chunks and each chunk sums
its rows with the same numpy reduction, so the results do not depend on
how many worker threads evaluate the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, ResourceLimitError
from .padic import NONNEG, POSITIVE, SIGNED
from .points import PointSet
from .weights import ProductWeight, index_norm, norm_threshold

SCHEMA_VERSION = "1"
CHUNK = 256
DEFAULT_MAX_K = 1 << 14
DEFAULT_MAX_BOX = 50_000_000


def default_threads() -> int:
    """Worker count from ``EQUILENS_THREADS`` (default 1)."""
    raw = os.environ.get("EQUILENS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"EQUILENS_THREADS must be a positive integer, got {raw!r}") from None


def describe_system(system) -> str:
    return system.describe() if hasattr(system, "describe") else type(system).__name__


@dataclass
class SpectralResult:
    value: float
    argmax_index: tuple[int, ...] | None
    shell_bound_used: int
    normalizer: float
    tail_bound: float
    N: int
    system: str = ""
    weight: dict = field(default_factory=dict)
    measure: str = "spectral"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "measure": self.measure,
            "value": self.value,
            "argmax_index": None if self.argmax_index is None else list(self.argmax_index),
            "K": self.shell_bound_used,
            "tail_bound": self.tail_bound,
            "N": self.N,
            "system": self.system,
            "weight": self.weight,
            "normalizer": self.normalizer,
        }


@dataclass
class DiaphonyResult:
    value: float
    alpha: float
    truncation_K: int | None
    tail_error_bound: float
    N: int
    method: str = "shells"
    system: str = ""
    weight: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "measure": "diaphony",
            "value": self.value,
            "argmax_index": None,
            "K": self.truncation_K,
            "tail_bound": self.tail_error_bound,
            "N": self.N,
            "system": self.system,
            "weight": self.weight,
            "alpha": self.alpha,
            "method": self.method,
        }


def weyl_sum(f, points, N: int) -> complex:
    """``(1/N) sum_{n<N} f(x_n)`` with correctly rounded summation.

    ``f`` is called on each point as a tuple (exact Fractions for exact
    columns).
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    pts = PointSet.coerce(points, N)
    vals = [complex(f(pts.point(n))) for n in range(N)]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals)) / N


def _axis_range(sig: str, K: int) -> np.ndarray:
    if sig == SIGNED:
        return np.arange(-K, K + 1, dtype=np.int64)
    if sig == NONNEG:
        return np.arange(0, K + 1, dtype=np.int64)
    if sig == POSITIVE:
        return np.arange(1, K + 1, dtype=np.int64)
    raise ValueError(f"unknown signature {sig!r}")


def box_size(signature, K: int) -> int:
    return math.prod(len(_axis_range(sg, K)) for sg in signature)


def iter_shell(signature, K_lo: int, K_hi: int, norm: str = "max"):
    """Indices with ``K_lo < ||k|| <= K_hi`` in lexicographic order, in chunks."""
    signature = tuple(signature)
    lo, hi = norm_threshold(K_lo, norm), norm_threshold(K_hi, norm)
    axes = [_axis_range(sg, K_hi) for sg in signature]
    if len(axes) == 1:
        k = axes[0][:, None]
        r = index_norm(k, norm)
        yield k[(r > lo) & (r <= hi)]
        return
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(axes) - 1)
    for first in axes[0]:
        k = np.concatenate([np.full((len(rest), 1), first, dtype=np.int64), rest], axis=1)
        r = index_norm(k, norm)
        sel = (r > lo) & (r <= hi)
        if sel.any():
            yield k[sel]


def _chunk_sums(system, points, block):
    # row sums over a fixed chunk partition, so the result ignores the thread count
    vals = system.evaluate(block, points)
    return vals.sum(axis=1).tolist()


def weyl_sums(system, points: PointSet, indices: np.ndarray, threads: int | None = None):
    """``S_N(xi_k)`` for every row of ``indices``; independent of ``threads``."""
    indices = np.asarray(indices, dtype=np.int64)
    if len(indices) == 0:
        return np.zeros(0, dtype=complex)
    threads = default_threads() if threads is None else max(1, int(threads))
    _warm(system, points, indices)
    blocks = [indices[i : i + CHUNK] for i in range(0, len(indices), CHUNK)]
    if threads == 1 or len(blocks) == 1:
        parts = [_chunk_sums(system, points, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: _chunk_sums(system, points, b), blocks))
    return np.array([v for p in parts for v in p], dtype=complex) / points.N


def _warm(system, points, indices):
    # fill the digit cache before worker threads read it
    if hasattr(system, "warm"):
        system.warm(points, indices)
        return
    for j, (kind, b, c) in enumerate(getattr(system, "slots", [])):
        if kind in ("walsh", "badic"):
            kmax = int(indices[:, j].max())
            depth = 0
            while kmax:
                kmax //= b
                depth += 1
            if depth:
                points.digits(c, b, depth)


def _check_weight_dim(system, weight):
    if isinstance(weight, ProductWeight) and len(weight.factors) != len(system.signature):
        raise ValueError(
            f"weight has {len(weight.factors)} factors, system has {len(system.signature)} slots"
        )


def spectral_test(
    points,
    N: int,
    system,
    weight,
    *,
    min_K: int = 1,
    max_K: int = DEFAULT_MAX_K,
    max_box: int = DEFAULT_MAX_BOX,
    threads: int | None = None,
) -> SpectralResult:
    """Exact weighted spectral test of the first ``N`` points.

    Parameters
    ----------
    points : PointSet, sequence spec, or array
        Point source with at least ``N`` points.
    system
        ``HybridSystemConfig`` or any object with ``signature`` and
        ``evaluate(indices, points)``.
    weight : WeightSpec
        Must provide ``tail_sup`` and a normalizer.
    min_K : int
        Enumerate at least up to this shell bound even if the stopping
        rule is met earlier.
    max_K, max_box : int
        Shell budget; exceeding it raises ``ResourceLimitError`` carrying
        the bracketing interval for the normalized value.
    """
    pts = PointSet.coerce(points, N)
    if weight.tail_sup is None:
        raise CapabilityError(f"weight {weight.name!r} has no tail bound; cannot terminate exactly")
    _check_weight_dim(system, weight)
    sig = tuple(system.signature)
    normalizer = weight.normalizer_for(sig)
    best, arg = 0.0, None
    K_prev, K = 0, 1
    while True:
        if box_size(sig, K) > max_box:
            raise ResourceLimitError(
                f"shell K={K} exceeds the enumeration budget of {max_box} indices",
                bracket=(best / normalizer, max(best, weight.tail_sup(K_prev)) / normalizer),
            )
        threshold = best
        cand, cand_rho = [], []
        for chunk in iter_shell(sig, K_prev, K, weight.norm):
            rho = weight.value(chunk)
            keep = rho > threshold
            if keep.any():
                cand.append(chunk[keep])
                cand_rho.append(rho[keep])
        if cand:
            idx = np.concatenate(cand)
            rho = np.concatenate(cand_rho)
            vals = rho * np.abs(weyl_sums(system, pts, idx, threads))
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, arg = float(vals[i]), tuple(int(v) for v in idx[i])
        tail = weight.tail_sup(K)
        if tail <= best and K >= min_K:
            break
        if K >= max_K:
            raise ResourceLimitError(
                f"tail bound {tail:.3g} still above the attained maximum {best:.3g} at K={K}",
                bracket=(best / normalizer, max(best, tail) / normalizer),
            )
        K_prev, K = K, 2 * K
    return SpectralResult(
        value=best / normalizer,
        argmax_index=arg,
        shell_bound_used=K,
        normalizer=normalizer,
        tail_bound=weight.tail_sup(K) / normalizer,
        N=N,
        system=describe_system(system),
        weight=weight.describe(),
    )


def etk_bound(points, N: int, system, weight, K: int, *, threads: int | None = None) -> float:
    """Erdos-Turan-Koksma type bound ``max(A_K, sup_{||k||>K} rho) / normalizer``."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    pts = PointSet.coerce(points, N)
    _check_weight_dim(system, weight)
    sig = tuple(system.signature)
    idx = [c for c in iter_shell(sig, 0, int(K), weight.norm)]
    best = 0.0
    if idx:
        idx = np.concatenate(idx)
        vals = weight.value(idx) * np.abs(weyl_sums(system, pts, idx, threads))
        best = float(vals.max()) if len(vals) else 0.0
    return max(best, weight.tail_sup(K)) / weight.normalizer_for(sig)


def diaphony(
    points,
    N: int,
    system,
    weight,
    alpha: float = 2.0,
    rel_tol: float = 1e-3,
    *,
    method: str = "auto",
    min_K: int = 1,
    max_K: int = DEFAULT_MAX_K,
    max_box: int = DEFAULT_MAX_BOX,
    threads: int | None = None,
) -> DiaphonyResult:
    """L^alpha diaphony of the first ``N`` points.

    ``method="shells"`` sums over max-norm shells until the weight's tail
    power sum, relative to the normalizing sum, falls below
    ``rel_tol * value**alpha``; the reported ``tail_error_bound`` covers
    the unsummed indices since ``|S_N| <= 1``.

    ``method="kernel"`` is available for ``alpha = 2`` with a product
    weight whose factors match the system slots (``1/r`` on trigonometric
    slots, digit-length weights in the slot's base on Walsh or b-adic
    slots).  It sums the closed-form reproducing kernel over all point
    pairs, which equals the full infinite series; the error bound then
    only accounts for rounding.  ``"auto"`` picks the kernel when
    available.
    """
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if weight.tail_power_sum is None or weight.power_normalizer is None:
        raise CapabilityError(f"weight {weight.name!r} has no tail power sum; diaphony unavailable")
    pts = PointSet.coerce(points, N)
    _check_weight_dim(system, weight)
    sig = tuple(system.signature)
    norm_sum = weight.power_normalizer(alpha, sig)
    kernels = _slot_kernels(system, weight) if alpha == 2 else None
    if method == "auto":
        method = "kernel" if kernels is not None else "shells"
    common = dict(N=N, system=describe_system(system), weight=weight.describe())
    if method == "kernel":
        if kernels is None:
            raise CapabilityError("no closed-form kernel for this system, weight and alpha")
        value, err = _kernel_diaphony(pts, system, kernels, sig, norm_sum)
        return DiaphonyResult(value, alpha, None, err, method="kernel", **common)
    if method != "shells":
        raise ValueError(f"unknown method {method!r}")

    terms: list[float] = []
    K_prev, K = 0, 1
    while True:
        if box_size(sig, K) > max_box:
            raise ResourceLimitError(
                f"shell K={K} exceeds the enumeration budget of {max_box} indices",
                bracket=_bracket(terms, norm_sum, weight, K_prev, alpha, sig),
            )
        chunks = list(iter_shell(sig, K_prev, K, weight.norm))
        if chunks:
            idx = np.concatenate(chunks)
            S = np.abs(weyl_sums(system, pts, idx, threads))
            terms.extend((weight.value(idx) ** alpha * S**alpha).tolist())
        partial = math.fsum(terms) / norm_sum
        tail = weight.tail_power_sum(K, alpha, sig) / norm_sum
        if partial > 0 and tail < rel_tol * partial and K >= min_K:
            break
        if K >= max_K:
            lo, hi = _bracket(terms, norm_sum, weight, K, alpha, sig)
            raise ResourceLimitError(
                f"diaphony tail {tail:.3g} not below rel_tol * value at K={K}", bracket=(lo, hi)
            )
        K_prev, K = K, 2 * K
    value = partial ** (1 / alpha)
    upper = (partial + tail) ** (1 / alpha)
    return DiaphonyResult(value, alpha, K, upper - value, method="shells", **common)


def _bracket(terms, norm_sum, weight, K, alpha, sig):
    partial = math.fsum(terms) / norm_sum
    tail = weight.tail_power_sum(K, alpha, sig) / norm_sum if K else 1.0
    return partial ** (1 / alpha), min(1.0, (partial + tail) ** (1 / alpha))


# --- closed-form kernels for alpha = 2 -----------------------------------


def _slot_kernels(system, weight):
    """Per-slot kernel builders, or ``None`` if the combination has no closed form."""
    from .weights import DigitFactor, RFactor

    if not isinstance(weight, ProductWeight) or not hasattr(system, "slots"):
        return None
    out = []
    for f, (kind, b, c), sg in zip(weight.factors, system.slots, system.signature):
        if kind == "trig" and isinstance(f, RFactor) and sg == SIGNED:
            out.append(("trig", None, c))
        elif kind in ("walsh", "badic") and isinstance(f, DigitFactor) and f.base == b:
            out.append(("digit", b, c))
        else:
            return None
    return out


def _trig_kernel(col: np.ndarray) -> np.ndarray:
    # sum_{k in Z} max(1,|k|)^-2 e(k t) = 1 + 2 pi^2 (t^2 - t + 1/6), t in [0,1)
    t = np.remainder(col[:, None] - col[None, :], 1.0)
    return 1.0 + 2.0 * math.pi**2 * (t * t - t + 1.0 / 6.0)


def _trig_differences(points: PointSet, c: int) -> np.ndarray:
    ex = points.exact_column(c)
    if ex is not None and ex[0].dtype != object:
        num, den = ex
        return ((num[:, None] - num[None, :]) % den) / den
    return np.remainder(points.values[:, c][:, None] - points.values[:, c][None, :], 1.0)


def _digit_kernel(points: PointSet, c: int, base: int) -> np.ndarray:
    # For both the Walsh and the b-adic system with weight b^-v(k), the
    # kernel depends only on the length m of the common digit prefix:
    # 1 + (1 - b^-m)/b - b^-(m+2), tending to 1 + 1/b for equal points.
    depth = max(1, math.ceil(60 / math.log2(base)))
    d = points.digits(c, base, depth)
    eq = d[:, None, :] == d[None, :, :]
    prefix = np.cumprod(eq, axis=2).sum(axis=2).astype(float)
    bm = np.power(float(base), -prefix)
    kern = 1.0 + (1.0 - bm) / base - bm / base**2
    same = prefix == depth
    kern[same] = 1.0 + 1.0 / base
    return kern


def _kernel_diaphony(points: PointSet, system, kernels, sig, norm_sum):
    N = points.N
    total = np.ones((N, N))
    kmax = 1.0
    for kind, b, c in kernels:
        if kind == "trig":
            t = _trig_differences(points, c)
            total *= 1.0 + 2.0 * math.pi**2 * (t * t - t + 1.0 / 6.0)
            kmax *= 1.0 + math.pi**2 / 3.0
        else:
            total *= _digit_kernel(points, c, b)
            kmax *= 1.0 + 1.0 / b
    zero_in_set = POSITIVE not in sig
    full = math.fsum(total.ravel()) / (N * N)
    sq = max(full - (1.0 if zero_in_set else 0.0), 0.0) / norm_sum
    value = math.sqrt(sq)
    # each kernel entry carries a few ulps of relative error
    err_sq = 16 * np.finfo(float).eps * kmax * len(kernels) / norm_sum
    err = err_sq / value if value > 0 else math.sqrt(err_sq)
    return value, float(min(err, math.sqrt(err_sq)))
