"""Segmented, odd-only sieve of Eratosthenes.

Segments live on a fixed global grid ``[k*W, (k+1)*W)`` (the first one starts
at 2), independent of the requested range, so a run that stops at any ``x``
and is later resumed walks exactly the same windows as an uninterrupted one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

DEFAULT_MAX_X = 10**10
MAX_X_ENV = "MERTENS_LAB_MAX_X"


class RangeTooLargeError(ValueError):
    """Requested bound exceeds the configured sieving cap."""


class InvalidRangeError(ValueError):
    pass


def max_x() -> int:
    """Hard cap on sieving bounds; ``MERTENS_LAB_MAX_X`` overrides it."""
    raw = os.environ.get(MAX_X_ENV)
    if raw:
        return int(float(raw))
    return DEFAULT_MAX_X


def check_cap(hi: float) -> None:
    cap = max_x()
    if hi > cap:
        raise RangeTooLargeError(f"bound {hi:g} exceeds cap {cap:g} (set {MAX_X_ENV} to raise it)")


@dataclass(frozen=True)
class SieveConfig:
    segment_width: int = 1 << 20
    worker_count: int = 1
    checkpoint_stride: int = 1

    def __post_init__(self):
        if self.segment_width < 1 << 10 or self.segment_width % 2:
            raise ValueError("segment_width must be even and >= 1024")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.checkpoint_stride < 1:
            raise ValueError("checkpoint_stride must be >= 1")


@dataclass
class PrimeSegment:
    """Sieved window ``[base, base + width)``.

    ``odd_composite[i]`` refers to the i-th odd integer of the window and is
    set iff that integer is composite.
    """

    base: int
    width: int
    odd_composite: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.base < 2 or self.width <= 0:
            raise ValueError("segment needs base >= 2 and width > 0")
        if self.base + self.width > 2**63 - 1:
            raise ValueError("segment end overflows int64")

    @property
    def first_odd(self) -> int:
        return self.base | 1

    def primes(self) -> np.ndarray:
        odd = np.flatnonzero(~self.odd_composite).astype(np.int64) * 2 + self.first_odd
        if self.base <= 2 < self.base + self.width:
            return np.concatenate((np.array([2], dtype=np.int64), odd))
        return odd


@lru_cache(maxsize=8)
def small_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a plain in-memory sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def sieve_segment(base: int, width: int, base_primes: np.ndarray | None = None) -> PrimeSegment:
    """Sieve one window; ``base_primes`` must cover sqrt(base + width - 1)."""
    end = base + width  # exclusive
    first = base | 1
    n_odd = max(0, (end - first + 1) // 2)
    composite = np.zeros(n_odd, dtype=bool)
    limit = math.isqrt(end - 1)
    if base_primes is None:
        base_primes = small_primes(limit)
    for p in base_primes[1 : np.searchsorted(base_primes, limit, side="right")].tolist():
        start = max(p * p, -(-first // p) * p)
        if not start & 1:
            start += p
        if start >= end:
            continue
        composite[(start - first) >> 1 :: p] = True
    return PrimeSegment(base, width, composite)


def segment_bounds(lo: int, hi: int, width: int) -> Iterator[tuple[int, int]]:
    """Grid-aligned half-open windows covering ``[lo, hi]`` (clipped)."""
    lo = max(lo, 2)
    k = lo // width
    while k * width <= hi:
        a = max(k * width, lo)
        b = min((k + 1) * width, hi + 1)
        if a < b:
            yield a, b
        k += 1


def iter_prime_blocks(lo: int, hi: int, config: SieveConfig | None = None) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield ``(a, b, primes in [a, b))`` in ascending order.

    With ``worker_count > 1`` windows are sieved concurrently but always
    yielded in ascending order.
    """
    config = config or SieveConfig()
    if hi < 2 or hi < lo:
        return
    base_primes = small_primes(math.isqrt(hi) + 1)
    bounds = list(segment_bounds(lo, hi, config.segment_width))

    def work(ab):
        a, b = ab
        return a, b, sieve_segment(a, b - a, base_primes).primes()

    if config.worker_count == 1 or len(bounds) < 2:
        for ab in bounds:
            yield work(ab)
        return
    with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
        window = 2 * config.worker_count
        for i in range(0, len(bounds), window):
            # map() preserves submission order, which is ascending
            yield from pool.map(work, bounds[i : i + window])


def _validate(lo, hi) -> tuple[int, int]:
    if lo > hi:
        raise InvalidRangeError(f"lo={lo} > hi={hi}")
    if lo < 0:
        raise InvalidRangeError("lo must be >= 0")
    check_cap(hi)
    return int(lo), int(hi)


def primes_in_range(lo: int, hi: int, config: SieveConfig | None = None) -> np.ndarray:
    """Ascending int64 array of the primes in ``[lo, hi]``."""
    lo, hi = _validate(lo, hi)
    blocks = [p for _, _, p in iter_prime_blocks(lo, hi, config)]
    if not blocks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(blocks)


def prime_count(x: float, config: SieveConfig | None = None) -> int:
    """pi(x), the number of primes <= x."""
    if x < 0:
        raise InvalidRangeError("x must be >= 0")
    n = math.floor(x)
    check_cap(n)
    return sum(len(p) for _, _, p in iter_prime_blocks(2, n, config))
