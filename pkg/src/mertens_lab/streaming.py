"""Streaming accumulation of prime sums over sieved segments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .numerics import ExtendedReal, exact_sum
from .sieve import SieveConfig, check_cap, iter_prime_blocks, small_primes

# exact accumulators carried by every stream, in checkpoint order
FIELDS = ("theta", "sum_recip_p", "sum_logp_over_p", "log_prod_minus", "log_prod_plus")


def prime_terms(primes: np.ndarray) -> dict[str, np.ndarray]:
    """Per-prime float64 terms of every streamed sum."""
    p = primes.astype(np.float64)
    logp = np.log(p)
    recip = 1.0 / p
    return {
        "theta": logp,
        "sum_recip_p": recip,
        "sum_logp_over_p": logp / p,
        "log_prod_minus": -np.log1p(-recip),
        "log_prod_plus": np.log1p(recip),
    }


def theta_fixed(y: int) -> int:
    """Exact theta(y) from the in-memory sieve (used for the psi correction)."""
    if y < 2:
        return 0
    return exact_sum(prime_terms(small_primes(y))["theta"])


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for integers."""
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def psi_correction_fixed(n: int) -> int:
    """sum_{v >= 2} theta(n^(1/v)), exact."""
    total = 0
    v = 2
    while True:
        y = iroot(n, v)
        if y < 2:
            return total
        total += theta_fixed(y)
        v += 1


@dataclass(frozen=True)
class SumSnapshot:
    """All streamed accumulators at checkpoint ``x`` (primes p <= x)."""

    x: int
    pi: int
    theta: ExtendedReal
    psi: ExtendedReal
    sum_recip_p: ExtendedReal
    sum_logp_over_p: ExtendedReal
    log_prod_minus: ExtendedReal
    log_prod_plus: ExtendedReal
    exact: tuple[int, ...] = field(repr=False)

    @property
    def state(self) -> "StreamState":
        return StreamState(self.x, self.pi, list(self.exact))


@dataclass
class StreamState:
    """Mutable exact state of a stream: last covered integer plus sums."""

    x: int = 1
    pi: int = 0
    sums: list[int] = field(default_factory=lambda: [0] * len(FIELDS))

    def add(self, primes: np.ndarray, upto: int) -> None:
        if len(primes):
            terms = prime_terms(primes)
            for i, name in enumerate(FIELDS):
                self.sums[i] += exact_sum(terms[name])
            self.pi += len(primes)
        self.x = upto

    def snapshot(self) -> SumSnapshot:
        ext = [ExtendedReal.from_fixed(v) for v in self.sums]
        theta_n = self.sums[0]
        psi = ExtendedReal.from_fixed(theta_n + psi_correction_fixed(self.x))
        return SumSnapshot(
            x=self.x,
            pi=self.pi,
            theta=ext[0],
            psi=psi,
            sum_recip_p=ext[1],
            sum_logp_over_p=ext[2],
            log_prod_minus=ext[3],
            log_prod_plus=ext[4],
            exact=tuple(self.sums),
        )

    def copy(self) -> "StreamState":
        return StreamState(self.x, self.pi, list(self.sums))


def _call_visitor(visitor, primes: np.ndarray) -> None:
    if visitor is None:
        return
    block = getattr(visitor, "visit_block", None)
    if block is not None:
        block(primes)
        return
    for p in primes.tolist():
        visitor(p)


def stream_primes(
    x_max: float,
    visitor=None,
    config: SieveConfig | None = None,
    *,
    resume: StreamState | SumSnapshot | None = None,
    marks: Iterable[float] = (),
    on_mark: Callable[[SumSnapshot], None] | None = None,
    on_checkpoint: Callable[[SumSnapshot], None] | None = None,
) -> SumSnapshot:
    """Sieve up to ``x_max`` and fold every prime into the accumulators.

    ``visitor`` is either a callable taking one prime at a time or an object
    with ``visit_block(primes)``; it sees primes in ascending order.
    ``on_mark`` receives a snapshot at each x in ``marks``; ``on_checkpoint``
    one at every ``checkpoint_stride``-th grid boundary.  If the visitor
    raises, the state up to the last completed window is passed to
    ``on_checkpoint`` before the error propagates.
    """
    if x_max < 2:
        raise ValueError("x_max must be >= 2")
    config = config or SieveConfig()
    n_max = math.floor(x_max)
    check_cap(n_max)
    if isinstance(resume, SumSnapshot):
        resume = resume.state
    state = resume.copy() if resume is not None else StreamState()
    if state.x > n_max:
        raise ValueError(f"resume point {state.x} lies beyond x_max {n_max}")
    pending = sorted({math.floor(m) for m in marks if state.x <= math.floor(m) <= n_max})
    width = config.segment_width
    stride = config.checkpoint_stride

    for a, b, primes in iter_prime_blocks(state.x + 1, n_max, config):
        before = state.copy()
        try:
            _call_visitor(visitor, primes)
        except BaseException:
            if on_checkpoint is not None and before.x >= 2:
                on_checkpoint(before.snapshot())
            raise
        while pending and pending[0] < b:
            m = pending.pop(0)
            k = int(np.searchsorted(primes, m, side="right"))
            state.add(primes[:k], m)
            primes = primes[k:]
            if on_mark is not None:
                on_mark(state.snapshot())
        state.add(primes, b - 1)
        if on_checkpoint is not None and b % width == 0 and (b // width) % stride == 0:
            on_checkpoint(state.snapshot())
    while pending:
        # marks at or below the resume point
        state.x = max(state.x, pending.pop(0))
        if on_mark is not None:
            on_mark(state.snapshot())
    state.x = max(state.x, n_max)
    return state.snapshot()


_CACHE: dict[int, SumSnapshot] = {}


def snapshots(xs: Iterable[float], config: SieveConfig | None = None) -> list[SumSnapshot]:
    """Snapshots at every x in ``xs`` from a single pass (memoised)."""
    keys = [math.floor(x) for x in xs]
    missing = sorted({k for k in keys if k not in _CACHE})
    if missing:
        for k in missing:
            if k < 2:
                _CACHE[k] = StreamState(x=k).snapshot()
        todo = [k for k in missing if k >= 2]
        if todo:
            def keep(s: SumSnapshot) -> None:
                _CACHE[s.x] = s

            final = stream_primes(todo[-1], config=config, marks=todo[:-1], on_mark=keep)
            _CACHE[final.x] = final
    return [_CACHE[k] for k in keys]


def snapshot(x: float) -> SumSnapshot:
    return snapshots([x])[0]
