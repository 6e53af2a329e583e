"""Primorials and colossally abundant numbers in exponent-vector form.

Numbers are never built as integers: a value is its list of (prime, exponent)
pairs plus log N.  Ratios are accumulated exactly in log space, with the same
per-prime terms the streaming sums use, so ``totient_ratio(primorial(k))`` is
bit-identical to the streamed product at x = p_k.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .numerics import ExtendedReal, exact_sum
from .sieve import small_primes
from .special import DomainError, constants

MAX_PRIMORIAL_K = 10**6
MAX_LIMIT_LOG = 50.0


@dataclass(frozen=True)
class PrimorialNumber:
    factors: tuple[tuple[int, int], ...]
    log_n: ExtendedReal

    @classmethod
    def from_factors(cls, factors) -> PrimorialNumber:
        factors = tuple((int(p), int(e)) for p, e in factors)
        terms = np.array([e * math.log(p) for p, e in factors])
        return cls(factors, ExtendedReal.from_fixed(exact_sum(terms)))

    @property
    def primes(self) -> np.ndarray:
        return np.array([p for p, _ in self.factors], dtype=np.int64)

    @property
    def p_k(self) -> int:
        return self.factors[-1][0]

    def value(self) -> int:
        """The integer itself (only sensible for small numbers)."""
        return math.prod(p**e for p, e in self.factors)

    def check(self) -> None:
        ps = self.primes
        assert np.array_equal(ps, small_primes(int(ps[-1]))), "primes must be 2, 3, 5, ... p_k"
        exps = [e for _, e in self.factors]
        assert all(a >= b >= 1 for a, b in zip(exps, exps[1:] + [1])), "exponents must be nonincreasing"
        direct = math.fsum(e * math.log(p) for p, e in self.factors)
        assert abs(float(self.log_n) - direct) <= 1e-12 * direct


def first_primes(k: int) -> np.ndarray:
    if k < 6:
        return small_primes(13)[:k]
    bound = math.ceil(k * (math.log(k) + math.log(math.log(k))))  # p_k < bound for k >= 6
    return small_primes(bound)[:k]


def primorial(k: int) -> PrimorialNumber:
    """Product of the first k primes."""
    if not 1 <= k <= MAX_PRIMORIAL_K:
        raise DomainError(f"k must lie in [1, {MAX_PRIMORIAL_K}]")
    ps = first_primes(k)
    log_n = ExtendedReal.from_fixed(exact_sum(np.log(ps.astype(np.float64))))
    return PrimorialNumber(tuple((p, 1) for p in ps.tolist()), log_n)


def critical_epsilon(p: int, k: int) -> float:
    """Below this epsilon the CA exponent of p reaches k."""
    return math.log1p(1.0 / sum(p**j for j in range(1, k + 1))) / math.log(p)


def ca_exponent(p: int, eps: float) -> int:
    """Exponent of p in the CA number attached to ``eps``."""
    pe = p**eps
    return math.floor(math.log((p * pe - 1) / (pe - 1)) / math.log(p)) - 1


def colossally_abundant(limit_log: float) -> list[PrimorialNumber]:
    """CA numbers with log N <= limit_log in ascending order.

    Walk the critical epsilons downward; each one multiplies the previous
    CA number by a single prime.
    """
    if not math.log(2) <= limit_log <= MAX_LIMIT_LOG:
        raise DomainError(f"limit_log must lie in [log 2, {MAX_LIMIT_LOG}]")
    pool = small_primes(1000).tolist()  # p_k stays far below this for log N <= 50
    exps: dict[int, int] = {}
    heap: list[tuple[float, int, int]] = []
    next_new = 0
    log_n = 0.0
    out = []
    while True:
        p_new = pool[next_new]
        eps_new = critical_epsilon(p_new, 1)
        if heap and -heap[0][0] > eps_new:
            _, p, k = heapq.heappop(heap)
        else:
            p, k = p_new, 1
            next_new += 1
        log_n += math.log(p)
        if log_n > limit_log * (1 + 1e-15):
            return out
        exps[p] = k
        heapq.heappush(heap, (-critical_epsilon(p, k + 1), p, k + 1))
        out.append(PrimorialNumber.from_factors(sorted(exps.items())))


def _log_inv_totient_fixed(primes: np.ndarray) -> int:
    return exact_sum(-np.log1p(-1.0 / primes.astype(np.float64)))


def totient_ratio(n: PrimorialNumber) -> float:
    """N / phi(N) = prod (1 - 1/p)^-1; depends only on the radical."""
    return ExtendedReal.from_fixed(_log_inv_totient_fixed(n.primes)).exp()


def sigma_ratio(n: PrimorialNumber) -> float:
    """sigma(N)/N = (N/phi(N)) prod (1 - p^-(a+1))."""
    p = n.primes.astype(np.float64)
    a = np.array([e for _, e in n.factors], dtype=np.float64)
    corr = exact_sum(np.log1p(-(p ** -(a + 1))))
    return ExtendedReal.from_fixed(_log_inv_totient_fixed(n.primes) + corr).exp()


@dataclass(frozen=True)
class Cor8Result:
    lhs: float
    rhs: float
    holds: bool
    p_k_over_log_n: float
    loglog_c0n: float


def corollary8_check(n: PrimorialNumber, c0: float = 1.0) -> Cor8Result:
    """N/phi(N) > e^gamma log log N, plus the p_k / log N diagnostic."""
    log_n = float(n.log_n)
    if not log_n > 1:
        raise DomainError("need log N > 1")
    lhs = totient_ratio(n)
    rhs = constants().e_gamma * math.log(log_n)
    return Cor8Result(lhs, rhs, lhs > rhs, n.p_k / log_n, math.log(log_n + math.log(c0)))


def primorial_sweep(k_max: int) -> list[Cor8Result]:
    """corollary8_check for primorial(k), k = 2..k_max, in one pass.

    Prefix sums of exact per-prime terms reproduce ``primorial(k)`` and
    ``totient_ratio`` bit for bit.
    """
    if not 2 <= k_max <= MAX_PRIMORIAL_K:
        raise DomainError(f"k_max must lie in [2, {MAX_PRIMORIAL_K}]")
    ps = first_primes(k_max)
    pf = ps.astype(np.float64)
    logs = [exact_sum(np.array([v])) for v in np.log(pf).tolist()]
    invs = [exact_sum(np.array([v])) for v in (-np.log1p(-1.0 / pf)).tolist()]
    e_gamma = constants().e_gamma
    out = []
    log_acc, inv_acc = 0, 0
    for k in range(k_max):
        log_acc += logs[k]
        inv_acc += invs[k]
        if k == 0:
            continue
        log_n = float(ExtendedReal.from_fixed(log_acc))
        lhs = ExtendedReal.from_fixed(inv_acc).exp()
        rhs = e_gamma * math.log(log_n)
        out.append(Cor8Result(lhs, rhs, lhs > rhs, int(ps[k]) / log_n, math.log(log_n)))
    return out
