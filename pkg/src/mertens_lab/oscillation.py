"""Cramér-model sequences, the gap-bias product comparison, and residual scans.

A Cramér sequence keeps each integer n >= 3 with probability 1/log n, then a
greedy left-to-right repair pulls it into the admissible band: consecutive
gaps in [2, max(2, ceil(C log^2 c))] and |c_n - p_n| <= D log^2 p_n.  The
first two terms are pinned to 2, 3 (the only prime gap below 2).

Biased variants pair the n-th sampled gap with the n-th prime gap: ``short``
takes the minimum, ``long`` the maximum, each clipped back into the band.
Starting from the same 2, 3 this forces c_n <= p_n (short) or c_n >= p_n
(long) for every n, which is what makes P_long <= P <= P_short hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import exact_sum, ExtendedReal
from .prime_sums import ResidualPoint, residual_points, STATISTICS
from .sieve import SieveConfig, primes_in_range
from .special import DomainError, constants

PRNG_ID = "splitmix64-counter"
BIASES = ("none", "short", "long")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class ConstraintInfeasibleError(RuntimeError):
    def __init__(self, index: int, detail: str = ""):
        super().__init__(f"cannot satisfy gap/drift bounds at index {index}{': ' + detail if detail else ''}")
        self.index = index


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """The ``counters``-th outputs of SplitMix64 started at ``seed`` (uint64)."""
    state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + counters.astype(np.uint64) * _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of each counter's output."""
    return (splitmix64(seed, counters) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class CramerParams:
    x_max: float
    seed: int = 0
    bias: str = "none"
    gap_cap_constant: float = 1.0
    drift_constant: float = 2.0

    def __post_init__(self):
        if self.bias not in BIASES:
            raise ValueError(f"bias must be one of {BIASES}")
        if not self.gap_cap_constant > 0 or not self.drift_constant > 0:
            raise ValueError("gap_cap_constant and drift_constant must be > 0")
        if not self.x_max >= 3:
            raise ValueError("x_max must be >= 3")


@dataclass
class CramerSequence:
    values: np.ndarray
    params: CramerParams
    prng: str = field(default=PRNG_ID)

    def check(self, primes: np.ndarray | None = None) -> None:
        """Raise AssertionError if any type invariant is violated."""
        v = self.values
        c_, d_ = self.params.gap_cap_constant, self.params.drift_constant
        assert v[0] == 2 and v[1] == 3
        assert v[-1] <= self.params.x_max
        gaps = np.diff(v)[1:]
        caps = np.maximum(2, np.ceil(c_ * np.log(v[1:-1].astype(float)) ** 2))
        assert (gaps >= 2).all() and (gaps <= caps).all(), "gap bound"
        if primes is None:
            primes = primes_in_range(2, _prime_horizon(self.params))
        p = primes[: len(v)].astype(float)
        assert (np.abs(v - p) <= d_ * np.log(p) ** 2 + 1e-9).all(), "drift bound"


def _cap(c: int, const: float) -> int:
    return max(2, math.ceil(const * math.log(c) ** 2))


def _prime_horizon(params: CramerParams) -> int:
    lx = math.log(params.x_max)
    return math.floor(params.x_max + 4 * (params.gap_cap_constant + params.drift_constant) * lx * lx + 100)


def _samples(seed: int, lo: int, hi: int) -> np.ndarray:
    out = []
    step = 1 << 20
    for a in range(lo, hi + 1, step):
        n = np.arange(a, min(a + step, hi + 1), dtype=np.int64)
        keep = uniforms(seed, n) < 1.0 / np.log(n.astype(np.float64))
        out.append(n[keep])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _walk_unbiased(params: CramerParams, primes: list[int], limit: int) -> list[int]:
    samples = _samples(params.seed, 4, limit + 1).tolist()
    cc, dd = params.gap_cap_constant, params.drift_constant
    c = [2, 3]
    si, ns = 0, len(samples)
    j = 2
    while j < len(primes):
        prev = c[-1]
        pj = primes[j]
        w = dd * math.log(pj) ** 2
        lo = max(prev + 2, math.ceil(pj - w))
        hi = min(prev + _cap(prev, cc), math.floor(pj + w))
        if lo > hi:
            raise ConstraintInfeasibleError(j + 1)
        while si < ns and samples[si] < prev + 2:
            si += 1
        s = samples[si] if si < ns else hi
        nxt = min(max(s, lo), hi)
        if nxt > limit:
            break
        c.append(nxt)
        j += 1
    return c


def _walk_biased(params: CramerParams, primes: list[int], gaps: list[int], limit: int) -> list[int]:
    cc, dd = params.gap_cap_constant, params.drift_constant
    short = params.bias == "short"
    c = [2, 3]
    j = 1  # gap index: c[j] -> c[j + 1]
    while j + 1 < len(primes):
        prev = c[-1]
        pg = primes[j + 1] - primes[j]
        g = gaps[j] if j < len(gaps) else pg
        pn = primes[j + 1]
        w = dd * math.log(pn) ** 2
        lo = max(2, math.ceil(pn - w) - prev)
        hi = min(_cap(prev, cc), math.floor(pn + w) - prev)
        if short:
            want, hi = min(g, pg), min(hi, pg)
        else:
            want, lo = max(g, pg), max(lo, pg)
        if lo > hi:
            raise ConstraintInfeasibleError(j + 2, f"{params.bias} bias")
        nxt = prev + min(max(want, lo), hi)
        if nxt > limit:
            break
        c.append(nxt)
        j += 1
    return c


def cramer_sequence(params: CramerParams, primes: np.ndarray | None = None) -> CramerSequence:
    """Deterministic in (seed, bias, C, D, x_max)."""
    horizon = _prime_horizon(params)
    if primes is None or (len(primes) and primes[-1] < horizon):
        primes = primes_in_range(2, horizon)
    plist = primes.tolist()
    limit = math.floor(params.x_max)
    if params.bias == "none":
        vals = _walk_unbiased(params, plist, limit)
    else:
        # sampled gaps come from the unbiased walk run a little past x_max
        ext = _walk_unbiased(params, plist, plist[-1])
        gaps = np.diff(ext).tolist()
        vals = _walk_biased(params, plist, gaps, limit)
    return CramerSequence(np.array(vals, dtype=np.int64), params)


def log_product_fixed(values: np.ndarray) -> int:
    """Exact sum of -log(1 - 1/c), same terms as the prime accumulators."""
    v = values.astype(np.float64)
    return exact_sum(-np.log1p(-1.0 / v))


def sequence_product(seq: CramerSequence) -> float:
    """(log x)^-1 prod_{c in seq} (1 - 1/c)^-1 with x = params.x_max."""
    if len(seq.values) == 0:
        raise ValueError("empty sequence")
    return _normalised_product(log_product_fixed(seq.values), seq.params.x_max)


def _normalised_product(log_fixed: int, x: float) -> float:
    return ExtendedReal.from_fixed(log_fixed).exp() / math.log(x)


@dataclass(frozen=True)
class ProductComparison:
    P: float
    P_short: float
    P_long: float
    ok: bool


def compare_products(primes: np.ndarray, short: np.ndarray, long: np.ndarray, x: float) -> ProductComparison:
    p = _normalised_product(log_product_fixed(primes), x)
    ps = _normalised_product(log_product_fixed(short), x)
    pl = _normalised_product(log_product_fixed(long), x)
    return ProductComparison(p, ps, pl, pl <= p <= ps)


def product_comparison(x_max: float, seed: int, gap_cap_constant: float = 1.0, drift_constant: float = 2.0) -> ProductComparison:
    """P from the primes against P_short / P_long from biased sequences."""
    if not 1e3 <= x_max <= 1e8:
        raise DomainError("x_max must lie in [1e3, 1e8]")
    base = CramerParams(x_max, seed, "none", gap_cap_constant, drift_constant)
    primes = primes_in_range(2, _prime_horizon(base))
    seqs = {}
    for bias in ("short", "long"):
        params = CramerParams(x_max, seed, bias, gap_cap_constant, drift_constant)
        seqs[bias] = cramer_sequence(params, primes).values
    return compare_products(primes[primes <= x_max], seqs["short"], seqs["long"], x_max)


def thm1_statistic(values: np.ndarray, x: float) -> float:
    """x^1/2 (prod (1 - 1/c)^-1 - e^gamma log x) over the given sequence."""
    prod = ExtendedReal.from_fixed(log_product_fixed(values)).exp()
    return math.sqrt(x) * (prod - constants().e_gamma * math.log(x))


def sign(v: float) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class SignRecord:
    seed: int
    residual: float
    sign: int


def cramer_residual_signs(x_max: float, seeds: list[int], gap_cap_constant: float = 1.0, drift_constant: float = 2.0) -> list[SignRecord]:
    if not 1e4 <= x_max <= 1e7:
        raise DomainError("x_max must lie in [1e4, 1e7]")
    if len(seeds) < 2:
        raise DomainError("need at least two seeds")
    horizon = _prime_horizon(CramerParams(x_max, 0, "none", gap_cap_constant, drift_constant))
    primes = primes_in_range(2, horizon)
    out = []
    for s in seeds:
        seq = cramer_sequence(CramerParams(x_max, s, "none", gap_cap_constant, drift_constant), primes)
        r = thm1_statistic(seq.values, x_max)
        out.append(SignRecord(s, r, sign(r)))
    return out


# --- residual scans -------------------------------------------------------


def count_sign_changes(residuals) -> int:
    """Adjacent sign flips; an exact zero inherits the previous sign."""
    changes, last = 0, 0
    for r in residuals:
        s = sign(r)
        if s == 0:
            continue
        if last and s != last:
            changes += 1
        last = s
    return changes


@dataclass(frozen=True)
class ScanSeries:
    statistic: str
    checkpoints: list[ResidualPoint]
    sign_changes: int


def log_grid(x_from: float, x_to: float, points: int) -> list[float]:
    if points == 2:
        return [x_from, x_to]
    a, b = math.log(x_from), math.log(x_to)
    xs = [math.exp(a + (b - a) * k / (points - 1)) for k in range(points)]
    xs[0], xs[-1] = x_from, x_to
    return xs


def residual_scan(statistic: str, x_from: float, x_to: float, points: int, config: SieveConfig | None = None) -> ScanSeries:
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {', '.join(STATISTICS)}")
    if not 16 <= x_from < x_to:
        raise DomainError("need 16 <= x_from < x_to")
    if not 2 <= points <= 10**4:
        raise DomainError("points must lie in [2, 1e4]")
    xs = log_grid(x_from, x_to, points)
    pts = residual_points(statistic, xs, config)
    return ScanSeries(statistic, pts, count_sign_changes(p.residual for p in pts))
