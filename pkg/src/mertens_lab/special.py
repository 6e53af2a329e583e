"""Scalar special functions, constants and error-term envelopes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numerics import ExtendedReal, exact_sum
from .sieve import check_cap


class DomainError(ValueError):
    """Argument outside the supported domain of a function."""


class UnknownKindError(ValueError):
    pass


# B_2, B_4, ..., B_14
_BERNOULLI = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def log_integral(x: float) -> float:
    """li(x) = integral of dt/log t from 2 to x (offset convention).

    Composite 16-point Gauss-Legendre on geometrically spaced panels in t
    (ratio at most e per panel), doubled until two successive refinements
    agree.  Working in t rather than u = log t keeps the endpoint x exact;
    rounding log x would cost about ulp(log x) * x / log x.
    """
    if not x >= 2:
        raise DomainError(f"li(x) needs x >= 2, got {x}")
    if x == 2:
        return 0.0
    panels = max(1, math.ceil(math.log(x / 2.0)))
    prev = _gl_composite(x, panels)
    while True:
        panels *= 2
        cur = _gl_composite(x, panels)
        if abs(cur - prev) <= max(1e-12, 4e-16 * abs(cur)) or panels > 1 << 14:
            return cur
        prev = cur


def _gl_composite(x: float, panels: int) -> float:
    edges = np.geomspace(2.0, x, panels + 1)
    edges[0], edges[-1] = 2.0, x
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = (half[:, None] * _GL_WEIGHTS[None, :]) / np.log(t)
    return math.fsum(vals.ravel().tolist())


def _zeta_tail(s: float, n0: int) -> float:
    # Euler-Maclaurin remainder of sum_{n >= n0} n^-s
    terms = [n0 ** (1 - s) / (s - 1), 0.5 * n0**-s]
    rising = s
    fact = 2
    for k, b in enumerate(_BERNOULLI, start=1):
        terms.append(float(b) / fact * rising * n0 ** (-s - 2 * k + 1))
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    return math.fsum(terms)


def zeta_minus_one(s: float) -> float:
    """zeta(s) - 1 without cancellation, for real s >= 1.5."""
    if not s >= 1.5:
        raise DomainError(f"zeta needs s >= 1.5, got {s}")
    n0 = 16
    head = [n**-s for n in range(2, n0)]
    return math.fsum(head + [_zeta_tail(s, n0)])


def zeta_real(s: float) -> float:
    """Riemann zeta at real s >= 1.5 (direct sum plus Euler-Maclaurin tail)."""
    return 1.0 + zeta_minus_one(s)


def mobius(n: int) -> int:
    if not 1 <= n <= 10**6:
        raise DomainError("mobius is defined here for 1 <= n <= 1e6")
    sign = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            sign = -sign
        d += 1 if d == 2 else 2
    if n > 1:
        sign = -sign
    return sign


def prime_zeta(s: float) -> float:
    """Prime zeta sum_p p^-s via sum_n mu(n)/n * log zeta(ns)."""
    if not s >= 1.5:
        raise DomainError(f"prime zeta needs s >= 1.5, got {s}")
    terms = []
    n = 1
    while True:
        zm1 = zeta_minus_one(n * s)
        if zm1 <= 1e-16:
            break
        mu = mobius(n)
        if mu:
            terms.append(mu / n * math.log1p(zm1))
        n += 1
    return math.fsum(terms)


def _harmonic_exact(n: int) -> int:
    """Exact fixed-point sum of the float64 values 1/k, k = 1..n."""
    total = 0
    step = 1 << 21
    for lo in range(1, n + 1, step):
        k = np.arange(lo, min(lo + step, n + 1), dtype=np.float64)
        total += exact_sum(1.0 / k)
    return total


def euler_gamma_partial(x: float) -> float:
    """H(floor x) - log x, accumulated exactly; tends to gamma like 1/(2x)."""
    if not x >= 2:
        raise DomainError("x must be >= 2")
    check_cap(x)
    h = ExtendedReal.from_fixed(_harmonic_exact(math.floor(x)))
    return float(h - math.log(x))


def gamma_tail_correction(x: float) -> float:
    """Asymptotic value of H(x) - log x - gamma at integer x (leading terms)."""
    return 1.0 / (2 * x) - 1.0 / (12 * x * x) + 1.0 / (120 * x**4)


def meissel_mertens_partial(x: float) -> float:
    """gamma + sum_{p <= x} [log(1 - 1/p) + 1/p]."""
    from .streaming import snapshot

    if not x >= 2:
        raise DomainError("x must be >= 2")
    snap = snapshot(x)
    return float(snap.sum_recip_p - snap.log_prod_minus + constants().gamma)


@dataclass(frozen=True)
class Constants:
    gamma: float
    B1: float
    e_gamma: float
    mertens_plus: float


def _gamma_euler_maclaurin(n: int = 100) -> float:
    h = sum(Fraction(1, k) for k in range(1, n + 1))
    corr = Fraction(-1, 2 * n)
    for k, b in enumerate(_BERNOULLI[:5], start=1):
        corr += b / (2 * k) / Fraction(n) ** (2 * k)
    return float(h + corr) - math.log(n)


@lru_cache(maxsize=1)
def constants() -> Constants:
    """Constants for everyday use: Euler-Maclaurin gamma, prime-zeta B1.

    ``B1 = gamma - sum_{k >= 2} P(k)/k`` with P the prime zeta function,
    which converges geometrically.
    """
    gamma = _gamma_euler_maclaurin()
    tail = []
    k = 2
    while True:
        pk = prime_zeta(k)
        tail.append(pk / k)
        if pk < 1e-18:
            break
        k += 1
    b1 = gamma - math.fsum(tail)
    e_gamma = math.exp(gamma)
    return Constants(gamma, b1, e_gamma, 6 * e_gamma / math.pi**2)


def direct_constants(gamma_x: float = 1e9, b1_x: float = 1e8) -> Constants:
    """Brute-force route: harmonic partial sum to ``gamma_x`` with its tail
    model, and the prime series for B1 over ``p <= b1_x``."""
    gamma = euler_gamma_partial(gamma_x) - gamma_tail_correction(math.floor(gamma_x))
    from .streaming import snapshot

    snap = snapshot(b1_x)
    b1 = float(snap.sum_recip_p - snap.log_prod_minus + gamma)
    e_gamma = math.exp(gamma)
    return Constants(gamma, b1, e_gamma, 6 * e_gamma / math.pi**2)


KOROBOV_CONSTANT = 0.2098


def korobov_envelope(x: float) -> float:
    """exp(-c (log x)^(3/5) (log log x)^(-1/5)) with c = 0.2098."""
    if not x >= 16:
        raise DomainError("envelope needs x >= 16")
    lx = math.log(x)
    return math.exp(-KOROBOV_CONSTANT * lx**0.6 * math.log(lx) ** -0.2)


def rh_envelope(x: float, kind: str) -> float:
    """RH-scale envelope: x^-1/2 log x (sums), x^-1/2 logloglog x / log x (products)."""
    if not x >= 16:
        raise DomainError("envelope needs x >= 16")
    lx = math.log(x)
    if kind == "sum":
        return lx / math.sqrt(x)
    if kind == "product":
        return math.log(math.log(lx)) / lx / math.sqrt(x)
    raise UnknownKindError(f"unknown envelope kind {kind!r}")
