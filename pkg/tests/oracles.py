"""Independent reference implementations used only by the tests.

Nothing here shares code with the package: primes come from trial division,
sums from math.fsum or exact fractions, li from Simpson's rule.
"""

from __future__ import annotations

import math
from fractions import Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def trial_primes(n: int) -> list[int]:
    """Primes <= n by trial division against the primes found so far."""
    out = []
    for k in range(2, n + 1):
        r = math.isqrt(k)
        for p in out:
            if p > r:
                out.append(k)
                break
            if k % p == 0:
                break
        else:
            out.append(k)
    return out


def von_mangoldt_sum(n: int) -> float:
    """psi(n) straight from the definition of Lambda."""
    terms = []
    for p in trial_primes(n):
        q = p
        while q <= n:
            terms.append(math.log(p))
            q *= p
    return math.fsum(terms)


def naive_sums(n: int) -> dict[str, float]:
    ps = trial_primes(n)
    prod = Fraction(1)
    for p in ps:
        prod *= Fraction(p, p - 1)
    return {
        "pi": len(ps),
        "recip": math.fsum(1 / p for p in ps),
        "theta": math.fsum(math.log(p) for p in ps),
        "psi": von_mangoldt_sum(n),
        "logp_over_p": math.fsum(math.log(p) / p for p in ps),
        "product_i": float(prod),
    }


def simpson_li(x: float, n: int = 20000) -> float:
    """li(x) - li(2) by Simpson in u = log t, Richardson-refined."""

    def simpson(m):
        a, b = math.log(2.0), math.log(x)
        h = (b - a) / m
        f = lambda u: math.exp(u) / u  # noqa: E731
        s = f(a) + f(b)
        s += 4 * math.fsum(f(a + (2 * k - 1) * h) for k in range(1, m // 2 + 1))
        s += 2 * math.fsum(f(a + 2 * k * h) for k in range(1, m // 2))
        return s * h / 3

    s1, s2 = simpson(n), simpson(2 * n)
    return s2 + (s2 - s1) / 15


def sigma(n: int) -> int:
    """Divisor sum by direct enumeration."""
    total = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            total += d
            if d * d != n:
                total += n // d
    return total


def colossally_abundant_oracle(limit: int) -> list[int]:
    """CA numbers <= limit: vertices of the upper concave hull of
    (log n, log sigma(n)/n) with positive slope, found by brute force over
    all n up to ``20 * limit``."""
    import numpy as np

    top = 20 * limit
    sig = np.zeros(top + 1, dtype=np.int64)
    for d in range(1, top + 1):
        sig[d::d] += d
    # keep running records of sigma(n)/n first; hull vertices are among them
    best = 0.0
    cand = []
    for n in range(1, top + 1):
        r = sig[n] / n
        if r > best:
            best = r
            cand.append((math.log(n), math.log(r), n))
    hull = []
    for pt in cand:
        while len(hull) >= 2:
            (x1, y1, _), (x2, y2, _) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [n for _, _, n in hull if 1 < n <= limit]
