"""Finite sums and products over primes, and their residuals against the
classical main terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .numerics import ExtendedReal, exact_sum, two_prod, two_sum
from .sieve import SieveConfig, check_cap, iter_prime_blocks, small_primes
from .special import (
    DomainError,
    constants,
    korobov_envelope,
    log_integral,
    rh_envelope,
)
from .streaming import SumSnapshot, psi_correction_fixed, snapshot, snapshots


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class ResidualPoint:
    x: float
    statistic: str
    empirical: float
    main_term: float
    residual: float
    korobov: float
    rh: float
    scaled: float | None = None


def _require(x: float, lower: float = 2) -> None:
    if not x >= lower:
        raise DomainError(f"x must be >= {lower}, got {x}")
    check_cap(x)


def _fold(x: float, term_fn: Callable[[np.ndarray], tuple[np.ndarray, ...]], n_out: int, shift: int = 0) -> list[int]:
    """Exact sums of ``term_fn(primes)`` components over all primes <= x.

    ``shift`` scales terms by 2**-shift before summation (for large terms).
    """
    totals = [0] * n_out
    scale = 2.0**-shift
    for _, _, primes in iter_prime_blocks(2, math.floor(x)):
        if not len(primes):
            continue
        for i, t in enumerate(term_fn(primes)):
            totals[i] += exact_sum(t * scale if shift else t)
    return totals


def _to_float(n: int, shift: int = 0) -> float:
    return math.ldexp(float(ExtendedReal.from_fixed(n)), shift)


# --- streamed sums --------------------------------------------------------


def reciprocal_prime_sum(x: float) -> float:
    """sum_{p <= x} 1/p."""
    _require(x)
    return float(snapshot(x).sum_recip_p)


def chebyshev_theta(x: float) -> float:
    _require(x)
    return float(snapshot(x).theta)


def chebyshev_psi(x: float) -> float:
    """psi(x) assembled as sum_{v >= 1} theta(x^(1/v))."""
    _require(x)
    return float(snapshot(x).psi)


def logp_over_p_sum(x: float) -> float:
    _require(x)
    return float(snapshot(x).sum_logp_over_p)


def psi_minus_theta_fixed(x: float) -> int:
    return psi_correction_fixed(math.floor(x))


# --- residuals -------------------------------------------------------------


def _envelopes(x: float, kind: str, scale: float = 1.0) -> tuple[float, float]:
    if x < 16:
        return math.nan, math.nan
    return scale * korobov_envelope(x), scale * rh_envelope(x, kind)


def mertens_sum_residual(x: float) -> ResidualPoint:
    """sum 1/p against log log x + B1; ``scaled`` is x^1/2 log x * residual."""
    _require(x, 16)
    emp = reciprocal_prime_sum(x)
    main = math.log(math.log(x)) + constants().B1
    res = emp - main
    k, r = _envelopes(x, "sum")
    return ResidualPoint(x, "mertens_sum", emp, main, res, k, r, math.sqrt(x) * math.log(x) * res)


@dataclass(frozen=True)
class MertensProducts:
    """The four products over p <= x, with their shared log-space sums.

    inv_minus = prod (1 - 1/p)^-1, minus = prod (1 - 1/p),
    inv_plus = prod (1 + 1/p)^-1, plus = prod (1 + 1/p).
    """

    x: float
    log_minus: ExtendedReal  # sum -log(1 - 1/p)
    log_plus: ExtendedReal  # sum log(1 + 1/p)
    inv_minus: float
    minus: float
    inv_plus: float
    plus: float


def products_from_snapshot(s: SumSnapshot) -> MertensProducts:
    lm, lp = s.log_prod_minus, s.log_prod_plus
    return MertensProducts(s.x, lm, lp, lm.exp(), (-lm).exp(), (-lp).exp(), lp.exp())


def mertens_products(x: float) -> MertensProducts:
    _require(x)
    return products_from_snapshot(snapshot(x))


def mertens_product_residual(x: float) -> ResidualPoint:
    """prod (1 - 1/p)^-1 against e^gamma log x; ``scaled`` is x^1/2 * residual."""
    _require(x, 16)
    emp = mertens_products(x).inv_minus
    main = constants().e_gamma * math.log(x)
    res = emp - main
    k, r = _envelopes(x, "product")
    return ResidualPoint(x, "mertens_product", emp, main, res, k, r, math.sqrt(x) * res)


def pi_minus_li(x: float) -> ResidualPoint:
    _require(x, 16)
    emp = float(snapshot(x).pi)
    main = log_integral(x)
    k, r = _envelopes(x, "sum", x)
    return ResidualPoint(x, "pi_li", emp, main, emp - main, k, r)


# --- sums with their own pass over the primes ------------------------------


def fractional_part_sum(x: float) -> float:
    """sum_{p <= x} ((x/p)) log p with ((t)) = t - floor(t)."""
    _require(x)
    n = math.floor(x)
    frac = x - n

    def terms(p):
        return (((n % p).astype(np.float64) + frac) / p * np.log(p.astype(np.float64)),)

    (total,) = _fold(x, terms, 1)
    return _to_float(total)


def ap_prime_recip_sum(x: float, a: int, q: int) -> tuple[float, float]:
    """sum of 1/p over p <= x, p = a (mod q); returns (sum, B_aq estimate)."""
    _require(x)
    if not 1 <= a <= q <= 10**4:
        raise DomainError("need 1 <= a <= q <= 1e4")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) != 1")
    total = ap_recip_fixed(x, a, q)
    s = _to_float(total)
    b_est = s - math.log(math.log(x)) / _phi(q) if x > math.e else math.nan
    return s, b_est


def ap_recip_fixed(x: float, a: int, q: int) -> int:
    def terms(p):
        sel = p[p % q == a % q]
        return (1.0 / sel.astype(np.float64),)

    return _fold(x, terms, 1)[0]


def _phi(q: int) -> int:
    out, n, d = q, q, 2
    while d * d <= n:
        if n % d == 0:
            while n % d == 0:
                n //= d
            out -= out // d
        d += 1
    if n > 1:
        out -= out // n
    return out


def prime_harmonic(s_re: float, s_im: float, x: float) -> ComplexValue:
    """sum_{p <= x} p^-s for complex s = s_re + i s_im, s_re != 1."""
    _require(x)
    if s_re == 1:
        raise DomainError("Re(s) = 1: use reciprocal_prime_sum for s = 1")
    # largest |term| is x^-s_re when s_re < 0
    shift = max(0, math.ceil(-s_re * math.log2(x)) + 1) if s_re < 0 else 0

    def terms(p):
        lp = np.log(p.astype(np.float64))
        mag = np.exp(-s_re * lp)
        if s_im == 0:
            return mag, np.zeros_like(mag)
        ang = -s_im * lp
        return mag * np.cos(ang), mag * np.sin(ang)

    re, im = _fold(x, terms, 2, shift)
    return ComplexValue(_to_float(re, shift), _to_float(im, shift))


def stirling_cross_check(x: int) -> dict[str, float]:
    """log x! from Legendre's prime decomposition vs the Stirling series."""
    if not (isinstance(x, (int, np.integer)) and 10 <= x <= 10**7):
        raise DomainError("x must be an integer in [10, 1e7]")
    x = int(x)
    p = small_primes(x)
    v = np.zeros(len(p), dtype=np.int64)
    pk = p.copy()
    while True:
        live = pk <= x
        if not live.any():
            break
        v[live] += x // pk[live]
        with np.errstate(over="ignore"):
            pk = np.where(live, pk * p, x + 1)
    lhs = math.fsum((v * np.log(p.astype(np.float64))).tolist())
    xf = float(x)
    rhs = math.fsum(
        [
            (xf + 0.5) * math.log(xf),
            -xf,
            0.5 * math.log(2 * math.pi),
            1 / (12 * xf),
            -1 / (360 * xf**3),
            1 / (1260 * xf**5),
            -1 / (1680 * xf**7),
        ]
    )
    return {"lhs": lhs, "rhs": rhs, "gap": lhs - rhs}


# --- twisted theta ----------------------------------------------------------


def _pi_fixed(bits: int) -> int:
    """floor(pi * 2**bits) via Machin's formula in integer arithmetic."""
    guard = bits + 20
    one = 1 << guard

    def arctan_inv(m: int) -> int:
        total = term = one // m
        m2 = m * m
        k = 1
        while term:
            term //= m2
            k += 2
            total += -(term // k) if (k // 2) % 2 else term // k
        return total

    return (4 * (4 * arctan_inv(5) - arctan_inv(239))) >> 20


def _two_pi_parts(n_parts: int = 5, part_bits: int = 20) -> list[float]:
    """2*pi as a sum of doubles with ``part_bits`` significant bits each."""
    prec = 2 + n_parts * part_bits + 8
    rest = Fraction(2 * _pi_fixed(prec), 1 << prec)
    parts = []
    for _ in range(n_parts):
        e = math.frexp(float(rest))[1]
        q = math.floor(rest * 2 ** (part_bits - e)) if rest > 0 else math.ceil(rest * 2 ** (part_bits - e))
        part = math.ldexp(q, e - part_bits)
        parts.append(part)
        rest -= Fraction(part)
    return parts


_TWO_PI_PARTS = _two_pi_parts()
_TWO_PI_FRAC = Fraction(2 * _pi_fixed(200), 1 << 200)


def _reduce_alpha(alpha: float) -> tuple[float, float]:
    """alpha - 2 pi m in [-pi, pi] as a double-double."""
    a = Fraction(alpha)
    m = round(a / _TWO_PI_FRAC)
    r = a - m * _TWO_PI_FRAC
    hi = float(r)
    return hi, float(r - Fraction(hi))


def reduced_phase(alpha: float, p: np.ndarray) -> np.ndarray:
    """alpha * p reduced into about [-pi, pi], phase error ~1e-15 for p <= 1e10."""
    a_hi, a_lo = _reduce_alpha(alpha)
    pf = p.astype(np.float64)
    h, l = two_prod(a_hi, pf)
    l = l + a_lo * pf
    c1, c2, c3, c4, c5 = _TWO_PI_PARTS
    k = np.rint(h / (c1 + c2))
    s = h - k * c1  # exact: k < 2**33 and c1 has 20 bits
    s, e = two_sum(s, -k * c2)
    s, e2 = two_sum(s, -k * c3)
    return s + (e + e2 + l - k * c4 - k * c5)


def twisted_theta(alpha: float, x: float) -> ComplexValue:
    """sum_{p <= x} e^(i alpha p) log p."""
    _require(x)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be finite")

    def terms(p):
        lp = np.log(p.astype(np.float64))
        if alpha == 0:
            return lp, np.zeros_like(lp)
        ph = reduced_phase(alpha, p)
        return np.cos(ph) * lp, np.sin(ph) * lp

    re, im = _fold(x, terms, 2)
    return ComplexValue(_to_float(re), _to_float(im))


# --- statistics table used by scans and the CLI ------------------------------

STATISTICS = ("pi_li", "mertens_sum", "mertens_product", "theta", "logp_over_p", "frac_sum")


def residual_from_snapshot(stat: str, x: float, s: SumSnapshot) -> ResidualPoint:
    """ResidualPoint for ``stat`` at real x from an existing snapshot of floor(x)."""
    g = constants()
    lx = math.log(x)
    if stat == "pi_li":
        emp, main = float(s.pi), log_integral(x)
        k, r = _envelopes(x, "sum", x)
    elif stat == "mertens_sum":
        emp, main = float(s.sum_recip_p), math.log(lx) + g.B1
        k, r = _envelopes(x, "sum")
    elif stat == "mertens_product":
        emp, main = s.log_prod_minus.exp(), g.e_gamma * lx
        k, r = _envelopes(x, "product")
    elif stat == "theta":
        emp, main = float(s.theta), x
        k, r = _envelopes(x, "sum", x * lx)
    elif stat == "logp_over_p":
        # c0 is left inside the residual
        emp, main = float(s.sum_logp_over_p), lx
        k, r = _envelopes(x, "sum")
    elif stat == "frac_sum":
        # main term (1 - c0) x with c0 estimated as log x - sum log p / p
        emp = fractional_part_sum(x)
        main = x * (1.0 - (lx - float(s.sum_logp_over_p)))
        k, r = _envelopes(x, "sum", x)
    else:
        raise ValueError(f"unknown statistic {stat!r}; choose from {', '.join(STATISTICS)}")
    return ResidualPoint(x, stat, emp, main, emp - main, k, r)


def residual_points(stat: str, xs: list[float], config: SieveConfig | None = None) -> list[ResidualPoint]:
    snaps = snapshots(xs, config)
    return [residual_from_snapshot(stat, x, s) for x, s in zip(xs, snaps)]
