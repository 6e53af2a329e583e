import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mertens_lab.abundant import (
    PrimorialNumber,
    ca_exponent,
    colossally_abundant,
    corollary8_check,
    critical_epsilon,
    primorial,
    primorial_sweep,
    sigma_ratio,
    totient_ratio,
)
from mertens_lab.prime_sums import mertens_products
from mertens_lab.special import DomainError, constants

from oracles import colossally_abundant_oracle, sigma

CA_PREFIX = [2, 6, 12, 60, 120, 360, 2520, 5040, 55440]  # brute-force hull oracle, frozen


def test_primorial():
    assert primorial(4).value() == 210
    assert primorial(1).value() == 2
    assert abs(float(primorial(4).log_n) - 5.347108) < 1e-6
    primorial(1000).check()
    with pytest.raises(DomainError):
        primorial(0)


def test_ca_prefix_matches_oracle():
    got = [n.value() for n in colossally_abundant(math.log(1e5))]
    assert got == CA_PREFIX == colossally_abundant_oracle(10**5)


def test_ca_structure():
    seq = colossally_abundant(50)
    for n in seq:
        n.check()
    logs = [float(n.log_n) for n in seq]
    assert all(a < b for a, b in zip(logs, logs[1:]))
    assert logs[-1] <= 50
    with pytest.raises(DomainError):
        colossally_abundant(51)


def test_ca_exponents_follow_epsilon_formula():
    from mertens_lab.sieve import small_primes

    seq = colossally_abundant(40)
    crit = sorted((critical_epsilon(p, k) for p in small_primes(200).tolist() for k in range(1, 40)), reverse=True)
    for n, hi, lo in zip(seq, crit, crit[1:]):
        eps = 0.5 * (hi + lo)
        for p, e in n.factors:
            assert ca_exponent(p, eps) == e
        nxt = n.p_k + 1
        while not all(nxt % q for q in range(2, nxt)):
            nxt += 1
        assert ca_exponent(nxt, eps) == 0


def test_ca_are_sigma_records():
    seq = [n for n in colossally_abundant(math.log(1e5))]
    best = 0.0
    for n in range(1, 10**5 + 1):
        r = sigma(n) / n if n in {m.value() for m in seq} else None
        if r is not None:
            assert r > best
            best = r
    for n in seq:
        v = n.value()
        assert abs(sigma_ratio(n) - sigma(v) / v) < 1e-13


def test_ratios():
    p4 = primorial(4)
    assert abs(totient_ratio(p4) - 4.375) < 1e-14
    two = PrimorialNumber.from_factors([(2, 1)])
    four = PrimorialNumber.from_factors([(2, 2)])
    assert totient_ratio(two) == totient_ratio(four) == 2
    assert sigma_ratio(two) == 1.5
    assert abs(sigma_ratio(PrimorialNumber.from_factors([(2, 1), (3, 1)])) - 2) < 1e-15
    n2520 = PrimorialNumber.from_factors([(2, 3), (3, 2), (5, 1), (7, 1)])
    assert abs(sigma_ratio(n2520) - sigma(2520) / 2520) < 1e-14


@given(st.lists(st.integers(1, 6), min_size=1, max_size=12).map(lambda v: sorted(v, reverse=True)))
def test_exponent_invariance_and_sigma_below_totient(exps):
    from mertens_lab.sieve import small_primes

    ps = small_primes(50)[: len(exps)].tolist()
    n = PrimorialNumber.from_factors(zip(ps, exps))
    assert totient_ratio(n) == totient_ratio(primorial(len(exps)))
    assert sigma_ratio(n) < totient_ratio(n)


def test_totient_ratio_matches_streamed_product():
    for k in (10, 1000, 50_000):
        n = primorial(k)
        assert totient_ratio(n) == mertens_products(n.p_k).inv_minus


def test_corollary8_examples():
    r = corollary8_check(primorial(4))
    assert abs(r.lhs - 4.375) < 1e-14
    assert abs(r.rhs - constants().e_gamma * math.log(5.347108)) < 1e-5 and r.holds
    assert abs(r.p_k_over_log_n - 7 / math.log(210)) < 1e-14
    six = corollary8_check(primorial(2))
    assert abs(six.rhs - 1.0387) < 1e-4 and six.holds
    assert corollary8_check(primorial(25)).holds
    with pytest.raises(DomainError):
        corollary8_check(primorial(1))


def test_corollary8_sweep():
    sweep = primorial_sweep(2000)
    assert all(r.holds for r in sweep)
    for k in (2, 17, 2000):
        assert sweep[k - 2] == corollary8_check(primorial(k))
    for n in colossally_abundant(50):
        if float(n.log_n) > 1:
            assert corollary8_check(n).holds
