import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mertens_lab.oscillation import (
    PRNG_ID,
    ConstraintInfeasibleError,
    CramerParams,
    CramerSequence,
    compare_products,
    count_sign_changes,
    cramer_residual_signs,
    cramer_sequence,
    log_grid,
    product_comparison,
    residual_scan,
    sequence_product,
    splitmix64,
    uniforms,
)
from mertens_lab.prime_sums import mertens_products
from mertens_lab.sieve import primes_in_range
from mertens_lab.special import DomainError

PRIMES = primes_in_range(2, 2 * 10**5)


def test_splitmix64_reference_outputs():
    # first outputs of the reference SplitMix64 stream seeded with 0
    out = splitmix64(0, np.arange(1, 4))
    assert [int(v) for v in out] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    u = uniforms(7, np.arange(10**5))
    assert 0 <= u.min() and u.max() < 1 and abs(u.mean() - 0.5) < 0.01


def test_determinism():
    p = CramerParams(1e5, seed=11)
    a, b = cramer_sequence(p), cramer_sequence(p)
    assert np.array_equal(a.values, b.values) and a.prng == PRNG_ID
    assert not np.array_equal(a.values, cramer_sequence(CramerParams(1e5, seed=12)).values)


def test_short_bias_gaps_dominated_by_prime_gaps():
    seq = cramer_sequence(CramerParams(1e5, seed=3, bias="short")).values
    gaps = np.diff(seq)
    pgaps = np.diff(PRIMES[: len(seq)])
    assert (gaps <= pgaps).all()
    seq = cramer_sequence(CramerParams(1e5, seed=3, bias="long")).values
    assert (np.diff(seq) >= np.diff(PRIMES[: len(seq)])).all()


def test_unbiased_count_band():
    pi = len(PRIMES[PRIMES <= 10**5])
    hits = sum(abs(len(cramer_sequence(CramerParams(1e5, seed=s)).values) - pi) <= 0.05 * pi for s in range(10))
    assert hits >= 9


@settings(max_examples=100, deadline=None)
@given(
    st.integers(0, 2**64 - 1),
    st.sampled_from(["none", "short", "long"]),
    st.floats(1e3, 3e4),
    st.floats(0.5, 2.0),
    st.floats(1.0, 4.0),
)
def test_sequences_satisfy_invariants(seed, bias, x, c, d):
    params = CramerParams(x, seed, bias, c, d)
    try:
        seq = cramer_sequence(params, PRIMES)
    except ConstraintInfeasibleError as exc:
        assert exc.index >= 3
        return
    seq.check(PRIMES)
    assert (np.diff(seq.values) > 0).all()


def test_infeasible_reports_index():
    # a tiny gap cap cannot keep up with the primes
    with pytest.raises(ConstraintInfeasibleError) as info:
        cramer_sequence(CramerParams(1e4, 0, "none", gap_cap_constant=0.05, drift_constant=0.1))
    assert info.value.index > 2


def test_params_validation():
    with pytest.raises(ValueError):
        CramerParams(1e4, bias="sideways")
    with pytest.raises(ValueError):
        CramerParams(1e4, gap_cap_constant=0)


def test_sequence_product_cases():
    x = 1e5
    primes = PRIMES[PRIMES <= x]
    seq = CramerSequence(primes, CramerParams(x))
    assert sequence_product(seq) == mertens_products(x).inv_minus / math.log(x)
    two = CramerSequence(np.array([2]), CramerParams(10))
    assert abs(sequence_product(two) - 2 / math.log(10)) < 1e-15
    shifted = CramerSequence(primes + 2, CramerParams(x))
    assert sequence_product(shifted) <= sequence_product(seq)
    with pytest.raises(ValueError):
        sequence_product(CramerSequence(np.array([], dtype=np.int64), CramerParams(x)))


def test_product_comparison():
    for seed in range(10):
        r = product_comparison(1e5, seed)
        assert r.ok and r.P_long < r.P < r.P_short
    with pytest.raises(DomainError):
        product_comparison(10, 0)


def test_product_comparison_degenerate():
    primes = PRIMES[PRIMES <= 10**4]
    r = compare_products(primes, primes, primes, 1e4)
    assert r.P_short == r.P == r.P_long and r.ok


def test_cramer_signs_reproducible():
    a = cramer_residual_signs(1e4, [5, 6])
    b = cramer_residual_signs(1e4, [5, 6])
    assert a == b
    assert all(r.sign in (-1, 1) for r in a)
    with pytest.raises(DomainError):
        cramer_residual_signs(1e4, [1])


def test_count_sign_changes():
    assert count_sign_changes([1, -1, 1]) == 2
    assert count_sign_changes([1, 0, 1]) == 0
    assert count_sign_changes([1, 0, -1]) == 1
    assert count_sign_changes([0, 0, -1, 1]) == 1
    assert count_sign_changes([]) == 0


@given(st.lists(st.floats(-10, 10), max_size=40))
def test_sign_changes_recount(values):
    signs = [v for v in (np.sign(values)) if v != 0]
    assert count_sign_changes(values) == sum(a != b for a, b in zip(signs, signs[1:]))


def test_log_grid():
    assert log_grid(16, 1e6, 2) == [16, 1e6]
    g = log_grid(1e3, 1e8, 20)
    assert g[0] == 1e3 and g[-1] == 1e8 and all(a < b for a, b in zip(g, g[1:]))


def test_residual_scan_regime_facts():
    theta = residual_scan("theta", 1e3, 1e8, 20)
    assert all(p.residual < 0 for p in theta.checkpoints) and theta.sign_changes == 0
    prod = residual_scan("mertens_product", 1e3, 1e8, 20)
    assert all(p.residual > 0 for p in prod.checkpoints)
    again = residual_scan("theta", 1e3, 1e8, 20)
    assert again == theta
    ends = residual_scan("pi_li", 100, 1e4, 2)
    assert [p.x for p in ends.checkpoints] == [100, 1e4]
    with pytest.raises(ValueError):
        residual_scan("nope", 100, 1e4, 2)
    with pytest.raises(DomainError):
        residual_scan("theta", 10, 1e4, 2)
