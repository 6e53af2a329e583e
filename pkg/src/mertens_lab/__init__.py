"""Desk-scale numerics for Mertens' theorems and related prime sums."""

__version__ = "0.1.0"

from .sieve import (  # noqa: E402
    InvalidRangeError,
    PrimeSegment,
    RangeTooLargeError,
    SieveConfig,
    prime_count,
    primes_in_range,
    sieve_segment,
)
from .special import (  # noqa: E402
    Constants,
    DomainError,
    UnknownKindError,
    constants,
    direct_constants,
    euler_gamma_partial,
    korobov_envelope,
    log_integral,
    meissel_mertens_partial,
    prime_zeta,
    rh_envelope,
    zeta_real,
)
from .streaming import SumSnapshot, stream_primes  # noqa: E402
from .checkpoint import CorruptCheckpointError, ResumeRangeError, read_checkpoint, resume, run_checkpointed  # noqa: E402
from .prime_sums import (  # noqa: E402
    ResidualPoint,
    ap_prime_recip_sum,
    chebyshev_psi,
    chebyshev_theta,
    fractional_part_sum,
    logp_over_p_sum,
    mertens_product_residual,
    mertens_products,
    mertens_sum_residual,
    pi_minus_li,
    prime_harmonic,
    reciprocal_prime_sum,
    stirling_cross_check,
    twisted_theta,
)
from .oscillation import (  # noqa: E402
    ConstraintInfeasibleError,
    CramerParams,
    CramerSequence,
    ScanSeries,
    cramer_residual_signs,
    cramer_sequence,
    product_comparison,
    residual_scan,
    sequence_product,
)
from .abundant import (  # noqa: E402
    PrimorialNumber,
    colossally_abundant,
    corollary8_check,
    primorial,
    sigma_ratio,
    totient_ratio,
)
