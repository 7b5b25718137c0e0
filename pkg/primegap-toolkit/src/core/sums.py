"""
Short-interval sums

    S1 = sum_{x <= n <= x + Delta} lambda(n)^2
    S2 = sum_{x <= n <= x + Delta} lambda(n)^2 sum_i theta(n + h_i)

the statistic S2 - ln(3x) S1, the asymptotic predictions for S1, S2 and the
omega main term (log space), and the prime-pair counts those sums control.
"""
from bisect import bisect_left
from typing import Any, Dict, List, Optional, Sequence
import logging
import math

import attrs
import numpy as np

from src.core.admissible import AdmissibleTuple, is_admissible, singular_series
from src.core.arith_core import DEFAULT_SEGMENT_SIZE, prime_mask, sieve_primes
from src.core.bignum_log import LogReal, OmegaParams, log_binomial, log_gamma, omega_constant
from src.core.intervals import IntervalSpec
from src.core.sieve_weights import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_BATCH_ENTRIES,
    SieveParams,
    lambda_values,
)
from src.utils.errors import InadmissibleTupleError, InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_SINGULAR_PMAX = 10 ** 5

__all__ = [
    "IntervalSpec",
    "Predictions",
    "SumReport",
    "bound_predictions",
    "count_two_prime_translates",
    "count_weak_prime_pairs",
    "lemma3_statistic",
    "pair_count_reference",
    "s1",
    "s2",
]


@attrs.frozen
class Predictions:
    """Asymptotic references with o(1) terms dropped; not certified bounds at finite x."""

    s1_bound: LogReal
    s2_bound: LogReal
    omega: LogReal
    omega_prediction: LogReal
    inequality_rhs: LogReal
    d_squared: LogReal
    x_seven_twelfths: LogReal
    strict_paper: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s1_bound_log": self.s1_bound.to_dict(),
            "s2_bound_log": self.s2_bound.to_dict(),
            "omega_log": self.omega.to_dict(),
            "omega_prediction_log": self.omega_prediction.to_dict(),
            "inequality_rhs_log": self.inequality_rhs.to_dict(),
            "error_d_squared_log": self.d_squared.to_dict(),
            "error_x_7_12_log": self.x_seven_twelfths.to_dict(),
            "strict_paper": self.strict_paper,
        }


@attrs.frozen
class SumReport:
    interval: IntervalSpec
    params: SieveParams
    offsets: tuple
    s1: float
    s2: float
    statistic: float
    singular_series: float
    predictions: Predictions

    @property
    def s1_bound(self) -> LogReal:
        return self.predictions.s1_bound

    @property
    def s2_bound(self) -> LogReal:
        return self.predictions.s2_bound

    @property
    def omega_prediction(self) -> LogReal:
        return self.predictions.omega_prediction

    @property
    def empirical_log_exponent(self) -> Optional[float]:
        """e with |statistic| = Delta (ln x)^e, or None when undefined."""
        length = self.interval.length
        ln_ln_x = math.log(math.log(self.interval.x)) if self.interval.x > math.e else 0.0
        if self.statistic == 0 or length == 0 or ln_ln_x <= 0:
            return None
        return math.log(abs(self.statistic) / length) / ln_ln_x

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "s1": self.s1,
            "s2": self.s2,
            "statistic": self.statistic,
            "singular_series": self.singular_series,
            "empirical_log_exponent": self.empirical_log_exponent,
            "interval": self.interval.to_dict(),
            "params": self.params.to_dict(),
            "tuple": list(self.offsets),
        }
        payload.update(self.predictions.to_dict())
        return payload


def _squares_and_theta(values: Sequence[float], interval: IntervalSpec,
                       tuple_: AdmissibleTuple,
                       segment_size: int = DEFAULT_SEGMENT_SIZE):
    """lambda^2 per n, and the lambda^2 theta(n + h) terms for prime n + h."""
    squares = np.asarray(values, dtype=np.float64) ** 2
    h1 = tuple_.offsets[0]
    mask = prime_mask(interval.lo + h1, interval.hi + tuple_.offsets[-1], segment_size)
    terms: List[np.ndarray] = []
    for h in tuple_.offsets:
        idx = np.flatnonzero(mask[h - h1:h - h1 + interval.size])
        terms.append(squares[idx] * np.log((interval.lo + h + idx).astype(np.float64)))
    return squares, np.concatenate(terms)


def s1(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
       workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE,
       max_entries: int = DEFAULT_MAX_BATCH_ENTRIES) -> float:
    """Sum of lambda(n)^2 over the interval (exactly rounded summation)."""
    values = lambda_values(interval, tuple_, params, workers, chunk_size, max_entries)
    return math.fsum(v * v for v in values)


def s2(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
       workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE,
       max_entries: int = DEFAULT_MAX_BATCH_ENTRIES,
       segment_size: int = DEFAULT_SEGMENT_SIZE) -> float:
    """Sum of lambda(n)^2 theta(n + h_i) over n in the interval and all offsets."""
    values = lambda_values(interval, tuple_, params, workers, chunk_size, max_entries)
    _, theta_terms = _squares_and_theta(values, interval, tuple_, segment_size)
    return math.fsum(theta_terms)


def _power_of_ln_d(params: SieveParams, exponent: int) -> LogReal:
    if params.D <= 1:
        return LogReal.zero()
    return LogReal.from_ln(exponent * math.log(params.ln_D))


def bound_predictions(interval: IntervalSpec, params: SieveParams, singular: LogReal,
                      omega_params: Optional[OmegaParams] = None,
                      strict_paper: bool = False) -> Predictions:
    """
    Log-space predictions for S1 (upper), S2 (lower) and the omega main term.

    With strict_paper the S1 prediction carries x instead of Delta(x); by
    default Delta(x) is used throughout.
    """
    if omega_params is None:
        omega_params = OmegaParams(params.k0, params.l0, params.varpi)
    k0, l0 = params.k0, params.l0
    m = k0 + 2 * l0
    length = LogReal.from_int(interval.length)
    s1_length = LogReal.from_int(interval.x) if strict_paper else length

    s1_bound = ((1 + omega_params.kappa1)
                * LogReal.from_ln(log_binomial(2 * l0, l0) - log_gamma(m + 1))
                * singular * s1_length * _power_of_ln_d(params, m))
    s2_bound = ((1 - omega_params.kappa2) * k0
                * LogReal.from_ln(log_binomial(2 * l0 + 2, l0 + 1) - log_gamma(m + 2))
                * singular * length * _power_of_ln_d(params, m + 1))
    omega = omega_constant(omega_params)
    omega_prediction = omega * singular * length * _power_of_ln_d(params, m + 1)

    ln_x = math.log(interval.x)
    inequality_rhs = omega * length * LogReal.from_float(ln_x) ** (k0 + l0 + 1)

    return Predictions(
        s1_bound=s1_bound,
        s2_bound=s2_bound,
        omega=omega,
        omega_prediction=omega_prediction,
        inequality_rhs=inequality_rhs,
        d_squared=LogReal.from_int(params.D) ** 2,
        x_seven_twelfths=LogReal.from_ln(7.0 / 12.0 * ln_x),
        strict_paper=strict_paper,
    )


def lemma3_statistic(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
                     omega_params: Optional[OmegaParams] = None,
                     singular_pmax: int = DEFAULT_SINGULAR_PMAX,
                     strict_paper: bool = False, workers: int = 1,
                     chunk_size: int = DEFAULT_CHUNK_SIZE,
                     max_entries: int = DEFAULT_MAX_BATCH_ENTRIES,
                     segment_size: int = DEFAULT_SEGMENT_SIZE) -> SumReport:
    """S1, S2, S2 - ln(3x) S1 and the predictions, from one pass of the weights."""
    values = lambda_values(interval, tuple_, params, workers, chunk_size, max_entries)
    squares, theta_terms = _squares_and_theta(values, interval, tuple_, segment_size)
    total_s1 = math.fsum(squares)
    total_s2 = math.fsum(theta_terms)
    statistic = total_s2 - math.log(3 * interval.x) * total_s1

    series = singular_series(tuple_, max(singular_pmax, tuple_.k))
    singular = LogReal.from_float(series.value)
    predictions = bound_predictions(interval, params, singular, omega_params, strict_paper)
    logger.info(f"S1={total_s1:.6g} S2={total_s2:.6g} statistic={statistic:.6g} "
                f"on [{interval.lo}, {interval.hi}]")
    return SumReport(interval, params, tuple_.offsets, total_s1, total_s2, statistic,
                     series.value, predictions)


def count_weak_prime_pairs(interval: IntervalSpec, gap_bound: int,
                           segment_size: int = DEFAULT_SEGMENT_SIZE) -> int:
    """Unordered pairs of primes p1 != p2 in the interval with 1 < |p1 - p2| < gap_bound."""
    if gap_bound < 2:
        raise InvalidArgumentError(f"gap bound must be at least 2, got {gap_bound}")
    primes = sieve_primes(interval.lo, interval.hi, segment_size).primes
    count = 0
    for i, p in enumerate(primes):
        count += bisect_left(primes, p + gap_bound, i + 1) - (i + 1)
    if len(primes) >= 2 and primes[0] == 2 and primes[1] == 3:
        # (2, 3) is the only pair at distance 1
        count -= 1
    return count


def count_two_prime_translates(interval: IntervalSpec, tuple_: AdmissibleTuple,
                               segment_size: int = DEFAULT_SEGMENT_SIZE) -> int:
    """Number of n in the interval with at least two primes among n + h_i."""
    ok, witness = is_admissible(tuple_.offsets)
    if not ok:
        raise InadmissibleTupleError(tuple_.offsets, witness)
    h1 = tuple_.offsets[0]
    mask = prime_mask(interval.lo + h1, interval.hi + tuple_.offsets[-1], segment_size)
    hits = np.zeros(interval.size, dtype=np.int64)
    for h in tuple_.offsets:
        hits += mask[h - h1:h - h1 + interval.size]
    return int(np.count_nonzero(hits >= 2))


def pair_count_reference(interval: IntervalSpec, epsilon: float) -> float:
    """x^(1 - eps), the order of the guaranteed pair count."""
    return math.exp((1.0 - epsilon) * math.log(interval.x))
