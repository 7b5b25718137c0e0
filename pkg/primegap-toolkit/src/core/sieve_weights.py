"""
The truncated GPY weight

    lambda(n) = sum over d | (P(n), primorial(D1)) of mu(d) g(d),
    g(y) = (ln(D/y))^{k0+l0} / (k0+l0)!  for y < D, and 0 otherwise,

with single-n evaluation and a sieved batch over an interval.
"""
from fractions import Fraction
from functools import partial
from typing import Dict, List, NamedTuple, Sequence, Tuple
import logging
import math

import attrs
from sympy import integer_nthroot

from src.core.admissible import AdmissibleTuple
from src.core.arith_core import primes_up_to
from src.core.bignum_log import log_gamma
from src.core.intervals import IntervalSpec
from src.utils.errors import DivisorOverflowError, InvalidArgumentError, ResourceLimitError
from src.utils.parallel import chunk_ranges, flatten, ordered_map

logger = logging.getLogger(__name__)

MAX_SMOOTH_PRIME_FACTORS = 64
DEFAULT_CHUNK_SIZE = 4096
DEFAULT_MAX_BATCH_ENTRIES = 5_000_000

PAPER_K0 = 3_500_000
PAPER_L0 = 180
PAPER_VARPI = Fraction(1, 1168)


def _floor_power(x: int, exponent: Fraction) -> int:
    """floor(x^exponent) for rational exponent, exactly."""
    if x < 1 or exponent < 0:
        raise InvalidArgumentError(f"cannot take {x}^{exponent}")
    root, _ = integer_nthroot(x ** exponent.numerator, exponent.denominator)
    return int(root)


def _positive(instance, attribute, value):
    if value < 1:
        raise InvalidArgumentError(f"{attribute.name} must be positive, got {value}")


def _check_varpi(instance, attribute, value):
    if not 0 < value <= Fraction(1, 4):
        raise InvalidArgumentError(f"varpi must lie in (0, 1/4], got {value}")


@attrs.frozen
class SieveParams:
    """(k0, l0, varpi, x) with D = floor(x^(varpi + 1/4)) and D1 = floor(x^varpi)."""

    k0: int = attrs.field(validator=_positive)
    l0: int = attrs.field(validator=_positive)
    varpi: Fraction = attrs.field(converter=Fraction, validator=_check_varpi)
    x: int = attrs.field(validator=_positive)
    D: int = attrs.field(init=False, default=attrs.Factory(
        lambda self: _floor_power(self.x, self.varpi + Fraction(1, 4)), takes_self=True))
    D1: int = attrs.field(init=False, default=attrs.Factory(
        lambda self: _floor_power(self.x, self.varpi), takes_self=True))

    @classmethod
    def paper(cls, x: int = 10 ** 9) -> "SieveParams":
        return cls(PAPER_K0, PAPER_L0, PAPER_VARPI, x)

    @property
    def degree(self) -> int:
        """k0 + l0, the power in g."""
        return self.k0 + self.l0

    @property
    def ln_D(self) -> float:
        return math.log(self.D)

    def to_dict(self) -> Dict[str, object]:
        return {
            "k0": self.k0,
            "l0": self.l0,
            "varpi": str(self.varpi),
            "x": self.x,
            "D": self.D,
            "D1": self.D1,
        }


@attrs.frozen
class WeightTable:
    interval: IntervalSpec
    params: SieveParams
    values: Dict[int, float]
    max_abs: float

    @classmethod
    def from_values(cls, interval: IntervalSpec, params: SieveParams,
                    values: Dict[int, float]) -> "WeightTable":
        max_abs = max((abs(v) for v in values.values()), default=0.0)
        return cls(interval, params, values, max_abs)

    def rows(self) -> List[Tuple[int, float]]:
        return sorted(self.values.items())


class SupReport(NamedTuple):
    max_abs: float
    bound: float
    ok: bool


def weight_g(y: float, params: SieveParams) -> float:
    """g(y), computed in log space; exactly 0 for y >= D."""
    if y < 1:
        raise InvalidArgumentError(f"g is evaluated for y >= 1, got {y}")
    if y >= params.D:
        return 0.0
    m = params.degree
    return math.exp(m * math.log(math.log(params.D / y)) - log_gamma(m + 1))


def _lambda_from_primes(n: int, primes: Sequence[int], params: SieveParams) -> float:
    """
    Sum of mu(d) g(d) over squarefree d built from `primes` (ascending).

    Products reaching D are pruned since g vanishes there.
    """
    if len(primes) > MAX_SMOOTH_PRIME_FACTORS:
        raise DivisorOverflowError(n, MAX_SMOOTH_PRIME_FACTORS, len(primes))
    terms = []
    stack = [(0, 1, 1)]
    while stack:
        start, d, mu = stack.pop()
        terms.append(mu * weight_g(d, params))
        for j in range(start, len(primes)):
            next_d = d * primes[j]
            if next_d >= params.D:
                break
            stack.append((j + 1, next_d, -mu))
    return math.fsum(terms)


def _check_tuple(tuple_: AdmissibleTuple, params: SieveParams) -> None:
    if tuple_.k != params.k0:
        raise InvalidArgumentError(f"tuple has {tuple_.k} offsets but k0 = {params.k0}")


def _warn_if_collapsed(params: SieveParams) -> None:
    if params.D1 < 2:
        logger.warning(f"D1 = {params.D1} < 2: no smooth divisors, lambda is the constant g(1)")


def lambda_weight(n: int, tuple_: AdmissibleTuple, params: SieveParams) -> float:
    """lambda(n) by direct evaluation."""
    _check_tuple(tuple_, params)
    if n < 1:
        raise InvalidArgumentError(f"lambda is evaluated for n >= 1, got {n}")
    primes = [p for p in primes_up_to(params.D1)
              if any((n + h) % p == 0 for h in tuple_.offsets)]
    return _lambda_from_primes(n, primes, params)


def prime_roots(tuple_: AdmissibleTuple, d1: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """For each prime p <= d1, the classes n mod p on which p divides P(n)."""
    return [(p, tuple(sorted({(-h) % p for h in tuple_.offsets})))
            for p in primes_up_to(d1)]


def _lambda_chunk(bounds: Tuple[int, int], roots, params: SieveParams) -> List[float]:
    low, high = bounds
    divisors: List[List[int]] = [[] for _ in range(high - low + 1)]
    for p, residues in roots:
        for r in residues:
            for n in range(low + (r - low) % p, high + 1, p):
                divisors[n - low].append(p)
    return [_lambda_from_primes(low + i, primes, params) for i, primes in enumerate(divisors)]


def lambda_values(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
                  workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE,
                  max_entries: int = DEFAULT_MAX_BATCH_ENTRIES) -> List[float]:
    """lambda(n) for n = lo..hi in order, by sieving the prime roots of P."""
    _check_tuple(tuple_, params)
    if interval.size > max_entries:
        raise ResourceLimitError("max_batch_entries", max_entries, interval.size)
    _warn_if_collapsed(params)

    roots = prime_roots(tuple_, params.D1)
    chunks = chunk_ranges(interval.lo, interval.hi, chunk_size)
    logger.info(f"Sieving weights on [{interval.lo}, {interval.hi}]: "
                f"{len(roots)} primes <= D1, {len(chunks)} chunks")
    parts = ordered_map(partial(_lambda_chunk, roots=roots, params=params), chunks, workers)
    return flatten(parts)


def lambda_batch(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
                 workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE,
                 max_entries: int = DEFAULT_MAX_BATCH_ENTRIES) -> WeightTable:
    """WeightTable of lambda over the closed interval."""
    values = lambda_values(interval, tuple_, params, workers, chunk_size, max_entries)
    return WeightTable.from_values(
        interval, params, dict(zip(range(interval.lo, interval.hi + 1), values)))


def lambda_sup_report(table: WeightTable, epsilon: float) -> SupReport:
    """
    Compare max |lambda| with the envelope x^eps (ln D)^{k0+l0} / (k0+l0)!,
    x being the right endpoint. Diagnostic only.
    """
    if not table.values:
        raise InvalidArgumentError("empty weight table")
    params = table.params
    m = params.degree
    if params.D <= 1:
        bound = 0.0
    else:
        ln_bound = (epsilon * math.log(table.interval.hi) + m * math.log(params.ln_D)
                    - log_gamma(m + 1))
        try:
            bound = math.exp(ln_bound)
        except OverflowError:
            bound = float("inf")
    return SupReport(table.max_abs, bound, table.max_abs < bound)
