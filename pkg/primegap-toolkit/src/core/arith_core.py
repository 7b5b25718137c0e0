"""
Arithmetic substrate: segmented prime sieving, trial-division factorization and
the multiplicative functions (mu, phi, tau_3, rho_2) used by the weights and
the discrepancy sums.

The primorial of all primes up to D1 is never built as an integer. "d divides
the primorial" is tested as "d is squarefree and D1-smooth" instead.
"""
from bisect import bisect_left, bisect_right
from functools import lru_cache, partial
from typing import TYPE_CHECKING, Iterator, List, Tuple, Union
import logging
import math

import attrs
import numpy as np
from sympy import isprime

from src.utils.errors import InvalidArgumentError
from src.utils.parallel import chunk_ranges, flatten, ordered_map

if TYPE_CHECKING:
    from src.core.admissible import AdmissibleTuple

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_SIZE = 1 << 18
MAX_SIEVE_BOUND = (1 << 63) - 1
_TRIAL_PRIMES_LIMIT = 1 << 16


@attrs.frozen
class PrimeTable:
    """Exactly the primes in the closed range [range_lo, range_hi], ascending."""

    range_lo: int
    range_hi: int
    primes: Tuple[int, ...] = attrs.field(converter=tuple)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes)

    def __contains__(self, n: int) -> bool:
        i = bisect_left(self.primes, n)
        return i < len(self.primes) and self.primes[i] == n

    def between(self, lo: int, hi: int) -> Tuple[int, ...]:
        """Primes of the table inside [lo, hi]."""
        return self.primes[bisect_left(self.primes, lo):bisect_right(self.primes, hi)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=np.int64)


def _check_factors(instance, attribute, value):
    previous = 1
    product = 1
    for p, e in value:
        if p <= previous or e < 1:
            raise InvalidArgumentError(f"malformed factorization {value}")
        previous = p
        product *= p ** e
    if product != instance.n:
        raise InvalidArgumentError(f"factors {value} do not multiply to {instance.n}")


@attrs.frozen
class Factorization:
    n: int
    factors: Tuple[Tuple[int, int], ...] = attrs.field(converter=tuple, validator=_check_factors)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @classmethod
    def squarefree(cls, primes) -> "Factorization":
        """Factorization of a product of distinct primes given in ascending order."""
        primes = tuple(primes)
        return cls(math.prod(primes), tuple((p, 1) for p in primes))


# Sieving

def _simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a plain Eratosthenes sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=32)
def primes_up_to(limit: int) -> Tuple[int, ...]:
    """Cached tuple of the primes <= limit."""
    return tuple(_simple_sieve(limit).tolist())


def _segment_mask(bounds: Tuple[int, int], base: Tuple[int, ...]) -> np.ndarray:
    low, high = bounds
    mask = np.ones(high - low + 1, dtype=bool)
    for p in base:
        p2 = p * p
        if p2 > high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        mask[start - low::p] = False
    if low < 2:
        mask[:2 - low] = False
    return mask


def _sieve_segment(bounds: Tuple[int, int], base: Tuple[int, ...]) -> List[int]:
    return (np.flatnonzero(_segment_mask(bounds, base)) + bounds[0]).tolist()


def _check_range(lo: int, hi: int) -> None:
    if lo < 0 or hi < lo:
        raise InvalidArgumentError(f"invalid range [{lo}, {hi}]: need 0 <= lo <= hi")
    if hi > MAX_SIEVE_BOUND:
        raise InvalidArgumentError(f"upper bound {hi} exceeds the 64-bit range")


def sieve_primes(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                 workers: int = 1) -> PrimeTable:
    """
    Segmented sieve of Eratosthenes over the closed range [lo, hi].

    Memory is O(sqrt(hi) + segment_size). Segments may be sieved by a process
    pool; the merged table does not depend on segment_size or workers.
    """
    _check_range(lo, hi)
    base = primes_up_to(math.isqrt(hi))
    segments = chunk_ranges(lo, hi, segment_size)
    logger.debug(f"Sieving [{lo}, {hi}] in {len(segments)} segments")
    parts = ordered_map(partial(_sieve_segment, base=base), segments, workers)
    return PrimeTable(lo, hi, flatten(parts))


def prime_mask(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> np.ndarray:
    """Boolean array m with m[i] true iff lo + i is prime, for lo <= lo + i <= hi."""
    _check_range(lo, hi)
    base = primes_up_to(math.isqrt(hi))
    masks = [_segment_mask(bounds, base) for bounds in chunk_ranges(lo, hi, segment_size)]
    return np.concatenate(masks)


# Factorization and multiplicative functions

def factorize(n: int) -> Factorization:
    """Trial-division factorization of a positive integer."""
    if n < 1:
        raise InvalidArgumentError(f"cannot factor {n}: need a positive integer")
    factors = []
    m = n
    divisor = 2
    for p in primes_up_to(_TRIAL_PRIMES_LIMIT):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        divisor = p + 2
    else:
        # past the cached primes: odd trial divisors
        while divisor * divisor <= m:
            if m % divisor == 0:
                e = 0
                while m % divisor == 0:
                    m //= divisor
                    e += 1
                factors.append((divisor, e))
            divisor += 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, factors)


FactorizationLike = Union[int, Factorization]


def _as_factorization(n: FactorizationLike) -> Factorization:
    if isinstance(n, Factorization):
        return n
    return factorize(n)


def mobius(n: FactorizationLike) -> int:
    f = _as_factorization(n)
    if not f.is_squarefree:
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(d: FactorizationLike) -> int:
    f = _as_factorization(d)
    result = 1
    for p, e in f.factors:
        result *= (p - 1) * p ** (e - 1)
    return result


def tau3(d: FactorizationLike) -> int:
    """Number of ordered triples (a, b, c) with abc = d."""
    f = _as_factorization(d)
    return math.prod(math.comb(e + 2, 2) for _, e in f.factors)


def theta_chebyshev(n: int) -> float:
    """log n at primes, 0 elsewhere."""
    if n < 1:
        raise InvalidArgumentError(f"theta is defined for n >= 1, got {n}")
    return math.log(n) if isprime(n) else 0.0


def poly_P(n: int, tuple_: "AdmissibleTuple") -> int:
    """Exact product of n + h over the tuple's offsets."""
    terms = [n + h for h in tuple_.offsets]
    if any(t <= 0 for t in terms):
        raise InvalidArgumentError(f"P({n}) has a nonpositive factor")
    return math.prod(terms)


def residue_count(offsets, p: int) -> int:
    """Number of distinct residues of the offsets mod p (no primality check)."""
    return len({h % p for h in offsets})


def rho2(d: FactorizationLike, tuple_: "AdmissibleTuple") -> int:
    """
    Number of residues c mod d with P(c) = 0 (mod d), for squarefree d.

    Multiplicative: each prime p | d contributes the count of distinct classes
    of -h_i mod p, which equals the count of distinct h_i mod p.
    """
    f = _as_factorization(d)
    if not f.is_squarefree:
        raise InvalidArgumentError(f"rho2 needs a squarefree modulus, got {f.n}")
    return math.prod(residue_count(tuple_.offsets, p) for p in f.primes)


def divides_primorial(d: FactorizationLike, d1: int) -> bool:
    """True iff d divides the product of all primes <= d1."""
    f = _as_factorization(d)
    return f.is_squarefree and all(p <= d1 for p in f.primes)
