"""
Admissible tuples: representation, admissibility checks, construction from
consecutive primes, greedy narrowing and the Hardy-Littlewood singular series.
"""
from pathlib import Path
from typing import List, Optional, Sequence, Tuple
import logging
import math

import attrs
import numpy as np
from sympy import isprime

from src.core.arith_core import primes_up_to, residue_count
from src.utils.errors import InadmissibleTupleError, InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_MAX_SHIFT = 10_000


def _strictly_increasing(offsets: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(offsets, offsets[1:]))


def _check_offsets(instance, attribute, value):
    if not value:
        raise InvalidArgumentError("a tuple needs at least one offset")
    if value[0] < 0:
        raise InvalidArgumentError(f"offsets must be nonnegative, got {value[0]}")
    if not _strictly_increasing(value):
        raise InvalidArgumentError(f"offsets must be strictly increasing: {value}")


@attrs.frozen
class AdmissibleTuple:
    """
    Offsets h_1 < ... < h_k. Ordering is enforced on construction; use
    `checked` when admissibility must hold as well.
    """

    offsets: Tuple[int, ...] = attrs.field(converter=lambda v: tuple(int(h) for h in v),
                                           validator=_check_offsets)

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def width(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    @property
    def is_canonical(self) -> bool:
        return self.offsets[0] == 0

    def __len__(self) -> int:
        return len(self.offsets)

    def canonical(self) -> "AdmissibleTuple":
        h1 = self.offsets[0]
        return AdmissibleTuple(h - h1 for h in self.offsets)

    def to_text(self) -> str:
        return ",".join(str(h) for h in self.offsets)

    @classmethod
    def checked(cls, offsets: Sequence[int]) -> "AdmissibleTuple":
        """Build a tuple and raise InadmissibleTupleError if it is not admissible."""
        ok, witness = is_admissible(offsets)
        if not ok:
            raise InadmissibleTupleError(offsets, witness)
        return cls(offsets)


@attrs.frozen
class SingularSeriesValue:
    value: float
    p_max: int
    tail_bound: float
    witness: Optional[int] = None

    @property
    def ln_value(self) -> float:
        return math.log(self.value) if self.value > 0 else float("-inf")


def residue_coverage(tuple_: AdmissibleTuple, p: int) -> int:
    """Number of residue classes mod p occupied by the offsets."""
    if not isprime(p):
        raise InvalidArgumentError(f"{p} is not prime")
    return residue_count(tuple_.offsets, p)


def is_admissible(offsets: Sequence[int]) -> Tuple[bool, Optional[int]]:
    """
    Check admissibility of increasing offsets.

    Only primes p <= k need checking: k offsets can never fill p > k classes.

    Returns:
        (True, None) when admissible, otherwise (False, least witness prime).
    """
    offsets = list(offsets)
    if not _strictly_increasing(offsets):
        raise InvalidArgumentError(f"offsets must be strictly increasing: {offsets}")
    for p in primes_up_to(len(offsets)):
        if residue_count(offsets, p) == p:
            return False, p
    return True, None


def is_admissible_exhaustive(offsets: Sequence[int]) -> Tuple[bool, Optional[int]]:
    """Admissibility checked against every prime up to width + 1."""
    offsets = list(offsets)
    if not _strictly_increasing(offsets):
        raise InvalidArgumentError(f"offsets must be strictly increasing: {offsets}")
    width = offsets[-1] - offsets[0] if offsets else 0
    for p in primes_up_to(width + 1):
        if residue_count(offsets, p) == p:
            return False, p
    return True, None


def _nth_prime_bound(n: int) -> int:
    """Upper bound for the n-th prime (1-indexed)."""
    if n < 6:
        return 13
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def prime_tuple_construct(k: int, m: int, auto_shift: bool = False,
                          max_shift: int = DEFAULT_MAX_SHIFT) -> AdmissibleTuple:
    """
    Offsets of k consecutive primes p_{m+1}, ..., p_{m+k} measured from p_{m+1}.

    Without auto_shift an inadmissible window raises InadmissibleTupleError.
    With it, m is increased until the window is admissible (at most max_shift steps).
    """
    if k < 1 or m < 0:
        raise InvalidArgumentError(f"need k >= 1 and m >= 0, got k={k}, m={m}")

    last_m = m + (max_shift if auto_shift else 0)
    primes = primes_up_to(_nth_prime_bound(last_m + k))
    for shift in range(m, last_m + 1):
        window = primes[shift:shift + k]
        offsets = [p - window[0] for p in window]
        ok, witness = is_admissible(offsets)
        if ok:
            if shift != m:
                logger.info(f"Shifted prime window from m={m} to m={shift}")
            return AdmissibleTuple(offsets)
        if not auto_shift:
            raise InadmissibleTupleError(offsets, witness)
    raise InvalidArgumentError(f"no admissible window of {k} primes within {max_shift} shifts of m={m}")


def default_search_width(k: int) -> int:
    return max(20, 10 * k)


def greedy_narrow(k: int, search_width: Optional[int] = None) -> AdmissibleTuple:
    """
    Greedy admissible k-tuple inside [0, search_width].

    For each prime p <= k in turn, the residue class mod p holding the fewest
    surviving candidates is removed (smallest residue on ties). The narrowest
    run of k consecutive survivors is returned, earliest run first on ties.
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be at least 1, got {k}")
    if search_width is None:
        search_width = default_search_width(k)
    if search_width < 0:
        raise InvalidArgumentError(f"search width must be nonnegative, got {search_width}")

    survivors = np.arange(search_width + 1, dtype=np.int64)
    for p in primes_up_to(k):
        residues = survivors % p
        counts = np.bincount(residues, minlength=p)
        survivors = survivors[residues != int(np.argmin(counts))]

    if len(survivors) < k:
        raise InvalidArgumentError(
            f"search width {search_width} too small: {len(survivors)} survivors for k={k}")

    spans = survivors[k - 1:] - survivors[:len(survivors) - k + 1]
    start = int(np.argmin(spans))
    window = survivors[start:start + k]
    return AdmissibleTuple(int(h - window[0]) for h in window)


def singular_series(tuple_: AdmissibleTuple, p_max: int) -> SingularSeriesValue:
    """
    Truncated Euler product prod_p (1 - nu_p/p)(1 - 1/p)^{-k}.

    The product always runs through max(p_max, width + 1, 2k) so that every
    omitted prime has nu_p = k; the omitted factors then lie within
    exp(2k(k-1)/P) - 1 of 1 multiplicatively, P being that cutoff.
    Inadmissible tuples give value 0 together with the witness prime.
    """
    ok, witness = is_admissible(tuple_.offsets)
    k = tuple_.k
    if not ok:
        return SingularSeriesValue(0.0, p_max, 0.0, witness)
    if p_max < k:
        raise InvalidArgumentError(f"p_max={p_max} must be at least k={k}")

    cutoff = max(p_max, tuple_.width + 1, 2 * k)
    ln_value = math.fsum(
        math.log1p(-residue_count(tuple_.offsets, p) / p) - k * math.log1p(-1.0 / p)
        for p in primes_up_to(cutoff)
    )
    tail = math.expm1(2.0 * k * (k - 1) / cutoff)
    return SingularSeriesValue(math.exp(ln_value), cutoff, tail)


def parse_tuple(text: str, normalize: bool = False) -> AdmissibleTuple:
    """
    Parse the one-line format `0,2,6,8,12`.

    Non-canonical input (h_1 != 0) is rejected unless normalize is set, in which
    case the offsets are shifted so h_1 = 0.
    """
    parts = [part.strip() for part in text.strip().split(",") if part.strip()]
    try:
        offsets: List[int] = [int(part) for part in parts]
    except ValueError:
        raise InvalidArgumentError(f"cannot parse tuple {text!r}: offsets must be integers")
    if not offsets:
        raise InvalidArgumentError("empty tuple")
    if not _strictly_increasing(offsets):
        raise InvalidArgumentError(f"offsets must be strictly increasing: {text!r}")
    if offsets[0] != 0:
        if not normalize:
            raise InvalidArgumentError(f"tuple {text!r} is not canonical (h_1 != 0); pass normalize")
        offsets = [h - offsets[0] for h in offsets]
    return AdmissibleTuple(offsets)


def read_tuple_file(path: str, normalize: bool = False) -> AdmissibleTuple:
    """Read a tuple from the first non-empty line of a file."""
    for line in Path(path).read_text().splitlines():
        if line.strip():
            return parse_tuple(line, normalize=normalize)
    raise InvalidArgumentError(f"tuple file {path} is empty")
