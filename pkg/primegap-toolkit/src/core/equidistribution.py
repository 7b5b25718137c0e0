"""
Short-interval discrepancies of theta in residue classes,

    Delta(gamma; d, c) = sum_{n = c (d), x <= n <= x + Delta} gamma(n)
                         - (1/phi(d)) sum_{x <= n <= x + Delta} gamma(n),

their sums over the residue sets C_i(d) and smooth squarefree moduli d < D^2,
and the weighted error terms E_i with their Cauchy-Schwarz majorant.
"""
from functools import partial
from math import gcd
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging
import math

import attrs
import numpy as np

from src.core.admissible import AdmissibleTuple
from src.core.arith_core import (
    DEFAULT_SEGMENT_SIZE,
    Factorization,
    divides_primorial,
    euler_phi,
    factorize,
    primes_up_to,
    rho2,
    sieve_primes,
    tau3,
)
from src.core.intervals import IntervalSpec
from src.core.sieve_weights import SieveParams
from src.utils.errors import InvalidArgumentError, ResourceLimitError
from src.utils.parallel import flatten, ordered_map

logger = logging.getLogger(__name__)

DEFAULT_MAX_MODULI = 10 ** 7
DEFAULT_MODULI_CHUNK = 256
DEFAULT_CHART_XS = (10 ** 5, 10 ** 6, 10 ** 7)

Weight = Union[str, Mapping[int, float], Callable[[int], float]]


@attrs.frozen
class WeightedInterval:
    """Support of an arithmetic weight on an interval: the n with nonzero weight and their values."""

    interval: IntervalSpec
    ns: np.ndarray = attrs.field(eq=False)
    values: np.ndarray = attrs.field(eq=False)
    total: float

    @classmethod
    def build(cls, weight: Weight, interval: IntervalSpec,
              segment_size: int = DEFAULT_SEGMENT_SIZE) -> "WeightedInterval":
        if isinstance(weight, str):
            if weight != "theta":
                raise InvalidArgumentError(f"unknown weight {weight!r}; use 'theta' or a table")
            primes = sieve_primes(interval.lo, interval.hi, segment_size).as_array()
            values = np.log(primes.astype(np.float64))
            ns = primes
        else:
            lookup = weight.get if isinstance(weight, Mapping) else weight
            pairs = [(n, float(lookup(n) or 0.0)) for n in range(interval.lo, interval.hi + 1)]
            pairs = [(n, v) for n, v in pairs if v != 0.0]
            ns = np.asarray([n for n, _ in pairs], dtype=np.int64)
            values = np.asarray([v for _, v in pairs], dtype=np.float64)
        return cls(interval, ns, values, math.fsum(values))

    def class_sums(self, d: int, wanted: Optional[Iterable[int]] = None) -> Dict[int, float]:
        """
        Residue r mod d -> exactly rounded sum of the weight over n = r (mod d).

        With `wanted`, only those residues are summed (absent classes map to 0.0).
        """
        if len(self.ns) == 0:
            return {} if wanted is None else {int(r) % d: 0.0 for r in wanted}
        residues = self.ns % d
        order = np.argsort(residues, kind="stable")
        residues, values = residues[order], self.values[order]
        if wanted is None:
            classes, starts = np.unique(residues, return_index=True)
            ends = list(starts[1:]) + [len(residues)]
            return {int(r): math.fsum(values[a:b]) for r, a, b in zip(classes, starts, ends)}
        keys = np.asarray(sorted({int(r) % d for r in wanted}), dtype=np.int64)
        starts = np.searchsorted(residues, keys, side="left")
        ends = np.searchsorted(residues, keys, side="right")
        return {int(r): math.fsum(values[a:b]) if b > a else 0.0
                for r, a, b in zip(keys, starts, ends)}

    def count_in_class(self, d: int, c: int) -> int:
        """Number of integers n = c (mod d) in the interval, prime or not."""
        lo, hi = self.interval.lo, self.interval.hi
        return (hi - c) // d - (lo - 1 - c) // d


@attrs.frozen
class ResidueSet:
    d: int
    i: int
    residues: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.residues)

    def __iter__(self):
        return iter(self.residues)


@attrs.frozen
class ModulusRow:
    """Discrepancy data for one modulus: (c, Delta) over the union of the C_i(d)."""

    d: int
    deltas: Tuple[Tuple[int, float], ...]
    abs_sums: Tuple[float, ...]
    weight: int


@attrs.frozen
class DiscrepancyReport:
    interval: IntervalSpec
    params: SieveParams
    index: int
    d_cap: int
    per_modulus: Dict[int, List[Tuple[int, float]]] = attrs.field(eq=False)
    bv_sum: float
    e_terms: List[float]
    cauchy_rhs: List[float]
    B: float
    target: float

    @property
    def ratio_at_B(self) -> Optional[float]:
        return self.bv_sum / self.target if self.target > 0 else None

    def rows(self) -> List[Tuple[int, int, float]]:
        return [(d, c, delta) for d in sorted(self.per_modulus)
                for c, delta in self.per_modulus[d]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bv_sum": self.bv_sum,
            "e_terms": self.e_terms,
            "cauchy_rhs": self.cauchy_rhs,
            "ratio_at_B": self.ratio_at_B,
            "B": self.B,
            "target": self.target,
            "index": self.index,
            "d_cap": self.d_cap,
            "moduli": len(self.per_modulus),
            "interval": self.interval.to_dict(),
            "params": self.params.to_dict(),
        }


# single discrepancies

def _check_class(d: int, c: int) -> None:
    if d < 1 or not 1 <= c <= d:
        raise InvalidArgumentError(f"need d >= 1 and 1 <= c <= d, got d={d}, c={c}")
    if gcd(c, d) != 1:
        raise InvalidArgumentError(f"Delta(d, c) is defined for (d, c) = 1, got d={d}, c={c}")


def discrepancy_delta(weight: Weight, d: int, c: int, interval: IntervalSpec) -> float:
    """Delta(gamma; d, c) over the closed interval."""
    _check_class(d, c)
    support = WeightedInterval.build(weight, interval)
    return support.class_sums(d).get(c % d, 0.0) - support.total / euler_phi(d)


def discrepancy_table(weight: Weight, d: int, interval: IntervalSpec,
                      support: Optional[WeightedInterval] = None) -> Dict[int, float]:
    """Delta(gamma; d, c) for every c in [1, d] coprime to d."""
    if d < 1:
        raise InvalidArgumentError(f"modulus must be positive, got {d}")
    if support is None:
        support = WeightedInterval.build(weight, interval)
    sums = support.class_sums(d)
    mean = support.total / euler_phi(d)
    return {c: sums.get(c % d, 0.0) - mean for c in range(1, d + 1) if gcd(c, d) == 1}


def trivial_delta_bound(d: int, c: int, interval: IntervalSpec,
                        support: Optional[WeightedInterval] = None) -> float:
    """max(#{n = c (d)} ln(hi), (1/phi(d)) sum theta), a crude bound on |Delta(theta; d, c)|."""
    _check_class(d, c)
    if support is None:
        support = WeightedInterval.build("theta", interval)
    per_class = support.count_in_class(d, c) * math.log(interval.hi)
    return max(per_class, support.total / euler_phi(d))


# residue sets and moduli

def _check_index(i: int, tuple_: AdmissibleTuple) -> None:
    if not 1 <= i <= tuple_.k:
        raise InvalidArgumentError(f"index i must lie in [1, {tuple_.k}], got {i}")


def _residues_from_primes(d: int, primes: Sequence[int], tuple_: AdmissibleTuple,
                          i: int) -> Tuple[int, ...]:
    """CRT assembly of the classes c (mod d), (c, d) = 1, with P(c - h_i) = 0 (mod d)."""
    h_i = tuple_.offsets[i - 1]
    residues = [0]
    modulus = 1
    for p in primes:
        allowed = sorted({(h_i - h) % p for h in tuple_.offsets} - {0})
        inverse = pow(modulus, -1, p)
        residues = [r + modulus * (((a - r) * inverse) % p) for r in residues for a in allowed]
        modulus *= p
    return tuple(sorted(r if r else d for r in residues))


def residue_set_Ci(d: int, tuple_: AdmissibleTuple, i: int,
                   d1: Optional[int] = None) -> ResidueSet:
    """
    C_i(d) = {1 <= c <= d : (c, d) = 1, P(c - h_i) = 0 (mod d)}.

    d must be squarefree and, when d1 is given, have every prime factor <= d1.
    """
    _check_index(i, tuple_)
    f = factorize(d)
    if not f.is_squarefree:
        raise InvalidArgumentError(f"modulus {d} is not squarefree")
    if d1 is not None and not divides_primorial(f, d1):
        raise InvalidArgumentError(f"modulus {d} has a prime factor above D1={d1}")
    return ResidueSet(d, i, _residues_from_primes(d, f.primes, tuple_, i))


def smooth_moduli(d1: int, d_cap: int,
                  max_moduli: int = DEFAULT_MAX_MODULI) -> List[Tuple[int, Tuple[int, ...]]]:
    """
    Squarefree d < d_cap with all prime factors <= d1, ascending, with their primes.

    Depth-first over products of primes <= d1, pruned at d_cap.
    """
    primes = primes_up_to(d1)
    found: List[Tuple[int, Tuple[int, ...]]] = []
    stack: List[Tuple[int, int, Tuple[int, ...]]] = [(0, 1, ())]
    while stack:
        start, d, factors = stack.pop()
        if d >= d_cap:
            continue
        found.append((d, factors))
        if len(found) > max_moduli:
            raise ResourceLimitError("max_moduli", max_moduli, len(found))
        for j in range(start, len(primes)):
            next_d = d * primes[j]
            if next_d >= d_cap:
                break
            stack.append((j + 1, next_d, factors + (primes[j],)))
    found.sort()
    return found


def _modulus_rows(chunk: Sequence[Tuple[int, Tuple[int, ...]]], support: WeightedInterval,
                  tuple_: AdmissibleTuple) -> List[ModulusRow]:
    rows = []
    for d, primes in chunk:
        f = Factorization.squarefree(primes)
        mean = support.total / euler_phi(f)
        sets = [_residues_from_primes(d, primes, tuple_, i) for i in range(1, tuple_.k + 1)]
        union = sorted(set().union(*sets))
        sums = support.class_sums(d, union)
        delta = {c: sums[c % d] - mean for c in union}
        abs_sums = tuple(math.fsum(abs(delta[c]) for c in s) for s in sets)
        rows.append(ModulusRow(d, tuple(delta.items()), abs_sums, tau3(f) * rho2(f, tuple_)))
    return rows


def _resolve_cap(params: SieveParams, d_cap: Optional[int]) -> int:
    limit = params.D ** 2
    if d_cap is None:
        return limit
    if d_cap > limit:
        raise InvalidArgumentError(f"d_cap={d_cap} exceeds D^2={limit}")
    return d_cap


def modulus_rows(interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
                 d_cap: Optional[int] = None, workers: int = 1,
                 max_moduli: int = DEFAULT_MAX_MODULI,
                 segment_size: int = DEFAULT_SEGMENT_SIZE) -> List[ModulusRow]:
    """Per-modulus discrepancy rows for every smooth squarefree d < d_cap, ascending."""
    if tuple_.k != params.k0:
        raise InvalidArgumentError(f"tuple has {tuple_.k} offsets but k0 = {params.k0}")
    cap = _resolve_cap(params, d_cap)
    moduli = smooth_moduli(params.D1, cap, max_moduli)
    support = WeightedInterval.build("theta", interval, segment_size)
    logger.info(f"Discrepancies on [{interval.lo}, {interval.hi}]: {len(support.ns)} primes, "
                f"{len(moduli)} moduli below {cap}")
    chunks = [moduli[j:j + DEFAULT_MODULI_CHUNK]
              for j in range(0, len(moduli), DEFAULT_MODULI_CHUNK)]
    parts = ordered_map(partial(_modulus_rows, support=support, tuple_=tuple_), chunks, workers)
    return flatten(parts)


def _bv_from_rows(rows: Iterable[ModulusRow], i: int) -> float:
    return math.fsum(row.abs_sums[i - 1] for row in rows)


def _error_from_rows(rows: Sequence[ModulusRow], i: int) -> Tuple[float, float]:
    weighted = math.fsum(row.weight * row.abs_sums[i - 1] for row in rows)
    weighted_sq = math.fsum(row.weight ** 2 * row.abs_sums[i - 1] for row in rows)
    plain = math.fsum(row.abs_sums[i - 1] for row in rows)
    return weighted, math.sqrt(weighted_sq) * math.sqrt(plain)


def bv_sum(i: int, interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
           d_cap: Optional[int] = None, workers: int = 1,
           max_moduli: int = DEFAULT_MAX_MODULI) -> float:
    """Sum over smooth squarefree d < d_cap and c in C_i(d) of |Delta(theta; d, c)|."""
    _check_index(i, tuple_)
    rows = modulus_rows(interval, tuple_, params, d_cap, workers, max_moduli)
    return _bv_from_rows(rows, i)


def error_term_Ei(i: int, interval: IntervalSpec, tuple_: AdmissibleTuple, params: SieveParams,
                  d_cap: Optional[int] = None, workers: int = 1,
                  max_moduli: int = DEFAULT_MAX_MODULI) -> Tuple[float, float]:
    """
    (E_i, sqrt(sum w^2 |Delta|) sqrt(sum |Delta|)) with w = tau_3(d) rho_2(d),
    both sides from the same discrepancies.
    """
    _check_index(i, tuple_)
    rows = modulus_rows(interval, tuple_, params, d_cap, workers, max_moduli)
    return _error_from_rows(rows, i)


def build_discrepancy_report(interval: IntervalSpec, tuple_: AdmissibleTuple,
                             params: SieveParams, i: int = 1, d_cap: Optional[int] = None,
                             B: float = 1.0, workers: int = 1,
                             max_moduli: int = DEFAULT_MAX_MODULI) -> DiscrepancyReport:
    """Per-modulus table for index i plus E_j and its majorant for every j."""
    _check_index(i, tuple_)
    cap = _resolve_cap(params, d_cap)
    rows = modulus_rows(interval, tuple_, params, cap, workers, max_moduli)
    wanted = {row.d: set(_residues_from_primes(row.d, factorize(row.d).primes, tuple_, i))
              for row in rows}
    per_modulus = {row.d: [(c, delta) for c, delta in row.deltas if c in wanted[row.d]]
                   for row in rows}
    errors = [_error_from_rows(rows, j) for j in range(1, tuple_.k + 1)]
    target = interval.length * math.log(interval.x) ** (-B) if interval.x > 1 else 0.0
    return DiscrepancyReport(
        interval=interval,
        params=params,
        index=i,
        d_cap=cap,
        per_modulus=per_modulus,
        bv_sum=_bv_from_rows(rows, i),
        e_terms=[e for e, _ in errors],
        cauchy_rhs=[rhs for _, rhs in errors],
        B=B,
        target=target,
    )


def bv_decay_chart(tuple_: AdmissibleTuple, k0: int, l0: int, varpi, A: float = 1.0,
                   xs: Sequence[int] = DEFAULT_CHART_XS, i: int = 1,
                   d_cap: Optional[int] = None, B: float = 1.0,
                   workers: int = 1, theta: Optional[float] = None) -> List[Dict[str, Any]]:
    """
    bv_sum / Delta(x) across x at fixed (k0, l0, varpi).

    Delta(x) is x^theta when theta is given, otherwise x / (ln x)^A.
    """
    chart = []
    for x in xs:
        params = SieveParams(k0, l0, varpi, x)
        if theta is not None:
            interval = IntervalSpec.power(x, theta)
        else:
            interval = IntervalSpec.log_power(x, A)
        cap = min(d_cap, params.D ** 2) if d_cap is not None else None
        report = build_discrepancy_report(interval, tuple_, params, i, cap, B, workers)
        chart.append({
            "x": x,
            "delta": interval.length,
            "D": params.D,
            "D1": params.D1,
            "moduli": len(report.per_modulus),
            "bv_sum": report.bv_sum,
            "bv_over_delta": report.bv_sum / interval.length if interval.length else None,
            "ratio_at_B": report.ratio_at_B,
        })
        logger.info(f"Chart point x={x}: bv_sum={report.bv_sum:.6g}")
    return chart
