"""Shared fixtures and brute-force oracles written independently of src."""
from fractions import Fraction
from itertools import combinations
import math

import pytest

from src.core.admissible import AdmissibleTuple
from src.core.sieve_weights import SieveParams


def trial_is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def trial_primes(lo, hi):
    return [n for n in range(lo, hi + 1) if trial_is_prime(n)]


def prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def brute_mobius(n):
    m, sign, d = n, 1, 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            sign = -sign
        d += 1
    return -sign if m > 1 else sign


def brute_phi(n):
    result = n
    for p in prime_factors(n):
        result = result // p * (p - 1)
    return result


def tau3_table(limit):
    """tau3(n) for n <= limit by two Dirichlet convolutions of 1."""
    tau = [0] * (limit + 1)
    for d in range(1, limit + 1):
        for m in range(d, limit + 1, d):
            tau[m] += 1
    out = [0] * (limit + 1)
    for d in range(1, limit + 1):
        for m in range(d, limit + 1, d):
            out[m] += tau[m // d]
    return out


def brute_rho2(d, offsets):
    return sum(1 for c in range(d) if math.prod(c + h for h in offsets) % d == 0)


def brute_lambda(n, offsets, params):
    """Sum of mu(d) g(d) over every squarefree D1-smooth divisor d of P(n)."""
    product = math.prod(n + h for h in offsets)
    small = [p for p in range(2, params.D1 + 1) if trial_is_prime(p) and product % p == 0]
    m = params.k0 + params.l0
    total = 0.0
    for r in range(len(small) + 1):
        for chosen in combinations(small, r):
            d = math.prod(chosen)
            if d < params.D:
                total += (-1) ** r * math.log(params.D / d) ** m / math.factorial(m)
    return total


def brute_theta_sum(lo, hi, d=1, c=0):
    return math.fsum(math.log(n) for n in range(lo, hi + 1)
                     if n % d == c % d and trial_is_prime(n))


@pytest.fixture
def twin():
    return AdmissibleTuple((0, 2))


@pytest.fixture
def quintuple():
    return AdmissibleTuple((0, 2, 6, 8, 12))


@pytest.fixture
def desk_params():
    """x = 10^4 with varpi = 1/4: D = 100, D1 = 10."""
    return SieveParams(2, 1, Fraction(1, 4), 10 ** 4)


DESK_CONFIGS = [
    ((0, 2), 1, Fraction(1, 4), 10 ** 4),
    ((0, 2, 6), 1, Fraction(1, 4), 10 ** 5),
    ((0, 2, 6, 8), 2, Fraction(1, 5), 10 ** 6),
    ((0, 4, 6, 10, 12), 1, Fraction(1, 4), 10 ** 6),
    ((0, 2, 6, 8, 12), 3, Fraction(1, 8), 10 ** 7),
]
