from fractions import Fraction
import math
import random

import pytest

from src.core.admissible import AdmissibleTuple
from src.core.intervals import IntervalSpec
from src.core.sieve_weights import (
    SieveParams,
    _lambda_from_primes,
    lambda_batch,
    lambda_sup_report,
    lambda_values,
    lambda_weight,
    weight_g,
)
from src.utils.errors import DivisorOverflowError, InvalidArgumentError, ResourceLimitError

from conftest import DESK_CONFIGS, brute_lambda


def test_cutoffs_are_exact():
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 6)
    assert (params.D, params.D1) == (1000, 31)
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 4)
    assert (params.D, params.D1) == (100, 10)
    assert SieveParams.paper().D1 == 1


def test_parameter_validation():
    with pytest.raises(InvalidArgumentError):
        SieveParams(2, 1, Fraction(1, 3), 10 ** 4)
    with pytest.raises(InvalidArgumentError):
        SieveParams(2, 1, 0, 10 ** 4)
    with pytest.raises(InvalidArgumentError):
        SieveParams(0, 1, Fraction(1, 4), 10 ** 4)


def test_weight_g():
    params = SieveParams(2, 1, Fraction(1, 4), 100)
    assert weight_g(params.D, params) == 0.0
    assert weight_g(1, params) == pytest.approx(math.log(10) ** 3 / 6)
    with pytest.raises(InvalidArgumentError):
        weight_g(0.5, params)


def test_lambda_hand_example():
    params = SieveParams(2, 1, Fraction(1, 4), 100)
    value = lambda_weight(3, AdmissibleTuple((0, 2)), params)
    expected = (math.log(10) ** 3 - math.log(10 / 3) ** 3) / 6
    assert value == pytest.approx(expected, rel=1e-12)
    assert value == pytest.approx(1.7438, abs=1e-4)


def test_collapsed_regime_gives_constant(caplog):
    params = SieveParams(2, 1, Fraction(1, 4), 15)
    assert params.D1 == 1
    values = lambda_values(IntervalSpec.explicit(15, 20), AdmissibleTuple((0, 2)), params)
    assert set(values) == {weight_g(1, params)}
    assert "D1" in caplog.text


@pytest.mark.parametrize("offsets,l0,varpi,x", DESK_CONFIGS)
def test_batch_direct_and_oracle_agree(offsets, l0, varpi, x):
    tuple_ = AdmissibleTuple(offsets)
    params = SieveParams(len(offsets), l0, varpi, x)
    interval = IntervalSpec.explicit(x, 2000)
    table = lambda_batch(interval, tuple_, params)
    scale = weight_g(1, params)
    rng = random.Random(x + l0)
    for n in rng.sample(range(interval.lo, interval.hi + 1), 200):
        oracle = brute_lambda(n, offsets, params)
        assert table.values[n] == pytest.approx(oracle, rel=1e-9, abs=1e-9 * scale)
        assert lambda_weight(n, tuple_, params) == pytest.approx(oracle, rel=1e-9, abs=1e-9 * scale)


def test_chunking_and_workers_are_invisible():
    tuple_ = AdmissibleTuple((0, 2, 6))
    params = SieveParams(3, 1, Fraction(1, 4), 10 ** 6)
    interval = IntervalSpec.explicit(10 ** 6, 5000)
    reference = lambda_values(interval, tuple_, params)
    assert lambda_values(interval, tuple_, params, chunk_size=7) == reference
    assert lambda_values(interval, tuple_, params, workers=2, chunk_size=1000) == reference


def test_batch_cap():
    tuple_ = AdmissibleTuple((0, 2))
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 4)
    with pytest.raises(ResourceLimitError) as info:
        lambda_values(IntervalSpec.explicit(10 ** 4, 100), tuple_, params, max_entries=10)
    assert info.value.cap == "max_batch_entries"


def test_tuple_must_match_k0():
    params = SieveParams(3, 1, Fraction(1, 4), 10 ** 4)
    with pytest.raises(InvalidArgumentError):
        lambda_weight(10, AdmissibleTuple((0, 2)), params)


def test_divisor_overflow():
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 4)
    with pytest.raises(DivisorOverflowError):
        _lambda_from_primes(1, list(range(2, 67)), params)


def test_sup_report():
    tuple_ = AdmissibleTuple((0, 2))
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 4)
    table = lambda_batch(IntervalSpec.log_power(10 ** 4, 1), tuple_, params)
    assert table.max_abs == max(abs(v) for v in table.values.values())
    report = lambda_sup_report(table, 0.5)
    assert report.bound > 0
    assert report.ok == (report.max_abs < report.bound)
    assert table.rows()[0][0] == 10 ** 4
