from fractions import Fraction
from math import gcd
import math
import random

import pytest

from src.core.admissible import AdmissibleTuple
from src.core.arith_core import factorize, rho2, tau3
from src.core.intervals import IntervalSpec
from src.core.sieve_weights import SieveParams
from src.core.equidistribution import (
    WeightedInterval,
    build_discrepancy_report,
    bv_decay_chart,
    bv_sum,
    discrepancy_delta,
    discrepancy_table,
    error_term_Ei,
    modulus_rows,
    residue_set_Ci,
    smooth_moduli,
    trivial_delta_bound,
)
from src.utils.errors import InvalidArgumentError, ResourceLimitError

from conftest import brute_theta_sum, trial_is_prime


@pytest.fixture
def bv_setup():
    """x = 10^4, varpi = 1/4: D = 100, D1 = 10."""
    tuple_ = AdmissibleTuple((0, 2))
    params = SieveParams(2, 1, Fraction(1, 4), 10 ** 4)
    return IntervalSpec.explicit(10 ** 4, 3000), tuple_, params


def test_single_delta_against_brute():
    interval = IntervalSpec.explicit(1000, 500)
    total = brute_theta_sum(1000, 1500)
    for d in (1, 3, 7, 10, 30):
        for c in range(1, d + 1):
            if gcd(c, d) != 1:
                continue
            expected = brute_theta_sum(1000, 1500, d, c) - total / sum(
                1 for a in range(1, d + 1) if gcd(a, d) == 1)
            assert discrepancy_delta("theta", d, c, interval) == pytest.approx(expected, abs=1e-9)


def test_trivial_modulus_is_exactly_zero():
    interval = IntervalSpec.explicit(12345, 6789)
    assert discrepancy_delta("theta", 1, 1, interval) == 0.0


def test_non_coprime_class_rejected():
    interval = IntervalSpec.explicit(100, 100)
    with pytest.raises(InvalidArgumentError):
        discrepancy_delta("theta", 6, 4, interval)
    with pytest.raises(InvalidArgumentError):
        discrepancy_delta("theta", 6, 7, interval)


def test_custom_weight_table():
    interval = IntervalSpec.explicit(1, 30)
    ones = {n: 1.0 for n in range(1, 32)}
    table = discrepancy_table(ones, 5, interval)
    # 1..31: class 1 mod 5 holds seven integers, every other class six
    assert table[1] == pytest.approx(7 - 31 / 4)
    assert table[4] == pytest.approx(6 - 31 / 4)
    assert discrepancy_table(lambda n: 1.0 if n % 2 else 0.0, 1, interval) == {1: 0.0}


def test_telescoping_identity():
    rng = random.Random(5)
    for _ in range(10):
        lo = rng.randrange(1, 1000)
        interval = IntervalSpec.explicit(lo, rng.randrange(1, 10 ** 5))
        support = WeightedInterval.build("theta", interval)
        for d in range(1, 501):
            table = discrepancy_table("theta", d, interval, support=support)
            expected = -math.fsum(math.log(p) for p in factorize(d).primes
                                  if interval.lo <= p <= interval.hi)
            assert math.fsum(table.values()) == pytest.approx(expected, abs=1e-9)


def test_trivial_bound_dominates():
    interval = IntervalSpec.explicit(5000, 2000)
    support = WeightedInterval.build("theta", interval)
    for d in (2, 3, 10, 77, 210):
        for c, delta in discrepancy_table("theta", d, interval, support=support).items():
            assert abs(delta) <= trivial_delta_bound(d, c, interval, support=support)


def test_residue_sets_against_brute():
    tuple_ = AdmissibleTuple((0, 2, 6))
    for d in (1, 3, 5, 7, 15, 35, 105, 210):
        for i in (1, 2, 3):
            h_i = tuple_.offsets[i - 1]
            brute = tuple(c for c in range(1, d + 1) if gcd(c, d) == 1
                          and math.prod(c - h_i + h for h in tuple_.offsets) % d == 0)
            assert residue_set_Ci(d, tuple_, i).residues == brute


def test_residue_set_preconditions():
    tuple_ = AdmissibleTuple((0, 2))
    with pytest.raises(InvalidArgumentError):
        residue_set_Ci(12, tuple_, 1)
    with pytest.raises(InvalidArgumentError):
        residue_set_Ci(13, tuple_, 1, d1=10)
    with pytest.raises(InvalidArgumentError):
        residue_set_Ci(3, tuple_, 3)
    assert residue_set_Ci(1, tuple_, 1).residues == (1,)


def test_smooth_moduli():
    moduli = smooth_moduli(5, 100)
    assert [d for d, _ in moduli] == [1, 2, 3, 5, 6, 10, 15, 30]
    assert dict(moduli)[30] == (2, 3, 5)
    assert smooth_moduli(1, 100) == [(1, ())]
    with pytest.raises(ResourceLimitError) as info:
        smooth_moduli(5, 100, max_moduli=3)
    assert info.value.cap == "max_moduli"


def test_bv_sum_against_direct_sum(bv_setup):
    interval, tuple_, params = bv_setup
    expected = math.fsum(
        abs(discrepancy_delta("theta", d, c, interval))
        for d, _ in smooth_moduli(params.D1, 500)
        for c in residue_set_Ci(d, tuple_, 1).residues
    )
    assert bv_sum(1, interval, tuple_, params, d_cap=500) == pytest.approx(expected, rel=1e-12)


def test_report_rows_match_bv_sum(bv_setup):
    interval, tuple_, params = bv_setup
    report = build_discrepancy_report(interval, tuple_, params, i=2, d_cap=1000)
    assert report.bv_sum == pytest.approx(
        math.fsum(abs(delta) for _, _, delta in report.rows()), rel=1e-12)
    for d, entries in report.per_modulus.items():
        assert tuple(c for c, _ in entries) == residue_set_Ci(d, tuple_, 2).residues
    assert len(report.e_terms) == len(report.cauchy_rhs) == 2
    assert report.target == pytest.approx(interval.length / math.log(interval.x))
    assert report.ratio_at_B == pytest.approx(report.bv_sum / report.target)


def test_cauchy_schwarz_split(bv_setup):
    interval, tuple_, params = bv_setup
    for i in (1, 2):
        e_term, rhs = error_term_Ei(i, interval, tuple_, params)
        assert e_term <= rhs * (1 + 1e-12)
        weighted = math.fsum(
            tau3(d) * rho2(d, tuple_) * abs(discrepancy_delta("theta", d, c, interval))
            for d, _ in smooth_moduli(params.D1, params.D ** 2)
            for c in residue_set_Ci(d, tuple_, i).residues
        )
        assert e_term == pytest.approx(weighted, rel=1e-12)


def test_cauchy_schwarz_equality_on_one_modulus(bv_setup):
    interval, tuple_, params = bv_setup
    # moduli 1, 2, 3: only d = 3 has a nonempty residue set
    e_term, rhs = error_term_Ei(1, interval, tuple_, params, d_cap=4)
    assert e_term > 0
    assert e_term == pytest.approx(rhs, rel=1e-12)
    assert e_term == pytest.approx(6 * abs(discrepancy_delta("theta", 3, 1, interval)), rel=1e-12)


def test_cap_above_d_squared_rejected(bv_setup):
    interval, tuple_, params = bv_setup
    with pytest.raises(InvalidArgumentError):
        bv_sum(1, interval, tuple_, params, d_cap=params.D ** 2 + 1)


def test_workers_do_not_change_rows(bv_setup):
    interval, tuple_, params = bv_setup
    assert modulus_rows(interval, tuple_, params, workers=2) == modulus_rows(interval, tuple_, params)


def test_decay_chart_shape():
    chart = bv_decay_chart(AdmissibleTuple((0, 2)), 2, 1, Fraction(1, 4), A=1.0,
                           xs=(10 ** 4, 10 ** 5), d_cap=1000)
    assert [row["x"] for row in chart] == [10 ** 4, 10 ** 5]
    for row in chart:
        assert row["bv_over_delta"] == pytest.approx(row["bv_sum"] / row["delta"])
        assert row["moduli"] >= 1


def test_prime_support_is_exact():
    support = WeightedInterval.build("theta", IntervalSpec.explicit(90, 20))
    assert list(support.ns) == [n for n in range(90, 111) if trial_is_prime(n)]


def test_selected_class_sums_match_full_table():
    support = WeightedInterval.build("theta", IntervalSpec.explicit(10 ** 5, 20000))
    rng = random.Random(3)
    for d in (1, 7, 30, 221, 9699):
        full = support.class_sums(d)
        wanted = rng.sample(range(d), min(d, 12))
        selected = support.class_sums(d, wanted)
        assert set(selected) == set(wanted)
        for r in wanted:
            assert selected[r] == full.get(r, 0.0)
    empty = WeightedInterval.build("theta", IntervalSpec.explicit(24, 4))
    assert empty.class_sums(5, [1, 2]) == {1: 0.0, 2: 0.0}


def test_decay_chart_power_lengths():
    chart = bv_decay_chart(AdmissibleTuple((0, 2)), 2, 1, Fraction(1, 4), theta=0.75,
                           xs=(10 ** 4, 10 ** 5), d_cap=1000)
    assert [row["delta"] for row in chart] == [math.floor(x ** 0.75) for x in (10 ** 4, 10 ** 5)]
