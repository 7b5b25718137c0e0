from itertools import combinations
import random

import pytest

from src.core.admissible import (
    AdmissibleTuple,
    greedy_narrow,
    is_admissible,
    is_admissible_exhaustive,
    parse_tuple,
    prime_tuple_construct,
    read_tuple_file,
    residue_coverage,
    singular_series,
)
from src.core.arith_core import primes_up_to
from src.utils.errors import InadmissibleTupleError, InvalidArgumentError


def test_verdicts():
    assert is_admissible((0, 2)) == (True, None)
    assert is_admissible((0, 2, 4)) == (False, 3)
    assert is_admissible((0, 1)) == (False, 2)
    assert is_admissible((0,)) == (True, None)


def test_fast_check_agrees_with_exhaustive():
    for k in range(1, 5):
        for offsets in combinations(range(21), k):
            assert is_admissible(offsets)[0] == is_admissible_exhaustive(offsets)[0], offsets


def test_quintuple_width_twelve_is_minimal(quintuple):
    assert is_admissible(quintuple.offsets)[0]
    for rest in combinations(range(1, 12), 4):
        assert not is_admissible((0,) + rest)[0]


def test_tuple_ordering_enforced():
    with pytest.raises(InvalidArgumentError):
        AdmissibleTuple((2, 1))
    with pytest.raises(InvalidArgumentError):
        AdmissibleTuple(())
    with pytest.raises(InvalidArgumentError):
        AdmissibleTuple((-1, 3))


def test_checked_raises_with_witness():
    with pytest.raises(InadmissibleTupleError) as info:
        AdmissibleTuple.checked((0, 2, 4))
    assert info.value.witness == 3


def test_canonical_form():
    tuple_ = AdmissibleTuple((3, 5, 9))
    assert not tuple_.is_canonical
    assert tuple_.canonical().offsets == (0, 2, 6)
    assert tuple_.width == 6


def test_residue_coverage():
    assert residue_coverage(AdmissibleTuple((0, 2, 6, 8, 12)), 5) == 4
    with pytest.raises(InvalidArgumentError):
        residue_coverage(AdmissibleTuple((0, 2)), 4)


def test_prime_window_construction():
    assert prime_tuple_construct(5, 4).offsets == (0, 2, 6, 8, 12)
    with pytest.raises(InadmissibleTupleError):
        prime_tuple_construct(3, 0)
    assert prime_tuple_construct(3, 0, auto_shift=True).offsets == (0, 2, 6)


def test_greedy_small_cases():
    assert greedy_narrow(1).offsets == (0,)
    assert greedy_narrow(2).offsets == (0, 2)
    assert greedy_narrow(4).offsets == (0, 2, 6, 8)
    five = greedy_narrow(5)
    assert five.width == 12
    assert five.offsets == (0, 4, 6, 10, 12)


@pytest.mark.parametrize("k", range(1, 13))
def test_greedy_is_admissible_and_canonical(k):
    tuple_ = greedy_narrow(k)
    assert tuple_.k == k
    assert tuple_.is_canonical
    assert is_admissible_exhaustive(tuple_.offsets)[0]


def test_greedy_width_too_small():
    with pytest.raises(InvalidArgumentError):
        greedy_narrow(6, search_width=5)


def test_twin_singular_series(twin):
    fine = singular_series(twin, 10 ** 6)
    coarse = singular_series(twin, 10 ** 4)
    assert 1.3195 <= fine.value <= 1.3215
    assert abs(fine.value - coarse.value) < 1e-4
    assert fine.tail_bound < coarse.tail_bound


def test_singular_series_edge_cases():
    assert singular_series(AdmissibleTuple((0,)), 100).value == 1.0
    dead = singular_series(AdmissibleTuple((0, 2, 4)), 100)
    assert dead.value == 0.0
    assert dead.witness == 3
    with pytest.raises(InvalidArgumentError):
        singular_series(AdmissibleTuple((0, 2, 6, 8, 12)), 3)


def test_singular_series_cutoff_covers_width():
    value = singular_series(AdmissibleTuple((0, 2, 6, 8, 12)), 5)
    assert value.p_max >= 13


def test_parse_tuple(tmp_path):
    assert parse_tuple("0,2,6").offsets == (0, 2, 6)
    assert parse_tuple(" 0, 4 ,6 ").offsets == (0, 4, 6)
    with pytest.raises(InvalidArgumentError):
        parse_tuple("2,4")
    assert parse_tuple("2,4", normalize=True).offsets == (0, 2)
    for bad in ("0,2,2", "a,b", ""):
        with pytest.raises(InvalidArgumentError):
            parse_tuple(bad)

    path = tmp_path / "tuple.txt"
    path.write_text("\n0,2,6,8,12\n")
    assert read_tuple_file(str(path)).offsets == (0, 2, 6, 8, 12)


def test_translation_invariance():
    rng = random.Random(11)
    for _ in range(200):
        offsets = sorted(rng.sample(range(40), rng.randrange(1, 7)))
        shift = rng.randrange(1, 10 ** 6)
        assert is_admissible(offsets) == is_admissible([h + shift for h in offsets])


@pytest.mark.parametrize("k", [2, 5, 8, 12])
def test_every_class_distinct_above_width(k):
    tuple_ = greedy_narrow(k)
    for p in primes_up_to(200):
        if p > tuple_.width:
            assert residue_coverage(tuple_, p) == k, p
