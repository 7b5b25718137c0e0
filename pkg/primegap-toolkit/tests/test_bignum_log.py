from fractions import Fraction
import math

import mpmath
import pytest

from src.core.bignum_log import (
    LogReal,
    OmegaParams,
    PAPER_LN_THRESHOLD,
    log_binomial,
    log_gamma,
    log_real_ops,
    omega_constant,
    omega_sensitivity,
    render_decimal,
    verify_omega_threshold,
)
from src.utils.errors import InvalidArgumentError


def test_arithmetic_matches_floats():
    a, b = LogReal.from_float(2.0), LogReal.from_float(3.0)
    assert (a * b).to_float() == pytest.approx(6.0)
    assert (a + b).to_float() == pytest.approx(5.0)
    assert (b - a).to_float() == pytest.approx(1.0)
    assert (a - b).to_float() == pytest.approx(-1.0)
    assert (a / b).to_float() == pytest.approx(2.0 / 3.0)
    assert (a ** 10).to_float() == pytest.approx(1024.0)
    assert ((-a) ** 3).to_float() == pytest.approx(-8.0)


def test_zero_handling():
    zero = LogReal.zero()
    x = LogReal.from_float(4.0)
    assert (x - x).is_zero
    assert (zero + x) == x
    assert (zero * x).is_zero
    assert zero.to_float() == 0.0
    with pytest.raises(ZeroDivisionError):
        x / zero
    with pytest.raises(InvalidArgumentError):
        LogReal(0, 1.0)


def test_huge_magnitudes_stay_finite():
    tiny = LogReal.from_ln(-5e7)
    assert tiny.to_float() == 0.0
    assert (tiny * tiny).ln_mag == pytest.approx(-1e8)
    mantissa, exponent = render_decimal(LogReal.from_decimal(3.647, -21385285))
    assert mantissa == pytest.approx(3.647, abs=1e-6)
    assert exponent == -21385285


def test_ordering_and_dispatch():
    small, big = LogReal.from_float(-5.0), LogReal.from_float(2.0)
    assert small < LogReal.zero() < big
    assert log_real_ops(small, big, "compare") == -1
    assert log_real_ops(big, big, "compare") == 0
    assert log_real_ops(big, small, "add").to_float() == pytest.approx(-3.0)
    with pytest.raises(InvalidArgumentError):
        log_real_ops(big, small, "modulo")


def test_to_dict_carries_decimal_form():
    payload = LogReal.from_float(1234.5).to_dict()
    assert payload["sign"] == 1
    assert payload["exponent10"] == 3
    assert payload["mantissa"] == pytest.approx(1.2345)


@pytest.mark.parametrize("n", [1, 2, 5, 32, 33, 100, 1000, 12345])
def test_log_gamma_against_exact_factorial(n):
    exact = float(mpmath.log(mpmath.factorial(n - 1)))
    assert log_gamma(n) == pytest.approx(exact, rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("n", [10 ** 3, 10 ** 5, 3_500_361])
def test_log_gamma_summation_cross_check(n):
    assert log_gamma(n) == pytest.approx(log_gamma(n, exact=True), rel=1e-12)


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        log_gamma(0)


def test_log_binomial():
    assert math.exp(log_binomial(10, 3)) == pytest.approx(120.0)
    assert log_binomial(360, 180) == pytest.approx(math.log(math.comb(360, 180)), rel=1e-13)
    with pytest.raises(InvalidArgumentError):
        log_binomial(3, 4)


def test_paper_omega_reproduced():
    omega = omega_constant(OmegaParams.paper())
    mantissa, exponent = render_decimal(omega)
    assert omega.sign == 1
    assert exponent == -21385285
    assert mantissa == pytest.approx(3.647, abs=1e-3)
    reference = math.log10(3.647) - 21385285
    assert abs(omega.log10 - reference) <= 1e-3


def test_paper_omega_clears_threshold():
    omega = omega_constant(OmegaParams.paper())
    assert verify_omega_threshold(omega, PAPER_LN_THRESHOLD)
    assert not verify_omega_threshold(omega, -1e7)
    with pytest.raises(InvalidArgumentError):
        verify_omega_threshold(-omega)


def test_omega_small_case_is_exact_fraction():
    # bracket 2(2l0+1)k0/((l0+1)(k0+2l0+1)) - 4/(1+4 varpi) with kappas removed
    params = OmegaParams(4, 1, Fraction(1, 1000)).without_kappa()
    bracket = Fraction(2 * 3 * 4, 2 * 7) - Fraction(4) / (1 + 4 * Fraction(1, 1000))
    expected = Fraction(math.comb(2, 1), math.factorial(6)) * bracket
    omega = omega_constant(params)
    assert omega.sign == -1
    assert omega.to_float() == pytest.approx(float(expected), rel=1e-12)


def test_kappa_sensitivity_below_rendering_precision():
    change = omega_sensitivity(OmegaParams.paper())
    assert change.ln_mag < math.log(1e-100)
