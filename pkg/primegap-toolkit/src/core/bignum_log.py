"""
Signed log-space reals and the constant omega of the weighted-sum lower bound.

Numbers such as omega ~ 10^-21385285 underflow every native float, so they are
carried as (sign, natural log of magnitude). Decimal appears only when
rendering.
"""
from fractions import Fraction
from functools import total_ordering
from typing import Tuple, Union
import logging
import math

import attrs
import mpmath
import numpy as np

from src.utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

CANCELLATION_TOLERANCE = 1e-15
STIRLING_THRESHOLD = 32
EXACT_SUMMATION_LIMIT = 10 ** 7
OMEGA_WORKING_DIGITS = 40
PAPER_LN_THRESHOLD = -5e7

# B_{2j} / (2j (2j - 1)), j = 1..7
_STIRLING_COEFFS = tuple(
    float(mpmath.bernoulli(2 * j) / (2 * j * (2 * j - 1))) for j in range(1, 8)
)
_HALF_LN_TWO_PI = 0.5 * math.log(2.0 * math.pi)

Number = Union[int, float, "LogReal"]


def _check_log_real(instance, attribute, value):
    if instance.sign not in (-1, 0, 1):
        raise InvalidArgumentError(f"sign must be -1, 0 or 1, got {instance.sign}")
    if instance.sign == 0 and value != float("-inf"):
        raise InvalidArgumentError("zero must be stored with ln_mag = -inf")
    if instance.sign != 0 and not math.isfinite(value):
        raise InvalidArgumentError(f"nonzero LogReal needs a finite ln_mag, got {value}")


@total_ordering
@attrs.frozen(eq=False)
class LogReal:
    """sign * exp(ln_mag); zero is (0, -inf)."""

    sign: int
    ln_mag: float = attrs.field(converter=float, validator=_check_log_real)

    # construction

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, float("-inf"))

    @classmethod
    def from_ln(cls, ln_mag: float, sign: int = 1) -> "LogReal":
        return cls(sign, ln_mag)

    @classmethod
    def from_float(cls, value: float) -> "LogReal":
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_int(cls, value: int) -> "LogReal":
        """Exact for integers far beyond float range (math.log accepts big ints)."""
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_mpf(cls, value) -> "LogReal":
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, float(mpmath.log(abs(value))))

    @classmethod
    def from_decimal(cls, mantissa: float, exponent: int, sign: int = 1) -> "LogReal":
        return cls(sign, math.log(mantissa) + exponent * math.log(10.0))

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def log10(self) -> float:
        return self.ln_mag / math.log(10.0)

    def to_float(self) -> float:
        """Nearest float; underflows to 0.0 and overflows to +-inf."""
        if self.is_zero:
            return 0.0
        try:
            return self.sign * math.exp(self.ln_mag)
        except OverflowError:
            return self.sign * float("inf")

    def to_dict(self) -> dict:
        """JSON form: sign, natural log, and the decimal rendering when nonzero."""
        if self.is_zero:
            return {"sign": 0, "ln": None, "mantissa": 0.0, "exponent10": 0}
        mantissa, exponent = render_decimal(self)
        return {"sign": self.sign, "ln": self.ln_mag, "mantissa": mantissa, "exponent10": exponent}

    def to_mpf(self):
        if self.is_zero:
            return mpmath.mpf(0)
        return self.sign * mpmath.exp(mpmath.mpf(self.ln_mag))

    # arithmetic

    def __neg__(self) -> "LogReal":
        return self if self.is_zero else LogReal(-self.sign, self.ln_mag)

    def __abs__(self) -> "LogReal":
        return self if self.is_zero else LogReal(1, self.ln_mag)

    def __add__(self, other: Number) -> "LogReal":
        other = _coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        big, small = (self, other) if self.ln_mag >= other.ln_mag else (other, self)
        ratio = math.exp(small.ln_mag - big.ln_mag)
        if big.sign == small.sign:
            return LogReal(big.sign, big.ln_mag + math.log1p(ratio))
        if ratio >= 1.0:
            return LogReal.zero()
        if ratio > 1.0 - CANCELLATION_TOLERANCE:
            logger.warning(f"Possible total cancellation: magnitudes agree to within "
                           f"{1.0 - ratio:.3e} relative")
        return LogReal(big.sign, big.ln_mag + math.log1p(-ratio))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "LogReal":
        return self + (-_coerce(other))

    def __rsub__(self, other: Number) -> "LogReal":
        return _coerce(other) - self

    def __mul__(self, other: Number) -> "LogReal":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.ln_mag + other.ln_mag)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "LogReal":
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("LogReal division by zero")
        if self.is_zero:
            return self
        return LogReal(self.sign * other.sign, self.ln_mag - other.ln_mag)

    def __rtruediv__(self, other: Number) -> "LogReal":
        return _coerce(other) / self

    def __pow__(self, exponent: Union[int, float]) -> "LogReal":
        if self.is_zero:
            if exponent <= 0:
                raise ZeroDivisionError("zero to a nonpositive power")
            return self
        if self.sign < 0:
            if not float(exponent).is_integer():
                raise InvalidArgumentError("negative base needs an integer exponent")
            sign = -1 if int(exponent) % 2 else 1
        else:
            sign = 1
        return LogReal(sign, self.ln_mag * exponent)

    # comparison

    def __eq__(self, other) -> bool:
        if not isinstance(other, (LogReal, int, float)):
            return NotImplemented
        other = _coerce(other)
        return self.sign == other.sign and (self.is_zero or self.ln_mag == other.ln_mag)

    def __lt__(self, other) -> bool:
        if not isinstance(other, (LogReal, int, float)):
            return NotImplemented
        other = _coerce(other)
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.is_zero:
            return False
        if self.sign > 0:
            return self.ln_mag < other.ln_mag
        return self.ln_mag > other.ln_mag

    def __hash__(self) -> int:
        return hash((self.sign, self.ln_mag))

    def __repr__(self) -> str:
        if self.is_zero:
            return "LogReal(0)"
        mantissa, exponent = render_decimal(self)
        sign = "-" if self.sign < 0 else ""
        return f"LogReal({sign}{mantissa:.6f}e{exponent})"


def _coerce(value: Number) -> LogReal:
    if isinstance(value, LogReal):
        return value
    if isinstance(value, int):
        return LogReal.from_int(value)
    return LogReal.from_float(float(value))


def log_real_ops(a: LogReal, b: LogReal, op: str):
    """Dispatch by name: add, subtract, multiply, divide or compare (-1, 0, 1)."""
    if op == "add":
        return a + b
    if op == "subtract":
        return a - b
    if op == "multiply":
        return a * b
    if op == "divide":
        return a / b
    if op == "compare":
        return 0 if a == b else (-1 if a < b else 1)
    raise InvalidArgumentError(f"unknown LogReal operation {op!r}")


# log-gamma and binomials

def _stirling_log_gamma(z: int) -> float:
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0
    for coeff in reversed(_STIRLING_COEFFS):
        series = series * inv2 + coeff
    return (z - 0.5) * math.log(z) - z + _HALF_LN_TWO_PI + series * inv


def log_gamma(n: int, exact: bool = False) -> float:
    """
    ln((n - 1)!) for a positive integer n.

    Small n take the log of the exact factorial; larger n use the Stirling
    series with Bernoulli corrections. exact=True sums ln k directly with
    compensated summation (n <= 10^7) and serves as a cross-check.
    """
    if n < 1:
        raise InvalidArgumentError(f"log_gamma needs n >= 1, got {n}")
    if exact:
        if n > EXACT_SUMMATION_LIMIT:
            raise InvalidArgumentError(
                f"exact summation mode is limited to n <= {EXACT_SUMMATION_LIMIT}")
        if n <= 2:
            return 0.0
        return math.fsum(np.log(np.arange(2, n, dtype=np.float64)))
    if n <= STIRLING_THRESHOLD:
        return math.log(math.factorial(n - 1))
    return _stirling_log_gamma(n)


def log_binomial(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"binomial({n}, {k}) out of range")
    return log_gamma(n + 1) - log_gamma(k + 1) - log_gamma(n - k + 1)


# omega

@attrs.frozen
class OmegaParams:
    k0: int = attrs.field()
    l0: int = attrs.field()
    varpi: Fraction = attrs.field(converter=Fraction)
    kappa1: LogReal = attrs.field(factory=lambda: LogReal.from_ln(-1200.0))
    kappa2: LogReal = attrs.field(factory=lambda: LogReal.from_ln(math.log(1e8) - 1200.0))

    @k0.validator
    def _check_k0(self, attribute, value):
        if value < 1:
            raise InvalidArgumentError(f"k0 must be positive, got {value}")

    @l0.validator
    def _check_l0(self, attribute, value):
        if value < 1:
            raise InvalidArgumentError(f"l0 must be positive, got {value}")

    @classmethod
    def paper(cls) -> "OmegaParams":
        return cls(3_500_000, 180, Fraction(1, 1168))

    def without_kappa(self) -> "OmegaParams":
        return attrs.evolve(self, kappa1=LogReal.zero(), kappa2=LogReal.zero())


def _bracket_terms(p: OmegaParams):
    """The two O(1) terms of the omega bracket, at the ambient mpmath precision."""
    k0, l0 = mpmath.mpf(p.k0), mpmath.mpf(p.l0)
    varpi = mpmath.mpf(p.varpi.numerator) / p.varpi.denominator
    first = 2 * (2 * l0 + 1) * k0 * (1 - p.kappa2.to_mpf()) / ((l0 + 1) * (k0 + 2 * l0 + 1))
    second = 4 * (1 + p.kappa1.to_mpf()) / (1 + 4 * varpi)
    return first, second


def omega_constant(p: OmegaParams) -> LogReal:
    """
    omega = binom(2 l0, l0) / (k0 + 2 l0)! * bracket, where

        bracket = 2(2 l0 + 1) k0 (1 - kappa2) / ((l0 + 1)(k0 + 2 l0 + 1)) - 4(1 + kappa1)/(1 + 4 varpi).

    The bracket is a difference of two nearly equal numbers, so it is
    evaluated with mpmath at OMEGA_WORKING_DIGITS digits. A negative bracket
    yields a negative omega.
    """
    with mpmath.workdps(OMEGA_WORKING_DIGITS):
        first, second = _bracket_terms(p)
        bracket = first - second
        if bracket == 0:
            logger.warning("omega bracket vanishes exactly")
            return LogReal.zero()
        sign = 1 if bracket > 0 else -1
        ln_bracket = float(mpmath.log(abs(bracket)))

    ln_mag = log_binomial(2 * p.l0, p.l0) - log_gamma(p.k0 + 2 * p.l0 + 1) + ln_bracket
    if sign < 0:
        logger.warning(f"omega is negative for k0={p.k0}, l0={p.l0}, varpi={p.varpi}")
    return LogReal(sign, ln_mag)


def omega_sensitivity(p: OmegaParams) -> LogReal:
    """
    Bound on the relative change of omega caused by kappa1, kappa2.

    bracket(kappa) - bracket(0) = -first(0) * kappa2 - second(0) * kappa1, so the
    relative change is at most (first(0) kappa2 + second(0) kappa1) / |bracket(0)|.
    """
    with mpmath.workdps(OMEGA_WORKING_DIGITS):
        first, second = _bracket_terms(p.without_kappa())
        base = first - second
    if base == 0:
        raise InvalidArgumentError("omega vanishes without kappa; relative change undefined")
    shift = LogReal.from_mpf(first) * abs(p.kappa2) + LogReal.from_mpf(second) * abs(p.kappa1)
    return shift / abs(LogReal.from_mpf(base))


def verify_omega_threshold(omega: LogReal, ln_threshold: float = PAPER_LN_THRESHOLD) -> bool:
    """Strict test ln(omega) > ln_threshold for positive omega."""
    if omega.sign != 1:
        raise InvalidArgumentError("threshold check needs a positive omega")
    return omega.ln_mag > ln_threshold


def render_decimal(x: LogReal) -> Tuple[float, int]:
    """(mantissa in [1, 10), exponent) with |x| = mantissa * 10^exponent."""
    if x.is_zero:
        raise InvalidArgumentError("cannot render zero in scientific form")
    with mpmath.workdps(30):
        log10_value = mpmath.mpf(x.ln_mag) / mpmath.log(10)
        exponent = int(mpmath.floor(log10_value))
        mantissa = float(mpmath.power(10, log10_value - exponent))
    if mantissa >= 10.0:
        mantissa /= 10.0
        exponent += 1
    return mantissa, exponent
