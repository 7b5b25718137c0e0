from typing import Any, Dict, Optional
import math

import attrs

from src.utils.errors import InvalidArgumentError


def _check_mode(instance, attribute, value):
    modes = [m for m in (instance.delta, instance.A, instance.theta) if m is not None]
    if len(modes) != 1:
        raise InvalidArgumentError("give exactly one of delta, A or theta")
    if instance.x < 1:
        raise InvalidArgumentError(f"x must be positive, got {instance.x}")
    if instance.delta is not None and instance.delta < 0:
        raise InvalidArgumentError(f"delta must be nonnegative, got {instance.delta}")
    if instance.A is not None:
        if instance.A < 0:
            raise InvalidArgumentError(f"A must be nonnegative, got {instance.A}")
        if instance.x < 2:
            raise InvalidArgumentError("the (log x)^-A length needs x >= 2")
    if instance.theta is not None and not 0 < instance.theta <= 1:
        raise InvalidArgumentError(f"theta must lie in (0, 1], got {instance.theta}")


@attrs.frozen
class IntervalSpec:
    """
    Closed interval [x, x + Delta(x)].

    Delta is given explicitly, as floor(x / (ln x)^A), or as floor(x^theta).
    """

    x: int
    delta: Optional[int] = None
    A: Optional[float] = None
    theta: Optional[float] = attrs.field(default=None, validator=_check_mode)

    @classmethod
    def explicit(cls, x: int, delta: int) -> "IntervalSpec":
        return cls(x, delta=delta)

    @classmethod
    def log_power(cls, x: int, A: float) -> "IntervalSpec":
        return cls(x, A=float(A))

    @classmethod
    def power(cls, x: int, theta: float) -> "IntervalSpec":
        return cls(x, theta=float(theta))

    @classmethod
    def dyadic(cls, x: int) -> "IntervalSpec":
        """[x, 2x], the long interval of the classical inequality."""
        return cls(x, delta=x)

    @property
    def length(self) -> int:
        """Delta(x)."""
        if self.delta is not None:
            return self.delta
        if self.A is not None:
            return math.floor(self.x / math.log(self.x) ** self.A)
        return math.floor(self.x ** self.theta)

    @property
    def lo(self) -> int:
        return self.x

    @property
    def hi(self) -> int:
        return self.x + self.length

    @property
    def size(self) -> int:
        return self.length + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x,
            "delta": self.length,
            "A": self.A,
            "theta": self.theta,
            "lo": self.lo,
            "hi": self.hi,
        }
