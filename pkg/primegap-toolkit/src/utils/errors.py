from typing import Optional

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VERDICT = 3
EXIT_RESOURCE = 4


class PrimeGapError(Exception):
    """Base error for the toolkit. Carries the CLI exit code."""

    exit_code = EXIT_FAILURE

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InvalidArgumentError(PrimeGapError, ValueError):
    """An argument violates an operation's precondition."""

    exit_code = EXIT_USAGE


class ProfileError(PrimeGapError):
    """The selected profile does not permit the request."""

    exit_code = EXIT_USAGE


class InadmissibleTupleError(PrimeGapError, ValueError):
    """A tuple covers every residue class modulo some prime."""

    exit_code = EXIT_VERDICT

    def __init__(self, offsets, witness: int):
        self.offsets = tuple(offsets)
        self.witness = witness
        super().__init__(f"tuple {','.join(map(str, self.offsets))} is inadmissible: "
                         f"covers every class mod {witness}")


class ResourceLimitError(PrimeGapError):
    """A computation would exceed a configured cap."""

    exit_code = EXIT_RESOURCE

    def __init__(self, cap: str, limit: int, requested: Optional[int] = None):
        self.cap = cap
        self.limit = limit
        self.requested = requested
        detail = f" (requested {requested})" if requested is not None else ""
        super().__init__(f"{cap} exceeded: limit {limit}{detail}")


class DivisorOverflowError(ResourceLimitError):
    """Too many distinct smooth prime factors to enumerate divisors of one n."""

    def __init__(self, n: int, limit: int, found: int):
        self.n = n
        super().__init__("max_smooth_prime_factors", limit, found)
