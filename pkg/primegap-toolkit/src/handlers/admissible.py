from typing import Optional
import logging

from src.core.admissible import (
    AdmissibleTuple,
    greedy_narrow,
    is_admissible,
    is_admissible_exhaustive,
    parse_tuple,
    prime_tuple_construct,
    read_tuple_file,
    singular_series,
)
from src.core.arith_core import primes_up_to
from src.core.sums import DEFAULT_SINGULAR_PMAX
from src.utils.errors import EXIT_OK, EXIT_VERDICT, InvalidArgumentError
from src.utils.response import CommandResult, create_response
from src.utils.validation import validate_tuple_text

logger = logging.getLogger(__name__)

GENERATION_METHODS = ['greedy', 'primes']


def _describe(tuple_: AdmissibleTuple, singular_pmax: int):
    series = singular_series(tuple_, max(singular_pmax, tuple_.k))
    return {
        'tuple': list(tuple_.offsets),
        'k': tuple_.k,
        'width': tuple_.width,
        'singular_series': series.value,
        'singular_series_pmax': series.p_max,
        'singular_series_tail': series.tail_bound,
    }


def verify_tuple(text: Optional[str] = None, path: Optional[str] = None,
                 normalize: bool = False, exhaustive: bool = False,
                 singular_pmax: int = DEFAULT_SINGULAR_PMAX) -> CommandResult:
    """Admissibility verdict with witness; inadmissible input ends with the verdict exit code"""
    if bool(text) == bool(path):
        raise InvalidArgumentError("give offsets or --file, or use --generate")
    if text is not None and not validate_tuple_text(text):
        raise InvalidArgumentError(f"cannot parse tuple {text!r}")

    tuple_ = parse_tuple(text, normalize) if text else read_tuple_file(path, normalize)
    check = is_admissible_exhaustive if exhaustive else is_admissible
    ok, witness = check(tuple_.offsets)
    logger.info(f"Tuple {tuple_.to_text()}: admissible={ok} witness={witness}")

    if not ok:
        data = {'admissible': False, 'witness': witness, 'tuple': list(tuple_.offsets),
                'k': tuple_.k, 'width': tuple_.width}
        return create_response(data, exit_code=EXIT_VERDICT)
    data = {'admissible': True, 'witness': None, **_describe(tuple_, singular_pmax)}
    return create_response(data, exit_code=EXIT_OK)


def generate_tuple(k: int, method: str = 'greedy', m: Optional[int] = None,
                   search_width: Optional[int] = None, auto_shift: bool = True,
                   singular_pmax: int = DEFAULT_SINGULAR_PMAX) -> CommandResult:
    """Generate an admissible k-tuple, canonical form and width"""
    if method not in GENERATION_METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}")
    if k < 1:
        raise InvalidArgumentError(f"k must be positive, got {k}")

    if method == 'greedy':
        tuple_ = greedy_narrow(k, search_width)
    else:
        # first window of k primes above k is admissible
        start = m if m is not None else len(primes_up_to(k))
        tuple_ = prime_tuple_construct(k, start, auto_shift=auto_shift)

    data = {'method': method, 'admissible': True, **_describe(tuple_, singular_pmax)}
    return create_response(data)
