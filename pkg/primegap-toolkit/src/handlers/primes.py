from typing import Optional
import logging

from src.core.arith_core import DEFAULT_SEGMENT_SIZE, sieve_primes
from src.utils.errors import InvalidArgumentError
from src.utils.response import (
    CommandResult,
    create_csv_response,
    create_response,
    create_text_response,
)
from src.utils.validation import validate_range

logger = logging.getLogger(__name__)


def list_primes(lo: int, hi: int, count_only: bool = False, output: str = 'text',
                threads: int = 1, segment_size: Optional[int] = None) -> CommandResult:
    """Primes in [lo, hi], one per line, as JSON or as CSV"""
    if not validate_range(lo, hi):
        raise InvalidArgumentError(f"invalid range [{lo}, {hi}]")

    table = sieve_primes(lo, hi, segment_size or DEFAULT_SEGMENT_SIZE, workers=threads)
    logger.info(f"Found {len(table)} primes in [{lo}, {hi}]")

    if output == 'json':
        data = {'lo': lo, 'hi': hi, 'count': len(table)}
        if not count_only:
            data['primes'] = list(table.primes)
        return create_response(data)
    if count_only:
        return create_text_response([len(table)])
    if output == 'csv':
        return create_csv_response(['p'], ([p] for p in table))
    return create_text_response(table)
