from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar
import logging

from src.utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def chunk_ranges(lo: int, hi: int, size: int) -> List[Tuple[int, int]]:
    """Split the closed range [lo, hi] into consecutive closed chunks of at most `size`."""
    if size < 1:
        raise InvalidArgumentError(f"chunk size must be positive, got {size}")
    chunks = []
    start = lo
    while start <= hi:
        end = min(start + size - 1, hi)
        chunks.append((start, end))
        start = end + 1
    return chunks


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply func to every item, returning results in input order.

    With workers > 1 the items are farmed out to a process pool; `func` and the
    items must then be picklable (module-level functions and plain data). The
    result list is the same whatever the worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Dispatching {len(items)} chunks to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def flatten(parts: Sequence[Sequence[T]]) -> List[T]:
    """Concatenate chunk results in order."""
    out: List[T] = []
    for part in parts:
        out.extend(part)
    return out
