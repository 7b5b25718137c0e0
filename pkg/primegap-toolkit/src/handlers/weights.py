from typing import Optional, Sequence
import logging

from src.core.sieve_weights import lambda_batch, lambda_sup_report, lambda_weight
from src.services.config_service import RunConfig
from src.utils.errors import InvalidArgumentError
from src.utils.response import CommandResult, create_csv_response, create_response

logger = logging.getLogger(__name__)


def weight_table(config: RunConfig, points: Sequence[int] = (),
                 sup_epsilon: Optional[float] = None) -> CommandResult:
    """lambda(n) at given points, or over the whole configured interval"""
    tuple_ = config.require_tuple()
    params = config.params

    if points:
        if any(n < 1 for n in points):
            raise InvalidArgumentError("lambda is evaluated for n >= 1")
        rows = [(n, lambda_weight(n, tuple_, params)) for n in sorted(set(points))]
        sup = None
    else:
        table = lambda_batch(config.interval, tuple_, params, workers=config.threads,
                             chunk_size=config.chunk_size,
                             max_entries=config.max_batch_entries)
        rows = table.rows()
        sup = lambda_sup_report(table, sup_epsilon) if sup_epsilon is not None else None

    if config.output == 'csv':
        return create_csv_response(['n', 'lambda'], rows)

    data = {
        'config': config.to_dict(),
        'weights': [list(row) for row in rows],
        'max_abs': max((abs(v) for _, v in rows), default=0.0),
    }
    if sup is not None:
        data['sup'] = {'epsilon': sup_epsilon, **sup._asdict()}
    return create_response(data)
