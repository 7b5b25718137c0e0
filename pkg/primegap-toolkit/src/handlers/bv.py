from typing import Optional, Sequence
import logging

from src.core.equidistribution import DEFAULT_CHART_XS, build_discrepancy_report, bv_decay_chart
from src.services.config_service import RunConfig
from src.utils.errors import InvalidArgumentError
from src.utils.response import CommandResult, create_csv_response, create_response

logger = logging.getLogger(__name__)


def discrepancy_report(config: RunConfig) -> CommandResult:
    """Per-modulus discrepancies, bv_sum, E_i and the Cauchy-Schwarz majorants"""
    tuple_ = config.require_tuple()
    report = build_discrepancy_report(
        config.interval, tuple_, config.params,
        i=config.index,
        d_cap=config.d_cap,
        B=config.B,
        workers=config.threads,
        max_moduli=config.max_moduli,
    )
    logger.info(f"bv_sum={report.bv_sum:.6g} over {len(report.per_modulus)} moduli")

    if config.output == 'csv':
        return create_csv_response(['d', 'c', 'delta'], report.rows())

    data = {
        'config': config.to_dict(),
        **report.to_dict(),
        'discrepancies': [list(row) for row in report.rows()],
    }
    return create_response(data)


def decay_chart(config: RunConfig, xs: Optional[Sequence[int]] = None) -> CommandResult:
    """bv_sum / Delta(x) across several x at the configured parameters"""
    tuple_ = config.require_tuple()
    params = config.params
    interval = config.interval
    if interval.delta is not None:
        raise InvalidArgumentError("--chart scales the interval with x; use --A or --theta, "
                                   "not --delta or --dyadic")
    chart = bv_decay_chart(tuple_, params.k0, params.l0, params.varpi,
                           A=interval.A if interval.A is not None else 1.0,
                           xs=tuple(xs) if xs else DEFAULT_CHART_XS, i=config.index,
                           d_cap=config.d_cap, B=config.B, workers=config.threads,
                           theta=interval.theta)

    if config.output == 'csv':
        header = ['x', 'delta', 'D', 'D1', 'moduli', 'bv_sum', 'bv_over_delta', 'ratio_at_B']
        return create_csv_response(header, ([row[h] for h in header] for row in chart))
    return create_response({'config': config.to_dict(), 'A': interval.A, 'theta': interval.theta,
                            'chart': chart})
