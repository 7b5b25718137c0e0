from typing import Any, Dict, Optional, Tuple
import logging

from src.core.admissible import singular_series
from src.core.bignum_log import LogReal, OmegaParams
from src.core.sums import (
    Predictions,
    bound_predictions,
    count_two_prime_translates,
    count_weak_prime_pairs,
    lemma3_statistic,
    pair_count_reference,
)
from src.services.config_service import RunConfig
from src.utils.response import CommandResult, create_csv_response, create_response

logger = logging.getLogger(__name__)


PREDICTION_ROWS = (
    ('s1_bound', 's1_bound'),
    ('s2_bound', 's2_bound'),
    ('omega', 'omega'),
    ('omega_prediction', 'omega_prediction'),
    ('inequality_rhs', 'inequality_rhs'),
    ('error_d_squared', 'd_squared'),
    ('error_x_7_12', 'x_seven_twelfths'),
)


def _predictions_only(config: RunConfig) -> Tuple[Optional[float], Predictions]:
    params = config.params
    if config.tuple_ is not None:
        series = singular_series(config.tuple_, max(config.singular_pmax, config.tuple_.k))
        singular, series_value = LogReal.from_float(series.value), series.value
    else:
        # predictions per unit of singular series
        singular, series_value = LogReal.from_float(1.0), None
    predictions = bound_predictions(config.interval, params, singular,
                                    OmegaParams(params.k0, params.l0, params.varpi),
                                    config.strict_paper)
    return series_value, predictions


def _prediction_csv(series_value: Optional[float], predictions: Predictions) -> CommandResult:
    """One row per predicted quantity in sign / mantissa / exponent10 / ln form"""
    values = [(name, getattr(predictions, attr)) for name, attr in PREDICTION_ROWS]
    if series_value is not None:
        values.append(('singular_series', LogReal.from_float(series_value)))
    rows = []
    for name, value in values:
        rendered = value.to_dict()
        rows.append((name, rendered['sign'], rendered['mantissa'], rendered['exponent10'],
                     rendered['ln']))
    return create_csv_response(['quantity', 'sign', 'mantissa', 'exponent10', 'ln'], rows)


def _pair_counts(config: RunConfig, gap_bound: Optional[int]) -> Dict[str, Any]:
    tuple_ = config.require_tuple()
    bound = gap_bound if gap_bound is not None else tuple_.width + 1
    return {
        'gap_bound': bound,
        'weak_prime_pairs': count_weak_prime_pairs(config.interval, bound, config.segment_size),
        'two_prime_translates': count_two_prime_translates(config.interval, tuple_,
                                                           config.segment_size),
        'reference_x_1_minus_eps': pair_count_reference(config.interval, config.epsilon),
        'epsilon': config.epsilon,
    }


def short_interval_sums(config: RunConfig, predict_only: bool = False,
                        gap_bound: Optional[int] = None) -> CommandResult:
    """S1, S2, the statistic S2 - ln(3x) S1, predictions and prime-pair counts"""
    if predict_only:
        series_value, predictions = _predictions_only(config)
        if config.output == 'csv':
            return _prediction_csv(series_value, predictions)
        data = {'config': config.to_dict(), 'predict_only': True,
                'singular_series': series_value, **predictions.to_dict()}
        return create_response(data)

    tuple_ = config.require_tuple()
    report = lemma3_statistic(
        config.interval, tuple_, config.params,
        singular_pmax=config.singular_pmax,
        strict_paper=config.strict_paper,
        workers=config.threads,
        chunk_size=config.chunk_size,
        max_entries=config.max_batch_entries,
        segment_size=config.segment_size,
    )
    pairs = _pair_counts(config, gap_bound)

    if config.output == 'csv':
        rows = [
            ('s1', report.s1),
            ('s2', report.s2),
            ('statistic', report.statistic),
            ('singular_series', report.singular_series),
            ('s1_bound_ln', report.s1_bound.ln_mag),
            ('s2_bound_ln', report.s2_bound.ln_mag),
            ('omega_prediction_ln', report.omega_prediction.ln_mag),
            ('weak_prime_pairs', pairs['weak_prime_pairs']),
            ('two_prime_translates', pairs['two_prime_translates']),
        ]
        return create_csv_response(['quantity', 'value'], rows)

    data = {'config': config.to_dict(), 'predict_only': False, **report.to_dict(), 'pairs': pairs}
    return create_response(data)

