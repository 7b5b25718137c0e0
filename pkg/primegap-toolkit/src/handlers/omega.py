import logging

from src.core.bignum_log import (
    PAPER_LN_THRESHOLD,
    OmegaParams,
    omega_constant,
    omega_sensitivity,
    verify_omega_threshold,
)
from src.services.config_service import RunConfig
from src.utils.response import CommandResult, create_csv_response, create_response

logger = logging.getLogger(__name__)


def omega_value(config: RunConfig, ln_threshold: float = PAPER_LN_THRESHOLD,
                sensitivity: bool = False) -> CommandResult:
    """omega for (k0, l0, varpi), in scientific form, with the threshold check"""
    params = config.params
    omega_params = OmegaParams(params.k0, params.l0, params.varpi)
    omega = omega_constant(omega_params)
    rendered = omega.to_dict()
    positive = omega.sign == 1
    exceeds_paper = verify_omega_threshold(omega, PAPER_LN_THRESHOLD) if positive else False
    exceeds = verify_omega_threshold(omega, ln_threshold) if positive else False
    logger.info(f"omega = {rendered['mantissa']}e{rendered['exponent10']}")

    data = {
        'config': config.to_dict(),
        'mantissa': rendered['mantissa'],
        'exponent10': rendered['exponent10'],
        'sign': omega.sign,
        'ln_value': rendered['ln'],
        'log10': omega.log10 if not omega.is_zero else None,
        'ln_threshold': ln_threshold,
        'exceeds_exp_minus_5e7': exceeds_paper,
        'exceeds_threshold': exceeds,
    }
    if sensitivity:
        data['kappa_relative_change'] = omega_sensitivity(omega_params).to_dict()

    if config.output == 'csv':
        keys = ['mantissa', 'exponent10', 'sign', 'ln_value', 'exceeds_exp_minus_5e7',
                'exceeds_threshold']
        return create_csv_response(keys, [[data[k] for k in keys]])
    return create_response(data)
