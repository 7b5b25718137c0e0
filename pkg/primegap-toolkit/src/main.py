from functools import wraps
from typing import Any, Callable, Dict
import logging
import sys

import click

from src.handlers import admissible, bv, omega, primes, sums, weights
from src.services.config_service import PROFILE_ENV_VAR, coerce_flags, config_service
from src.utils.errors import EXIT_FAILURE, PrimeGapError
from src.utils.response import CommandResult, create_error_response
from src.utils.validation import VALID_OUTPUTS, VALID_PRIME_OUTPUTS, VALID_PROFILES

# Configure logging
logging.basicConfig(level=logging.INFO, stream=sys.stderr)
logger = logging.getLogger(__name__)

RUN_KEYS = (
    'profile', 'k0', 'l0', 'varpi', 'x', 'A', 'delta', 'theta', 'dyadic', 'tuple',
    'tuple_file', 'output', 'seed', 'threads', 'segment_size', 'max_batch_entries',
    'max_moduli', 'chunk_size', 'singular_pmax',
)


def emit(result: CommandResult) -> None:
    if result.body:
        click.echo(result.body)
    sys.exit(result.exit_code)


def handle_errors(func: Callable[..., CommandResult]) -> Callable[..., None]:
    """Global exception handler: toolkit errors map to their exit codes, anything else to 1."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            result = func(*args, **kwargs)
        except PrimeGapError as exc:
            logger.error(f"{func.__name__}: {exc.message}")
            click.echo(create_error_response(exc.exit_code, exc.message).body, err=True)
            sys.exit(exc.exit_code)
        except Exception as exc:
            logger.error(f"Unexpected failure in {func.__name__}: {str(exc)}")
            click.echo(create_error_response(EXIT_FAILURE, "internal error").body, err=True)
            sys.exit(EXIT_FAILURE)
        emit(result)
    return wrapper


def run_options(func):
    """Options shared by the commands that resolve a full RunConfig."""
    options = [
        click.option('--profile', type=click.Choice(VALID_PROFILES), envvar=PROFILE_ENV_VAR,
                     default=None, help='Parameter profile (env PRIMEGAP_PROFILE).'),
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help='Flat key=value config file.'),
        click.option('--k0', help='Tuple size k0.'),
        click.option('--l0', help='Weight exponent l0.'),
        click.option('--varpi', help='Level parameter varpi, e.g. 1/4.'),
        click.option('--x', 'x', help='Interval start x.'),
        click.option('--A', 'A', help='Length x / (ln x)^A.'),
        click.option('--delta', help='Explicit interval length.'),
        click.option('--theta', help='Length x^theta.'),
        click.option('--dyadic', is_flag=True, help='Use the long interval [x, 2x].'),
        click.option('--tuple', 'tuple', help='Offsets, e.g. 0,2,6,8,12.'),
        click.option('--tuple-file', type=click.Path(exists=True, dir_okay=False)),
        click.option('--output', type=click.Choice(VALID_OUTPUTS), default=None),
        click.option('--seed', help='Seed for randomized selection (core math is deterministic).'),
        click.option('--threads', help='Worker processes; output does not depend on it.'),
        click.option('--segment-size'),
        click.option('--max-batch-entries'),
        click.option('--max-moduli'),
        click.option('--chunk-size'),
        click.option('--singular-pmax'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(command: str, config_path, kwargs: Dict[str, Any], **extra):
    raw = {key: kwargs.pop(key) for key in RUN_KEYS}
    raw.update(extra)
    return config_service.resolve(command, coerce_flags(raw), config_path)


@click.group()
@click.option('--verbose', 'verbosity', flag_value='verbose', help='Debug logging.')
@click.option('--quiet', 'verbosity', flag_value='quiet', help='Warnings and errors only.')
def cli(verbosity):
    """Bounded prime gaps in short intervals: sieves, weights, sums and discrepancies."""
    if verbosity == 'verbose':
        logging.getLogger().setLevel(logging.DEBUG)
    elif verbosity == 'quiet':
        logging.getLogger().setLevel(logging.WARNING)


@cli.command('primes')
@click.argument('lo', type=int)
@click.argument('hi', type=int)
@click.option('--count', 'count_only', is_flag=True, help='Print only the number of primes.')
@click.option('--output', type=click.Choice(VALID_PRIME_OUTPUTS), default='text')
@click.option('--threads', type=int, default=1)
@click.option('--segment-size', type=int, default=None)
@handle_errors
def primes_command(lo, hi, count_only, output, threads, segment_size):
    """Primes in [LO, HI]."""
    return primes.list_primes(lo, hi, count_only, output, threads, segment_size)


@cli.command('admissible')
@click.argument('offsets', required=False)
@click.option('--generate', 'generate_k', type=int, help='Generate an admissible k-tuple.')
@click.option('--method', type=click.Choice(admissible.GENERATION_METHODS), default='greedy')
@click.option('--m', 'm', type=int, default=None, help='Prime window start for --method primes.')
@click.option('--search-width', type=int, default=None)
@click.option('--file', 'path', type=click.Path(exists=True, dir_okay=False))
@click.option('--normalize', is_flag=True, help='Shift offsets so h1 = 0.')
@click.option('--exhaustive', is_flag=True, help='Check every prime up to width + 1.')
@click.option('--singular-pmax', type=int, default=10 ** 5)
@handle_errors
def admissible_command(offsets, generate_k, method, m, search_width, path, normalize,
                       exhaustive, singular_pmax):
    """Verify OFFSETS (or --file) or generate a narrow admissible tuple."""
    if generate_k is not None:
        return admissible.generate_tuple(generate_k, method, m, search_width,
                                         singular_pmax=singular_pmax)
    return admissible.verify_tuple(offsets, path, normalize, exhaustive, singular_pmax)


@cli.command('weights')
@run_options
@click.option('--n', 'points', type=int, multiple=True, help='Evaluate at n (repeatable).')
@click.option('--sup-epsilon', type=float, default=None,
              help='Compare max |lambda| with x^eps (ln D)^(k0+l0) / (k0+l0)!.')
@handle_errors
def weights_command(config_path, points, sup_epsilon, **kwargs):
    """Sieve weights lambda(n) over the interval or at chosen n."""
    config = resolve_config('weights', config_path, kwargs)
    return weights.weight_table(config, points, sup_epsilon)


@cli.command('sums')
@run_options
@click.option('--predict-only', is_flag=True, help='Only the asymptotic predictions.')
@click.option('--strict-paper', is_flag=True, help='Use x instead of Delta(x) in the S1 bound.')
@click.option('--gap-bound', type=int, default=None, help='Gap bound for weak prime pairs.')
@click.option('--epsilon', default=None, help='Exponent of the x^(1 - eps) pair reference.')
@handle_errors
def sums_command(config_path, predict_only, strict_paper, gap_bound, epsilon, **kwargs):
    """S1, S2, the statistic S2 - ln(3x) S1 and prime-pair counts."""
    command = 'sums-predict' if predict_only else 'sums'
    config = resolve_config(command, config_path, kwargs,
                            strict_paper=strict_paper, epsilon=epsilon)
    return sums.short_interval_sums(config, predict_only, gap_bound)


@cli.command('bv')
@run_options
@click.option('--d-cap', default=None, help='Modulus cap, at most D^2 (default D^2).')
@click.option('--B', 'B', default=None, help='Exponent in the Delta (ln x)^-B target.')
@click.option('--index', default=None, help='Tuple index i for the per-modulus table.')
@click.option('--chart', is_flag=True, help='Tabulate bv_sum / Delta(x) across x.')
@click.option('--chart-x', 'chart_xs', multiple=True, help='x values for --chart (repeatable).')
@handle_errors
def bv_command(config_path, d_cap, B, index, chart, chart_xs, **kwargs):
    """Short-interval discrepancies over smooth squarefree moduli."""
    config = resolve_config('bv', config_path, kwargs, d_cap=d_cap, B=B, index=index)
    if chart:
        xs = [coerce_flags({'x': x})['x'] for x in chart_xs]
        return bv.decay_chart(config, xs)
    return bv.discrepancy_report(config)


@cli.command('omega')
@run_options
@click.option('--ln-threshold', type=float, default=-5e7, help='Check ln(omega) > threshold.')
@click.option('--sensitivity', is_flag=True, help='Report the relative effect of kappa1, kappa2.')
@handle_errors
def omega_command(config_path, ln_threshold, sensitivity, **kwargs):
    """The constant omega of the main term."""
    config = resolve_config('omega', config_path, kwargs)
    return omega.omega_value(config, ln_threshold, sensitivity)


if __name__ == '__main__':
    cli()
