from fractions import Fraction
from typing import Any, Callable, Dict, Mapping, Optional
import logging
import os

import attrs
from dotenv import dotenv_values, load_dotenv

from src.core.admissible import AdmissibleTuple, greedy_narrow, parse_tuple, read_tuple_file
from src.core.arith_core import DEFAULT_SEGMENT_SIZE
from src.core.equidistribution import DEFAULT_MAX_MODULI
from src.core.intervals import IntervalSpec
from src.core.sieve_weights import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_BATCH_ENTRIES,
    PAPER_K0,
    PAPER_L0,
    PAPER_VARPI,
    SieveParams,
)
from src.core.sums import DEFAULT_SINGULAR_PMAX
from src.utils.errors import InvalidArgumentError, ProfileError
from src.utils.validation import (
    parse_bool,
    parse_float,
    parse_fraction,
    parse_int,
    parse_optional_int,
    validate_output,
    validate_profile,
    validate_tuple_text,
)

logger = logging.getLogger(__name__)

PROFILE_ENV_VAR = 'PRIMEGAP_PROFILE'
DEFAULT_PROFILE = 'desk'
DESK_MAX_K0 = 12

LENGTH_KEYS = ('delta', 'A', 'theta', 'dyadic')

PAPER_COMMANDS = {'omega', 'sums-predict'}

PROFILE_DEFAULTS: Dict[str, Dict[str, Any]] = {
    'paper': {'k0': PAPER_K0, 'l0': PAPER_L0, 'varpi': PAPER_VARPI, 'x': 10 ** 9, 'A': 1.0},
    'desk': {'k0': 4, 'l0': 1, 'varpi': Fraction(1, 4), 'x': 10 ** 6, 'A': 1.0},
    'custom': {'k0': 4, 'l0': 1, 'varpi': Fraction(1, 4), 'x': 10 ** 6, 'A': 1.0},
}

SETTING_DEFAULTS: Dict[str, Any] = {
    'output': 'json',
    'seed': 0,
    'threads': 1,
    'segment_size': DEFAULT_SEGMENT_SIZE,
    'max_batch_entries': DEFAULT_MAX_BATCH_ENTRIES,
    'max_moduli': DEFAULT_MAX_MODULI,
    'chunk_size': DEFAULT_CHUNK_SIZE,
    'singular_pmax': DEFAULT_SINGULAR_PMAX,
    'd_cap': None,
    'B': 1.0,
    'index': 1,
    'epsilon': 0.1,
    'strict_paper': False,
}

# config-file key -> converter from text
FILE_KEYS: Dict[str, Callable[[str, str], Any]] = {
    'profile': lambda text, name: text.strip(),
    'k0': parse_int,
    'l0': parse_int,
    'varpi': parse_fraction,
    'x': parse_int,
    'A': parse_float,
    'delta': parse_int,
    'theta': parse_float,
    'dyadic': parse_bool,
    'tuple': lambda text, name: text.strip(),
    'tuple_file': lambda text, name: text.strip(),
    'output': lambda text, name: text.strip(),
    'seed': parse_int,
    'threads': parse_int,
    'segment_size': parse_int,
    'max_batch_entries': parse_int,
    'max_moduli': parse_int,
    'chunk_size': parse_int,
    'singular_pmax': parse_int,
    'd_cap': parse_optional_int,
    'B': parse_float,
    'index': parse_int,
    'epsilon': parse_float,
    'strict_paper': parse_bool,
}


@attrs.frozen
class RunConfig:
    """Effective configuration of one command run."""

    profile: str
    params: SieveParams
    interval: IntervalSpec
    tuple_: Optional[AdmissibleTuple]
    tuple_source: Optional[str]
    output: str = 'json'
    seed: int = 0
    threads: int = 1
    segment_size: int = DEFAULT_SEGMENT_SIZE
    max_batch_entries: int = DEFAULT_MAX_BATCH_ENTRIES
    max_moduli: int = DEFAULT_MAX_MODULI
    chunk_size: int = DEFAULT_CHUNK_SIZE
    singular_pmax: int = DEFAULT_SINGULAR_PMAX
    d_cap: Optional[int] = None
    B: float = 1.0
    index: int = 1
    epsilon: float = 0.1
    strict_paper: bool = False

    def require_tuple(self) -> AdmissibleTuple:
        if self.tuple_ is None:
            raise InvalidArgumentError("this command needs a tuple (--tuple or --tuple-file)")
        return self.tuple_

    def to_dict(self) -> Dict[str, Any]:
        """Echo of the effective configuration; threads is left out since output never depends on it."""
        return {
            'profile': self.profile,
            'params': self.params.to_dict(),
            'interval': self.interval.to_dict(),
            'tuple': list(self.tuple_.offsets) if self.tuple_ is not None else None,
            'tuple_source': self.tuple_source,
            'seed': self.seed,
            'segment_size': self.segment_size,
            'max_batch_entries': self.max_batch_entries,
            'max_moduli': self.max_moduli,
            'chunk_size': self.chunk_size,
            'singular_pmax': self.singular_pmax,
            'd_cap': self.d_cap,
            'B': self.B,
            'index': self.index,
            'epsilon': self.epsilon,
            'strict_paper': self.strict_paper,
        }


class ConfigService:
    def __init__(self):
        load_dotenv()
        self.default_profile = os.environ.get(PROFILE_ENV_VAR, DEFAULT_PROFILE)

    def load_file(self, path: Optional[str]) -> Dict[str, Any]:
        """Read a flat key=value file into typed values."""
        if not path:
            return {}
        if not os.path.isfile(path):
            raise InvalidArgumentError(f"config file {path} not found")
        raw = dotenv_values(path)
        values = {}
        for key, text in raw.items():
            if key not in FILE_KEYS:
                raise InvalidArgumentError(f"unknown config key {key!r} in {path}")
            if text is None:
                raise InvalidArgumentError(f"config key {key!r} in {path} has no value")
            values[key] = FILE_KEYS[key](text, key)
        logger.info(f"Loaded {len(values)} settings from {path}")
        return values

    def resolve(self, command: str, flags: Mapping[str, Any],
                config_path: Optional[str] = None) -> RunConfig:
        """
        Merge profile defaults, the config file and explicit flags (in rising
        precedence) and enforce the profile rules for `command`.
        """
        flags = {k: v for k, v in flags.items() if v is not None}
        file_values = self.load_file(config_path)
        profile = flags.pop('profile', None) or file_values.pop('profile', None) \
            or self.default_profile
        file_values.pop('profile', None)
        if not validate_profile(profile):
            raise InvalidArgumentError(f"unknown profile {profile!r}")

        base = dict(PROFILE_DEFAULTS[profile])
        merged: Dict[str, Any] = {**SETTING_DEFAULTS, **base}
        for layer in (file_values, flags):
            if any(key in layer for key in LENGTH_KEYS):
                for key in LENGTH_KEYS:
                    merged.pop(key, None)
            merged.update(layer)
        explicit = set(file_values) | set(flags)

        if profile == 'paper':
            self._check_paper(command, merged, base)

        tuple_, source = self._resolve_tuple(merged)
        if tuple_ is not None and 'k0' not in explicit and profile != 'paper':
            merged['k0'] = tuple_.k
        if profile == 'desk' and merged['k0'] > DESK_MAX_K0:
            raise ProfileError(f"desk profile requires k0 <= {DESK_MAX_K0}, got {merged['k0']}; "
                               f"use --profile custom")
        if tuple_ is None and profile != 'paper':
            tuple_ = greedy_narrow(merged['k0'])
            source = 'generated'
        if tuple_ is not None and tuple_.k != merged['k0']:
            raise InvalidArgumentError(f"tuple has {tuple_.k} offsets but k0 = {merged['k0']}")

        if not validate_output(merged['output']):
            raise InvalidArgumentError(f"unknown output format {merged['output']!r}")
        if merged['threads'] < 1:
            raise InvalidArgumentError(f"threads must be positive, got {merged['threads']}")

        params = SieveParams(merged['k0'], merged['l0'], merged['varpi'], merged['x'])
        config = RunConfig(
            profile=profile,
            params=params,
            interval=self._resolve_interval(merged),
            tuple_=tuple_,
            tuple_source=source,
            output=merged['output'],
            seed=merged['seed'],
            threads=merged['threads'],
            segment_size=merged['segment_size'],
            max_batch_entries=merged['max_batch_entries'],
            max_moduli=merged['max_moduli'],
            chunk_size=merged['chunk_size'],
            singular_pmax=merged['singular_pmax'],
            d_cap=merged['d_cap'],
            B=merged['B'],
            index=merged['index'],
            epsilon=merged['epsilon'],
            strict_paper=merged['strict_paper'],
        )
        logger.debug(f"Resolved config for {command}: {config.to_dict()}")
        return config

    @staticmethod
    def _check_paper(command: str, merged: Dict[str, Any], base: Dict[str, Any]) -> None:
        if command not in PAPER_COMMANDS:
            raise ProfileError("the paper profile is too large for direct sums; it permits only "
                               "`omega` and `sums --predict-only`")
        for key in ('k0', 'l0', 'varpi'):
            if merged[key] != base[key]:
                raise ProfileError(f"the paper profile locks {key} = {base[key]}")

    @staticmethod
    def _resolve_tuple(merged: Dict[str, Any]):
        text, path = merged.get('tuple'), merged.get('tuple_file')
        if text and path:
            raise InvalidArgumentError("give either a tuple or a tuple file, not both")
        if text:
            if not validate_tuple_text(text):
                raise InvalidArgumentError(f"cannot parse tuple {text!r}")
            return parse_tuple(text), 'inline'
        if path:
            return read_tuple_file(path), path
        return None, None

    @staticmethod
    def _resolve_interval(merged: Dict[str, Any]) -> IntervalSpec:
        x = merged['x']
        if merged.get('dyadic'):
            return IntervalSpec.dyadic(x)
        if merged.get('delta') is not None:
            return IntervalSpec.explicit(x, merged['delta'])
        if merged.get('theta') is not None:
            return IntervalSpec.power(x, merged['theta'])
        if merged.get('A') is not None:
            return IntervalSpec.log_power(x, merged['A'])
        raise InvalidArgumentError("no interval length given (delta, A, theta or dyadic)")


def coerce_flags(raw: Mapping[str, Any]) -> Dict[str, Any]:
    """Convert command-line text values with the same rules as the config file."""
    flags: Dict[str, Any] = {}
    for key, value in raw.items():
        if value is None or value is False:
            continue
        if isinstance(value, str) and key in FILE_KEYS:
            value = FILE_KEYS[key](value, key)
        flags[key] = value
    return flags


# Singleton instance
config_service = ConfigService()
