from fractions import Fraction
from typing import Optional
import re

from src.utils.errors import InvalidArgumentError

VALID_PROFILES = ['paper', 'desk', 'custom']

VALID_OUTPUTS = ['json', 'csv']

VALID_PRIME_OUTPUTS = ['text', 'json', 'csv']

TUPLE_PATTERN = re.compile(r'^\s*-?\d+(\s*,\s*-?\d+)*\s*,?\s*$')

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def validate_profile(profile: str) -> bool:
    """Validate profile name"""
    return profile in VALID_PROFILES


def validate_output(output: str) -> bool:
    """Validate output format"""
    return output in VALID_OUTPUTS


def validate_range(lo: int, hi: int) -> bool:
    """Validate a closed integer range"""
    return 0 <= lo <= hi


def validate_tuple_text(text: str) -> bool:
    """Validate the comma-separated offset format"""
    return bool(TUPLE_PATTERN.match(text))


def validate_varpi(varpi: Fraction) -> bool:
    return 0 < varpi <= Fraction(1, 4)


def parse_int(text: str, name: str) -> int:
    """Integer from text; accepts 1000000, 1e6 and 10**6."""
    text = str(text).strip()
    try:
        if '**' in text:
            base, exponent = text.split('**')
            return int(base) ** int(exponent)
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgumentError(f"{name} must be an integer, got {text!r}")
    if value.denominator != 1:
        raise InvalidArgumentError(f"{name} must be an integer, got {text!r}")
    return int(value)


def parse_fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidArgumentError(f"{name} must be a rational number, got {text!r}")


def parse_float(text: str, name: str) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise InvalidArgumentError(f"{name} must be a number, got {text!r}")


def parse_bool(text: str, name: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise InvalidArgumentError(f"{name} must be a boolean, got {text!r}")


def parse_optional_int(text: Optional[str], name: str) -> Optional[int]:
    if text is None or str(text).strip().lower() in ('', 'none'):
        return None
    return parse_int(text, name)
