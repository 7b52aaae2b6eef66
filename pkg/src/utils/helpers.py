"""
Helper utilities
"""

import math
from fractions import Fraction
from pathlib import Path
from typing import Union

import gmpy2

from utils.validators import DomainError


def ensure_directory(path: str) -> Path:
    """
    Ensure directory exists, create if it doesn't

    Args:
        path: Directory path

    Returns:
        Path object
    """
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def decimal_digits(bits: int) -> int:
    """
    Number of significant decimal digits carried by a binary precision

    Args:
        bits: Precision in bits

    Returns:
        Digit count (at least 1)
    """
    return max(1, int(bits * math.log10(2)))


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """
    Parse an exact rational from user input

    Accepts integers, "p/q" and finite decimal strings ("0.1", "-2.5e-3").

    Raises:
        DomainError: text is not a finite rational
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Unable to parse rational: {text!r} ({e})")
    return value


def format_integer(value: int) -> str:
    """
    Decimal text of an integer of any size

    str() refuses integers above the interpreter's digit limit; gmpy2 does not.
    """
    return gmpy2.mpz(value).digits()


def format_rational(value: Fraction) -> str:
    """
    Format an exact rational as "p" or "p/q"
    """
    value = Fraction(value)
    if value.denominator == 1:
        return format_integer(value.numerator)
    return f"{format_integer(value.numerator)}/{format_integer(value.denominator)}"
