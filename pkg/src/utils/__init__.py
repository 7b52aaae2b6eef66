"""
Utility modules
"""

from .logger import setup_logging
from .validators import (
    ConfigValidator,
    LLPolyError,
    DomainError,
    SizeLimitError,
    PreconditionError,
    ConfigurationError,
)
from .helpers import (
    ensure_directory,
    decimal_digits,
    parse_rational,
    format_rational,
    format_integer
)

__all__ = [
    'setup_logging',
    'ConfigValidator',
    'LLPolyError',
    'DomainError',
    'SizeLimitError',
    'PreconditionError',
    'ConfigurationError',
    'ensure_directory',
    'decimal_digits',
    'parse_rational',
    'format_rational',
    'format_integer'
]
