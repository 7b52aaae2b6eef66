"""
Validators
Error types, argument guards and configuration validation
"""

import logging
from typing import Dict, Optional


class LLPolyError(Exception):
    """Base class for all library errors"""


class DomainError(LLPolyError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class SizeLimitError(DomainError):
    """Requested level exceeds a configured cap"""

    def __init__(self, what: str, n: int, cap: int, variable: str = 'LLPOLY_MAX_N'):
        self.what = what
        self.n = n
        self.cap = cap
        super().__init__(f"{what}: n={n} exceeds cap {cap} (set {variable} to raise it)")


class PreconditionError(DomainError):
    """Caller did not satisfy a documented precondition"""


class ConfigurationError(LLPolyError):
    """Configuration could not be loaded or failed validation"""


def check_level(n: int, minimum: int = 0, name: str = 'n') -> int:
    """Ensure n is an integer >= minimum"""
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"{name} must be an integer, got {n!r}")
    if n < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_cap(n: int, cap: int, what: str, variable: str = 'LLPOLY_MAX_N') -> int:
    """Ensure n does not exceed cap"""
    if n > cap:
        raise SizeLimitError(what, n, cap, variable)
    return n


def check_precision(bits: int, minimum: Optional[int] = None) -> int:
    """Ensure a precision in bits is usable (minimum defaults to numerics.min_precision)"""
    if minimum is None:
        from config_manager import default_min_precision
        minimum = default_min_precision()
    if isinstance(bits, bool) or not isinstance(bits, int):
        raise DomainError(f"precision must be an integer number of bits, got {bits!r}")
    if bits < minimum:
        raise DomainError(f"precision must be >= {minimum} bits, got {bits}")
    return bits


class ConfigValidator:
    """Validates configuration settings"""

    VALID_FORMATS = ('table', 'json', 'csv')
    VALID_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.errors = []
        self.warnings = []

    def validate_all(self, config: Dict) -> bool:
        """
        Validate entire configuration

        Returns: True if valid, False if errors found
        """
        self.errors = []
        self.warnings = []

        self.validate_limits(config)
        self.validate_numerics(config)
        self.validate_output(config)
        self.validate_logging(config)

        if self.errors:
            for error in self.errors:
                self.logger.error(f"Config validation error: {error}")

        if self.warnings:
            for warning in self.warnings:
                self.logger.warning(f"Config validation warning: {warning}")

        return len(self.errors) == 0

    def validate_limits(self, config: Dict):
        """Validate exponential-work caps"""
        limits = config.get('limits', {}) or {}

        max_n = self._as_int(limits.get('max_n', 14), 'limits.max_n')
        if max_n is not None:
            if max_n < 1:
                self.errors.append(f"limits.max_n must be >= 1, got {max_n}")
            elif max_n > 16:
                self.warnings.append(
                    f"limits.max_n={max_n} allows degree 2^{max_n}; "
                    "exact expansion will be very slow"
                )

        enum_max = self._as_int(limits.get('enumeration_max_n', 20), 'limits.enumeration_max_n')
        if enum_max is not None:
            if enum_max < 1:
                self.errors.append(f"limits.enumeration_max_n must be >= 1, got {enum_max}")
            elif enum_max > 24:
                self.warnings.append(
                    f"limits.enumeration_max_n={enum_max} may exhaust memory"
                )

    def validate_numerics(self, config: Dict):
        """Validate precision settings"""
        numerics = config.get('numerics', {}) or {}

        min_precision = self._as_int(numerics.get('min_precision', 53), 'numerics.min_precision')
        precision = self._as_int(numerics.get('default_precision', 128), 'numerics.default_precision')

        if min_precision is not None and min_precision < 53:
            self.errors.append(f"numerics.min_precision must be >= 53, got {min_precision}")

        if precision is not None and min_precision is not None and precision < min_precision:
            self.errors.append(
                f"numerics.default_precision={precision} is below "
                f"numerics.min_precision={min_precision}"
            )

    def validate_output(self, config: Dict):
        """Validate output format"""
        fmt = (config.get('output', {}) or {}).get('format', 'table')
        if fmt not in self.VALID_FORMATS:
            self.errors.append(
                f"Invalid output.format: {fmt}. Must be one of {list(self.VALID_FORMATS)}"
            )

    def validate_logging(self, config: Dict):
        """Validate logging section"""
        level = str((config.get('logging', {}) or {}).get('level', 'WARNING')).upper()
        if level not in self.VALID_LEVELS:
            self.warnings.append(f"Unknown logging.level {level}, WARNING will be used")

    def _as_int(self, value, key: str) -> Optional[int]:
        try:
            return int(value)
        except (TypeError, ValueError):
            self.errors.append(f"{key} must be an integer, got {value!r}")
            return None

    def get_report(self) -> str:
        """Get validation report as string"""
        report = []

        if self.errors:
            report.append("ERRORS:")
            for error in self.errors:
                report.append(f"  - {error}")

        if self.warnings:
            report.append("\nWARNINGS:")
            for warning in self.warnings:
                report.append(f"  - {warning}")

        if not self.errors and not self.warnings:
            report.append("Configuration is valid")

        return "\n".join(report)
