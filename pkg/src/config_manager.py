"""
Configuration Manager
Handles loading and merging configuration from multiple sources
"""

import os
import yaml
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from utils.validators import ConfigValidator, ConfigurationError


class ConfigManager:
    """Manages toolkit configuration from multiple sources"""

    # Environment variable -> (config key, coerce to int)
    ENV_OVERRIDES = {
        'LLPOLY_MAX_N': ('limits.max_n', True),
        'LLPOLY_ENUM_MAX_N': ('limits.enumeration_max_n', True),
        'LLPOLY_PRECISION': ('numerics.default_precision', True),
        'LLPOLY_LOG_LEVEL': ('logging.level', False),
        'LLPOLY_OUTPUT_FORMAT': ('output.format', False),
    }

    DEFAULTS = {
        'limits': {'max_n': 14, 'enumeration_max_n': 20},
        'numerics': {'default_precision': 128, 'min_precision': 53},
        'output': {'format': 'table'},
        'logging': {'level': 'WARNING', 'file': None},
    }

    def __init__(self, config_dir: Optional[Path] = None):
        self.config = {}
        self.logger = logging.getLogger(__name__)

        if config_dir is not None:
            self.config_dir = Path(config_dir)
        else:
            # Assume running from src/..
            self.config_dir = Path(__file__).parent.parent / 'config'

    def load_configs(self, env_file: Optional[str] = None):
        """Load configuration from defaults, YAML files and environment variables"""

        # 1. Built-in defaults
        self.config = self._deep_copy(self.DEFAULTS)

        # 2. Shipped defaults file
        self._merge_file(self.config_dir / 'llpoly_config.yaml')

        # 3. Optional user file
        user_file = os.getenv('LLPOLY_CONFIG')
        if user_file:
            if not Path(user_file).exists():
                raise ConfigurationError(f"LLPOLY_CONFIG points to missing file: {user_file}")
            self._merge_file(Path(user_file))

        # 4. .env file (does not override variables already exported)
        load_dotenv(dotenv_path=env_file)

        # 5. Override with environment variables
        self._apply_env_overrides()

        self.logger.debug(
            f"Configuration loaded: max_n={self.get('limits.max_n')}, "
            f"precision={self.get('numerics.default_precision')}"
        )
        return self

    def _merge_file(self, path: Path):
        """Merge a YAML file into the current configuration"""
        if not path.exists():
            self.logger.debug(f"Config file not found, skipping: {path}")
            return

        try:
            with open(path) as f:
                loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {path}: {e}")

        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Top level of {path} must be a mapping")

        self._merge(self.config, loaded)

    def _merge(self, target: Dict, source: Dict):
        for key, value in source.items():
            if isinstance(value, dict) and isinstance(target.get(key), dict):
                self._merge(target[key], value)
            else:
                target[key] = value

    def _deep_copy(self, value):
        if isinstance(value, dict):
            return {k: self._deep_copy(v) for k, v in value.items()}
        return value

    def _apply_env_overrides(self):
        """Override config with environment variables"""
        for env_key, (config_key, numeric) in self.ENV_OVERRIDES.items():
            value = os.getenv(env_key)
            if not value:
                continue
            if numeric:
                try:
                    value = int(value)
                except ValueError:
                    raise ConfigurationError(f"{env_key} must be an integer, got {value!r}")
            self.set(config_key, value)
            self.logger.debug(f"{env_key} overrides {config_key}={value}")

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation
        Example: config.get('limits.max_n')
        """
        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default

        return value

    def set(self, key: str, value: Any):
        """Set configuration value using dot notation"""
        keys = key.split('.')
        config = self.config

        for k in keys[:-1]:
            if k not in config:
                config[k] = {}
            config = config[k]

        config[keys[-1]] = value

    def validate(self):
        """Validate configuration, raising ConfigurationError on errors"""
        validator = ConfigValidator()
        if not validator.validate_all(self.config):
            raise ConfigurationError(validator.get_report())
        return validator


_active_config: Optional[ConfigManager] = None


def get_config() -> ConfigManager:
    """Process-wide configuration, loaded on first use"""
    global _active_config
    if _active_config is None:
        _active_config = ConfigManager().load_configs()
    return _active_config


def set_config(config: Optional[ConfigManager]):
    """Install (or with None, reset) the process-wide configuration"""
    global _active_config
    _active_config = config


def default_max_n() -> int:
    return int(get_config().get('limits.max_n', 14))


def default_enumeration_max_n() -> int:
    return int(get_config().get('limits.enumeration_max_n', 20))


def default_precision() -> int:
    return int(get_config().get('numerics.default_precision', 128))


def default_min_precision() -> int:
    return int(get_config().get('numerics.min_precision', 53))
