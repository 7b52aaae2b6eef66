"""
Logging Utility
Configures centralized logging
"""

import logging
import logging.config
import logging.handlers
from pathlib import Path
from typing import Optional

import yaml

from utils.helpers import ensure_directory


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """
    Setup logging configuration

    Args:
        level: Root level override (e.g. 'INFO'); config file level otherwise
        log_file: Optional path for a rotating debug log
    """
    config_path = Path(__file__).parent.parent.parent / 'config' / 'logging_config.yaml'

    named_loggers = []
    if config_path.exists():
        with open(config_path) as f:
            config = yaml.safe_load(f)
            logging.config.dictConfig(config)
            named_loggers = list((config.get('loggers') or {}).keys())
    else:
        # Fallback to basic config; stdout is reserved for command output
        logging.basicConfig(
            level=logging.WARNING,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        )

    root = logging.getLogger()
    if level:
        numeric_level = getattr(logging, str(level).upper(), logging.WARNING)
        root.setLevel(numeric_level)
        for name in named_loggers:
            logging.getLogger(name).setLevel(numeric_level)

    if log_file:
        ensure_directory(str(Path(log_file).parent))
        handler = logging.handlers.RotatingFileHandler(
            log_file, maxBytes=10485760, backupCount=3
        )
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - [%(filename)s:%(lineno)d] - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        root.addHandler(handler)
        for name in named_loggers:
            logging.getLogger(name).addHandler(handler)

    logger = logging.getLogger(__name__)
    logger.debug("Logging configured")
