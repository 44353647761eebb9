"""Configuration utilities for loading run configurations and setting up logging."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml


logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class ConfigError(Exception):
    """Exception raised when a run configuration cannot be parsed or validated."""
    pass


def load_runtime_config(config_path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load runtime configuration from a YAML file.

    Args:
        config_path: Path to the configuration file

    Returns:
        Configuration dictionary

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: If the file is not valid YAML or not a mapping
    """
    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    try:
        with open(config_file, 'r') as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {config_file}: {e}") from e

    if config is not None and not isinstance(config, dict):
        raise ConfigError(f"{config_file} must contain a mapping at the top level")

    logger.info(f"Loaded runtime configuration from {config_file}")
    return config or {}


def save_runtime_config(config: Dict[str, Any], config_path: Union[str, Path]) -> Path:
    """
    Save a configuration dictionary as YAML.

    Returns:
        Path to the saved file
    """
    config_file = Path(config_path)
    config_file.parent.mkdir(parents=True, exist_ok=True)
    with open(config_file, 'w') as f:
        yaml.safe_dump(config, f, default_flow_style=False, sort_keys=False)

    logger.info(f"Saved configuration to {config_file}")
    return config_file


def setup_logging(level: int = logging.INFO, log_file: Optional[Union[str, Path]] = None) -> None:
    """
    Setup logging configuration.

    Args:
        level: Logging level (default: INFO)
        log_file: Optional path to a log file. None disables file logging.
    """
    handlers = [logging.StreamHandler()]

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )

    logger.debug("Logging initialized")


def add_log_file(log_file: Union[str, Path], level: int = logging.INFO) -> logging.Handler:
    """
    Attach a file handler to the root logger (used once a run's output directory exists).

    Returns:
        The handler, so callers can detach it
    """
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler
