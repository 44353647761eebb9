"""Dotted-key overrides for run configurations."""

import copy
from typing import Any, Dict, Iterable


def set_nested_dict_value(d: Dict[str, Any], path: str, value: Any) -> None:
    """
    Set a value in a nested dictionary using a dot-notation path.

    Args:
        d: The dictionary to modify
        path: Dot-notation path (e.g., "training.epochs")
        value: The value to set; strings are converted to match the existing value

    Example:
        >>> config = {"training": {"epochs": 100}}
        >>> set_nested_dict_value(config, "training.epochs", "5")
        >>> config["training"]["epochs"]
        5
    """
    keys = path.split('.')
    current = d

    for key in keys[:-1]:
        if not isinstance(current.get(key), dict):
            current[key] = {}
        current = current[key]

    current[keys[-1]] = _infer_type(value, current.get(keys[-1]))


def _infer_type(value: Any, existing_value: Any = None) -> Any:
    """
    Infer the appropriate type for a value based on existing value or content.

    Args:
        value: The value to convert
        existing_value: Existing value to match type against

    Returns:
        Converted value with appropriate type
    """
    if not isinstance(value, str):
        return value

    # Match the type already in the config
    if existing_value is not None:
        try:
            if isinstance(existing_value, bool):
                return value.lower() in ('true', 'yes', '1', 't', 'y', 'on')
            elif isinstance(existing_value, int):
                return int(value)
            elif isinstance(existing_value, float):
                return float(value)
            elif isinstance(existing_value, list):
                return [_infer_type(item.strip()) for item in value.split(',') if item.strip()]
        except (ValueError, AttributeError):
            pass

    lowered = value.lower()
    if lowered in ('true', 'false', 'yes', 'no', 'on', 'off'):
        return lowered in ('true', 'yes', 'on')
    if lowered in ('null', 'none'):
        return None

    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass

    return value


def parse_dotted_overrides(args: Iterable[str]) -> Dict[str, str]:
    """
    Collect ``--a.b=value`` arguments left over by argparse.

    Arguments without ``=`` are ignored.
    """
    overrides = {}
    for arg in args:
        if arg.startswith('--'):
            parts = arg[2:].split('=', 1)
            if len(parts) == 2:
                key, value = parts
                overrides[key] = value
    return overrides


def apply_overrides(config: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """
    Apply dotted overrides to a configuration.

    Returns:
        Updated configuration (deep copy)

    Example:
        >>> updated = apply_overrides({"search": {"offspring": 5}}, {"search.offspring": "3"})
        >>> updated["search"]["offspring"]
        3
    """
    config = copy.deepcopy(config)
    for path, value in overrides.items():
        set_nested_dict_value(config, path, value)
    return config


def merge_configs(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively merge two configuration dictionaries.

    Args:
        base: Base configuration
        override: Configuration values to override

    Returns:
        Merged configuration (deep copy)
    """
    result = copy.deepcopy(base)

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_configs(result[key], value)
        else:
            result[key] = copy.deepcopy(value)

    return result
