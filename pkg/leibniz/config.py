"""
Settings for the toolkit.

Settings live in a JSON file (``config.json`` by default). Keys mirror the
command-line flags; flags given explicitly override the file.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.json"

DEFAULT_CONFIG: Dict[str, object] = {
    "tolerance": 1e-9,
    "trials": 1000,
    "budget": 20000,
    "seed": 1,
    "restarts": 20,
    "strong_floor": 0.05,
    "invertibility_floor": 1e-8,
    "max_condition": 1e6,
    "exact": False,
    "output_format": "json",
    "output_dir": "reports",
    "derivation_samples": 200,
    "franchetti_grid": 2000,
    "operator_budget": 4000,
    "verbose": False,
}


def load_config(path: Optional[str] = None) -> Dict[str, object]:
    """Load settings from a JSON file, falling back to the defaults."""
    config = dict(DEFAULT_CONFIG)
    config_file = Path(path or DEFAULT_CONFIG_PATH)
    if not config_file.exists():
        if path:
            logger.warning("Config file %s not found, using defaults", config_file)
        return config

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            settings = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning("Failed to load settings from %s: %s", config_file, e)
        return config

    if not isinstance(settings, dict):
        logger.warning("Failed to load settings: %s does not hold a JSON object", config_file)
        return config

    for key, value in settings.items():
        if key not in DEFAULT_CONFIG:
            logger.warning("Ignoring unknown config key %r", key)
            continue
        config[key] = value
    return config


def merge_overrides(config: Dict[str, object], overrides: Dict[str, object]) -> Dict[str, object]:
    """Return a copy of ``config`` with every non-None override applied."""
    merged = dict(config)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return merged


def save_config(config: Dict[str, object], path: Optional[str] = None) -> bool:
    """Save settings to a JSON file."""
    try:
        with open(path or DEFAULT_CONFIG_PATH, 'w', encoding='utf-8') as f:
            json.dump(config, f, indent=2, sort_keys=True)
            f.write("\n")
        return True
    except OSError as e:
        logger.error("Failed to save settings: %s", e)
        return False


def create_config_template(path: Optional[str] = None, config: Optional[Dict[str, object]] = None,
                           overwrite: bool = False) -> bool:
    """
    Write a settings file (the defaults unless ``config`` is given).

    An existing file is left alone unless ``overwrite`` is set; returns False then.
    """
    config_path = Path(path or DEFAULT_CONFIG_PATH)
    if config_path.exists() and not overwrite:
        return False
    return save_config(config if config is not None else DEFAULT_CONFIG, str(config_path))
