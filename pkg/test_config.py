#!/usr/bin/env python3
"""
Tests for settings files
"""

import json
import logging

from leibniz.config import (
    DEFAULT_CONFIG,
    create_config_template,
    load_config,
    merge_overrides,
    save_config,
)


def test_missing_file_gives_defaults(tmp_path):
    assert load_config(str(tmp_path / "absent.json")) == DEFAULT_CONFIG


def test_file_values_override_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 42, "tolerance": 1e-6, "colour": "blue"}), encoding="utf-8")
    config = load_config(str(path))
    assert config["seed"] == 42
    assert config["tolerance"] == 1e-6
    assert "colour" not in config
    assert config["budget"] == DEFAULT_CONFIG["budget"]


def test_broken_file_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    assert load_config(str(path)) == DEFAULT_CONFIG
    path.write_text("[1, 2]", encoding="utf-8")
    assert load_config(str(path)) == DEFAULT_CONFIG


def test_merge_overrides_skips_none():
    merged = merge_overrides(DEFAULT_CONFIG, {"seed": 9, "budget": None, "exact": False})
    assert merged["seed"] == 9
    assert merged["budget"] == DEFAULT_CONFIG["budget"]
    assert merged["exact"] is False
    assert DEFAULT_CONFIG["seed"] == 1


def test_template_written_once(tmp_path):
    path = str(tmp_path / "config.json")
    assert create_config_template(path)
    assert load_config(path) == DEFAULT_CONFIG
    assert not create_config_template(path)


def test_save_config_round_trip(tmp_path):
    path = str(tmp_path / "custom.json")
    config = merge_overrides(DEFAULT_CONFIG, {"output_format": "csv", "trials": 10})
    assert save_config(config, path)
    assert load_config(path) == config


def test_load_failures_are_logged(tmp_path, caplog, capsys):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with caplog.at_level(logging.WARNING, logger="leibniz.config"):
        assert load_config(str(path)) == DEFAULT_CONFIG
    assert "Failed to load settings" in caplog.text
    assert capsys.readouterr().out == ""


def test_template_with_settings_and_overwrite(tmp_path):
    path = str(tmp_path / "config.json")
    custom = merge_overrides(DEFAULT_CONFIG, {"seed": 7})
    assert create_config_template(path, custom)
    assert load_config(path)["seed"] == 7
    assert not create_config_template(path, DEFAULT_CONFIG)
    assert load_config(path)["seed"] == 7
    assert create_config_template(path, DEFAULT_CONFIG, overwrite=True)
    assert load_config(path) == DEFAULT_CONFIG
