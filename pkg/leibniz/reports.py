"""
Report files: versioned JSON documents and fixed-column CSV tables.

Reports carry no timestamps and JSON keys are sorted, so the same command with
the same seed always writes the same bytes.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

REPORT_FORMATS = ("json", "csv", "pdf")


def build_report(kind: str, payload: Dict[str, object]) -> Dict[str, object]:
    """Wrap a payload in the versioned envelope."""
    report = {"schema": SCHEMA_VERSION, "kind": kind}
    report.update(payload)
    return report


def default_output_path(output_dir: str, stem: str, output_format: str) -> Path:
    return Path(output_dir) / f"{stem}.{output_format}"


def prepare_path(path) -> Path:
    """Return ``path`` as a Path, creating its parent directory if needed."""
    path = Path(path)
    if not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(report: Dict[str, object], path) -> Path:
    path = prepare_path(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(report, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")
    logger.debug("wrote JSON report %s", path)
    return path


def write_csv(table: pd.DataFrame, path) -> Path:
    path = prepare_path(path)
    table.to_csv(path, index=False, lineterminator="\n")
    logger.debug("wrote CSV table %s (%d rows)", path, len(table))
    return path


def load_report(path) -> Optional[Dict[str, object]]:
    """Read a JSON report back; None if it is unreadable or from another schema."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            report = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error("Error loading report file: %s", e)
        return None
    if not isinstance(report, dict) or report.get("schema") != SCHEMA_VERSION:
        logger.error("Error loading report file: %s is not a schema %d report", path, SCHEMA_VERSION)
        return None
    return report
