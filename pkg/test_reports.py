#!/usr/bin/env python3
"""
Tests for JSON, CSV and PDF report files
"""

import json

import pandas as pd
import pytest

from leibniz.reports import (
    SCHEMA_VERSION,
    build_report,
    default_output_path,
    load_report,
    write_csv,
    write_json,
)
from leibniz.search import reproduce_example2
from pdf_export import (
    export_report_from_json_file,
    export_report_to_pdf,
    is_pdf_export_available,
    pdf_path_for_report,
)


def test_build_report_envelope():
    report = build_report("verify", {"suite": "nc", "passed": True})
    assert report == {"schema": SCHEMA_VERSION, "kind": "verify", "suite": "nc", "passed": True}


def test_default_output_path():
    assert str(default_output_path("reports", "scan", "csv")).replace("\\", "/") == "reports/scan.csv"


def test_json_is_sorted_and_stable(tmp_path):
    report = build_report("reproduce", reproduce_example2().to_dict())
    first = write_json(report, tmp_path / "a" / "first.json")
    second = write_json(build_report("reproduce", reproduce_example2().to_dict()), tmp_path / "second.json")
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text(encoding="utf-8")
    assert text.endswith("}\n")
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_load_report_checks_schema(tmp_path):
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"schema": 0, "kind": "scan"}), encoding="utf-8")
    assert load_report(path) is None
    assert load_report(tmp_path / "missing.json") is None
    write_json(build_report("scan", {"cells": []}), path)
    assert load_report(path)["cells"] == []


def test_write_csv(tmp_path):
    table = pd.DataFrame([{"n": 5, "p": "1", "objective": "auxiliary", "best_defect": 0.08, "flagged": True}],
                         columns=["n", "p", "objective", "best_defect", "flagged"])
    path = write_csv(table, tmp_path / "scan.csv")
    assert path.read_bytes() == b"n,p,objective,best_defect,flagged\n5,1,auxiliary,0.08,True\n"


def test_pdf_path_for_report():
    assert pdf_path_for_report("reports/scan.json").as_posix() == "reports/scan.pdf"


def test_pdf_export(tmp_path):
    pytest.importorskip("reportlab")
    assert is_pdf_export_available()
    report = build_report("reproduce", reproduce_example2().to_dict())
    path = tmp_path / "nested" / "example2.pdf"
    assert export_report_to_pdf(report, str(path))
    assert path.read_bytes().startswith(b"%PDF")

    json_path = write_json(report, tmp_path / "example2.json")
    assert export_report_from_json_file(str(json_path)) == tmp_path / "example2.pdf"
    assert (tmp_path / "example2.pdf").read_bytes().startswith(b"%PDF")


def test_pdf_export_rejects_unreadable_reports(tmp_path):
    pytest.importorskip("reportlab")
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"schema": 0, "kind": "scan"}), encoding="utf-8")
    assert export_report_from_json_file(str(path)) is None
    assert not (tmp_path / "old.pdf").exists()


def test_pdf_export_is_deterministic(tmp_path):
    pytest.importorskip("reportlab")
    report = build_report("verify", {"suite": "nc", "trials": 1, "seed": 1, "tolerance": "1e-09", "passed": True,
                                     "checks": [{"name": "lemma_d2", "trials": 1, "max_defect": "-0.5",
                                                 "violations": 0, "asserted": True}]})
    first, second = tmp_path / "first.pdf", tmp_path / "second.pdf"
    assert export_report_to_pdf(report, str(first))
    assert export_report_to_pdf(report, str(second))
    assert first.read_bytes() == second.read_bytes()
