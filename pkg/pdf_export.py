#!/usr/bin/env python3
"""
PDF Export Utility for Leibniz toolkit reports
Renders JSON reports (suites, scans, searches, reproductions) as PDF files.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from leibniz.reports import load_report, prepare_path

try:
    from reportlab.lib.pagesizes import A4
    from reportlab.platypus import SimpleDocTemplate, Paragraph, Spacer, Table, TableStyle
    from reportlab.lib.styles import getSampleStyleSheet, ParagraphStyle
    from reportlab.lib.colors import Color
    from reportlab.lib.units import inch
    REPORTLAB_AVAILABLE = True
except ImportError:
    REPORTLAB_AVAILABLE = False


def is_pdf_export_available() -> bool:
    """Check if PDF export is available."""
    return REPORTLAB_AVAILABLE


def create_pdf_styles():
    """Create custom styles for the PDF."""
    styles = getSampleStyleSheet()

    styles.add(ParagraphStyle(
        name='MetadataBox',
        parent=styles['Normal'],
        fontSize=10,
        leading=14,
        leftIndent=15,
        rightIndent=15,
        spaceAfter=16,
        spaceBefore=8,
        borderColor=Color(0.6, 0.6, 0.6),
        borderWidth=1,
        borderPadding=10,
        backColor=Color(0.98, 0.98, 0.98)
    ))

    styles.add(ParagraphStyle(
        name='Verdict',
        parent=styles['Normal'],
        fontSize=12,
        fontName='Helvetica-Bold',
        spaceAfter=10,
        spaceBefore=4,
    ))

    styles.add(ParagraphStyle(
        name='Cell',
        parent=styles['Normal'],
        fontSize=8,
        leading=10,
    ))

    return styles


def _escape(text) -> str:
    text = str(text)
    return text.replace('&', '&amp;').replace('<', '&lt;').replace('>', '&gt;')


def _table(header: List[str], rows: List[List[object]], styles) -> "Table":
    data = [[Paragraph(f"<b>{_escape(h)}</b>", styles['Cell']) for h in header]]
    data.extend([[Paragraph(_escape(value), styles['Cell']) for value in row] for row in rows])
    table = Table(data, repeatRows=1)
    table.setStyle(TableStyle([
        ('GRID', (0, 0), (-1, -1), 0.5, Color(0.7, 0.7, 0.7)),
        ('BACKGROUND', (0, 0), (-1, 0), Color(0.92, 0.94, 0.98)),
        ('VALIGN', (0, 0), (-1, -1), 'TOP'),
    ]))
    return table


def _report_rows(report: Dict) -> Tuple[List[str], List[List[object]]]:
    """Pick the tabular part of a report by its kind."""
    kind = report.get('kind')
    if kind == 'verify':
        header = ['check', 'trials', 'max defect', 'violations', 'asserted']
        rows = [[c['name'], c['trials'], c['max_defect'], c['violations'], c['asserted']]
                for c in report.get('checks', [])]
        return header, rows
    if kind == 'scan':
        header = ['n', 'p', 'objective', 'best defect', 'flagged']
        rows = [[c['n'], c['p'], c['objective'], c['best_defect'], c['flagged']]
                for c in report.get('cells', [])]
        return header, rows
    if kind == 'reproduce':
        values = report.get('values', {})
        expected = report.get('expected', {})
        header = ['quantity', 'value', 'expected']
        rows = [[key, values[key], expected.get(key, '')] for key in sorted(values)]
        return header, rows
    if kind == 'search':
        result = report.get('result', {})
        header = ['field', 'value']
        rows = [['best defect', result.get('best_defect')],
                ['evaluations', result.get('evaluations_used')],
                ['exhausted', result.get('exhausted')]]
        rows.extend([[name, value] for name, value in sorted(result.get('witness', {}).items())])
        return header, rows
    return ['field', 'value'], [[key, value] for key, value in sorted(report.items())]


def export_report_to_pdf(report: Dict, output_file: str) -> bool:
    """
    Export a toolkit report to PDF format.

    Args:
        report: Dictionary holding a schema 1 report
        output_file: Path to output PDF file

    Returns:
        bool: True if successful, False otherwise
    """
    if not REPORTLAB_AVAILABLE:
        raise ImportError("reportlab library not installed. Install with: pip install reportlab")

    try:
        doc = SimpleDocTemplate(
            str(prepare_path(output_file)),
            pagesize=A4,
            topMargin=0.75*inch,
            bottomMargin=0.75*inch,
            leftMargin=0.6*inch,
            rightMargin=0.6*inch,
            invariant=1
        )
        story = []
        styles = create_pdf_styles()

        title_style = ParagraphStyle(
            'CustomTitle',
            parent=styles['Title'],
            fontSize=20,
            spaceAfter=0.25*inch,
            textColor=Color(0.2, 0.2, 0.2),
            alignment=1
        )
        kind = report.get('kind', 'report')
        story.append(Paragraph(f"Leibniz toolkit: {_escape(kind)} report", title_style))

        metadata_content = [f"<b>Schema:</b> {_escape(report.get('schema', ''))}"]
        for key in ('suite', 'name', 'trials', 'seed', 'tolerance'):
            if key in report:
                metadata_content.append(f"<b>{key.title()}:</b> {_escape(report[key])}")
        if 'task' in report:
            for key, value in sorted(report['task'].items()):
                metadata_content.append(f"<b>{_escape(key)}:</b> {_escape(value)}")
        story.append(Paragraph("<br/>".join(metadata_content), styles['MetadataBox']))

        if 'passed' in report:
            verdict = "PASS" if report['passed'] else "FAIL"
            story.append(Paragraph(f"Verdict: {verdict}", styles['Verdict']))

        header, rows = _report_rows(report)
        if rows:
            story.append(_table(header, rows, styles))

        story.append(Spacer(1, 0.25*inch))
        doc.build(story)
        return True

    except Exception as e:
        print(f"Error creating PDF: {e}")
        return False


def export_report_from_json_file(json_file: str, output_file: Optional[str] = None) -> Optional[Path]:
    """
    Render a saved JSON report as PDF.

    The PDF goes next to the JSON file unless ``output_file`` is given.
    Returns the PDF path, or None when the report cannot be read or rendered.
    """
    report = load_report(json_file)
    if report is None:
        return None
    target = Path(output_file) if output_file else pdf_path_for_report(json_file)
    if not export_report_to_pdf(report, str(target)):
        return None
    return target


def pdf_path_for_report(json_file: str) -> Path:
    """reports/scan.json -> reports/scan.pdf"""
    return Path(json_file).with_suffix('.pdf')
