#!/usr/bin/env python3
"""
Command-line front end for the Leibniz toolkit.

Subcommands:
    reproduce    exact reproduction of the two explicit counterexamples
    verify       Monte-Carlo and enumeration suites for the proved inequalities
    scan         defect search over an (n, p) grid on uniform spaces
    search       a single defect search
    pdf          render a saved JSON report as PDF
    init-config  write a settings file from the defaults and the given flags

Exit codes: 0 = every proved inequality holds, 1 = usage error,
2 = a proved inequality was flagged.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

import pandas as pd

from leibniz.config import DEFAULT_CONFIG_PATH, create_config_template, load_config, merge_overrides
from leibniz.errors import LeibnizError
from leibniz.prob_core import PExponent, format_scalar, parse_scalar
from leibniz.reports import REPORT_FORMATS, build_report, default_output_path, write_csv, write_json
from leibniz.search import (
    DIAGNOSTIC_OBJECTIVES,
    MEASURE_FAMILIES,
    OBJECTIVES,
    SearchTask,
    conjecture_scan,
    evaluate_witness,
    is_proved,
    maximize_defect,
    recertify,
    reproduce_example1,
    reproduce_example2,
)
from leibniz.suites import SUITES, run_suite

CSV_COLUMNS = """CSV columns:
    scan    n, p, objective, best_defect, flagged
    verify  check, trials, max_defect, violations, asserted
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

logger = logging.getLogger("leibniz_cli")


class LeibnizArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def parse_n_range(text: str) -> List[int]:
    """"5" -> [5], "5..8" -> [5, 6, 7, 8], "2,4" -> [2, 4]."""
    token = text.strip()
    try:
        if ".." in token:
            low, high = token.split("..", 1)
            low, high = int(low), int(high)
            if low > high:
                raise ValueError
            return list(range(low, high + 1))
        return [int(part) for part in token.split(",")]
    except ValueError as e:
        raise LeibnizError(f"invalid --n value {text!r}: expected N, A..B or a comma list") from e


def parse_p_list(text: str) -> List[PExponent]:
    return [PExponent.parse(part) for part in text.split(",") if part.strip()]


def write_output(kind: str, payload: Dict[str, object], table: pd.DataFrame, config: Dict,
                 output_file: Optional[str], stem: str) -> bool:
    """Write the report in the configured format; False when the format is unavailable."""
    output_format = config["output_format"]
    path = output_file or default_output_path(config["output_dir"], stem, output_format)
    report = build_report(kind, payload)
    if output_format == "json":
        write_json(report, path)
    elif output_format == "csv":
        write_csv(table, path)
    else:
        from pdf_export import export_report_to_pdf, is_pdf_export_available
        if not is_pdf_export_available():
            print("Error: PDF export needs reportlab. Install with: pip install reportlab")
            return False
        if not export_report_to_pdf(report, str(path)):
            return False
    print(f"\n✓ Report saved to: {path}")
    return True


def cmd_reproduce(args, config: Dict) -> int:
    """Reproduce an explicit counterexample in exact arithmetic."""
    if args.which == "example1":
        n = args.n if args.n is not None else 5
        example = reproduce_example1(n)
    else:
        example = reproduce_example2()

    print(f"Reproducing {example.name}")
    print("=" * 50)
    rendered = example.to_dict()
    for key, value in rendered["values"].items():
        expected = rendered["expected"].get(key)
        if expected is None:
            print(f"   {key}: {value}")
        else:
            mark = "✓" if value == expected else "✗"
            print(f"   {mark} {key}: {value} (expected {expected})")

    table = pd.DataFrame([{"quantity": key, "value": str(value), "expected": str(rendered["expected"].get(key, ""))}
                          for key, value in rendered["values"].items()],
                         columns=["quantity", "value", "expected"])
    if not write_output("reproduce", rendered, table, config, args.output_file, example.name):
        return EXIT_USAGE
    if example.matches:
        print("\n✓ Every value matches exactly")
        return EXIT_OK
    print("\n✗ Reproduction mismatch")
    return EXIT_VIOLATION


def cmd_verify(args, config: Dict) -> int:
    """Run one verification suite."""
    trials, seed, tolerance = int(config["trials"]), int(config["seed"]), float(config["tolerance"])
    print(f"Running {args.suite} suite: {trials} trials, seed {seed}, tolerance {tolerance:g}")
    print("=" * 50)
    report = run_suite(args.suite, trials, seed, tolerance, config)

    for check in report.checks:
        if not check.asserted:
            mark = "·"
        else:
            mark = "✓" if check.passed else "✗"
        print(f"   {mark} {check.name}: max defect {check.max_defect:.3e}, "
              f"{check.violations} of {check.trials} above tolerance")

    if not write_output("verify", report.to_dict(), report.to_frame(), config, args.output_file,
                        f"verify_{args.suite}"):
        return EXIT_USAGE
    if report.passed:
        print("\n✓ All proved inequalities hold")
        return EXIT_OK
    print(f"\n✗ {len(report.failing())} check(s) flagged a proved inequality")
    return EXIT_VIOLATION


def cmd_scan(args, config: Dict) -> int:
    """Scan the open conjecture over an (n, p) grid."""
    n_values = parse_n_range(args.n or "1..8")
    p_grid = parse_p_list(args.p or "1,1.5,2,3")
    objectives = [o.strip() for o in args.objective.split(",")] if args.objective else None
    budget, seed = int(config["budget"]), int(config["seed"])
    tolerance = float(config["tolerance"])

    print(f"Scanning n in {n_values[0]}..{n_values[-1]}, p in {', '.join(str(p) for p in p_grid)}")
    print("=" * 50)
    kwargs = {"objectives": objectives} if objectives else {}
    scan = conjecture_scan(n_values, p_grid, budget, seed, tolerance=tolerance,
                           restarts=int(config["restarts"]), floor=float(config["strong_floor"]), **kwargs)

    cells = []
    proved_violations = 0
    for task, result, row in zip(scan.tasks, scan.results, scan.table.itertuples()):
        if config["exact"] and result.recertification is None:
            result.recertification = recertify(task, result.witness)
        proved = is_proved(task)
        if row.flagged:
            label = "diagnostic" if task.objective in DIAGNOSTIC_OBJECTIVES else "OPEN"
            if proved:
                label = "PROVED"
                proved_violations += 1
            print(f"   ⚠ {label} n={task.n} p={task.p} {task.objective}: defect {result.best_defect:.6g}")
        cell = {"n": task.n, "p": str(task.p), "objective": task.objective,
                "best_defect": format_scalar(result.best_defect), "flagged": bool(row.flagged), "proved": proved}
        cell.update(result.to_dict())
        cells.append(cell)

    open_flags = len(scan.flagged())
    print(f"\n{len(cells)} cells, {open_flags} flagged outside the diagnostic objectives")
    payload = {"parameters": {"n": [int(n) for n in n_values], "p": [str(p) for p in p_grid],
                              "budget": budget, "seed": seed, "tolerance": format_scalar(tolerance)},
               "cells": cells}
    if not write_output("scan", payload, scan.table, config, args.output_file, "scan"):
        return EXIT_USAGE
    if proved_violations:
        print(f"\n✗ {proved_violations} cell(s) flagged a proved inequality")
        return EXIT_VIOLATION
    print("\n✓ Scan completed")
    return EXIT_OK


def cmd_search(args, config: Dict) -> int:
    """Run one defect search."""
    p = PExponent.parse(args.p or "1")
    weights = [parse_scalar(w) for w in args.weights.split(",")] if args.weights else None
    n = args.n if args.n is not None else (len(weights) if weights else 5)
    task = SearchTask(objective=args.objective, n=n, p=p,
                      measure_family=args.measure or ("fixed" if weights else "uniform"),
                      budget=int(config["budget"]), seed=int(config["seed"]), d=args.d,
                      state=args.state, weights=weights, floor=float(config["strong_floor"]),
                      restarts=int(config["restarts"]))
    tolerance = float(config["tolerance"])

    print(f"Searching {task.objective} (n={task.n}, p={task.p}, budget={task.budget}, seed={task.seed})")
    print("=" * 50)
    result = maximize_defect(task)
    flagged = result.best_defect > tolerance
    if flagged or config["exact"]:
        result.recertification = recertify(task, result.witness)
        if flagged and result.recertification is not None:
            flagged = result.recertification.sign > 0

    report = evaluate_witness(task, result.witness, tolerance)
    print(f"   Best defect: {result.best_defect:.12g}")
    print(f"   Evaluations: {result.evaluations_used}")
    if result.recertification is not None:
        print(f"   Recertified ({result.recertification.mode}): sign {result.recertification.sign:+d}, "
              f"defect {result.recertification.defect}")

    proved = is_proved(task)
    payload = {"task": task.describe(), "result": result.to_dict(), "report": report.to_dict(),
               "flagged": flagged, "proved": proved}
    table = pd.DataFrame([{"objective": task.objective, "n": task.n, "p": str(task.p),
                           "best_defect": result.best_defect, "flagged": flagged}],
                         columns=["objective", "n", "p", "best_defect", "flagged"])
    if not write_output("search", payload, table, config, args.output_file, f"search_{task.objective}"):
        return EXIT_USAGE
    if flagged and proved:
        print("\n✗ Violation of a proved inequality")
        return EXIT_VIOLATION
    if flagged:
        print("\n⚠ Violation found: the inequality fails on the stored witness")
    else:
        print("\n✓ No violation found")
    return EXIT_OK


def cmd_pdf(args, config: Dict) -> int:
    """Render a saved JSON report as PDF."""
    from pdf_export import export_report_from_json_file, is_pdf_export_available
    if not is_pdf_export_available():
        print("Error: PDF export needs reportlab. Install with: pip install reportlab")
        return EXIT_USAGE
    path = export_report_from_json_file(args.report, args.output_file)
    if path is None:
        print(f"Error: could not render {args.report}")
        return EXIT_USAGE
    print(f"\n✓ PDF saved to: {path}")
    return EXIT_OK


def cmd_init_config(args, config: Dict) -> int:
    """Write the effective settings (defaults, file, then flags) to a settings file."""
    path = args.config or DEFAULT_CONFIG_PATH
    if not create_config_template(path, config, overwrite=args.force):
        print(f"Error: {path} already exists (use --force to overwrite)")
        return EXIT_USAGE
    print(f"\n✓ Settings saved to: {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON settings file (default: config.json)')
    common.add_argument('--seed', type=int, help='Random seed')
    common.add_argument('--tol', type=float, help='Violation tolerance (default 1e-9)')
    common.add_argument('--out', choices=REPORT_FORMATS, help='Report format')
    common.add_argument('--output-file', help='Report path (default: <output_dir>/<report name>.<format>)')
    common.add_argument('--exact', action='store_true', default=None,
                        help='Recertify witnesses in exact rational (or 60-digit) arithmetic')
    common.add_argument('--verbose', action='store_true', default=None, help='Log progress')

    parser = LeibnizArgumentParser(description="Centered-moment Leibniz inequality toolkit",
                                   formatter_class=argparse.RawDescriptionHelpFormatter,
                                   epilog=CSV_COLUMNS)
    subparsers = parser.add_subparsers(dest='command', parser_class=LeibnizArgumentParser)
    subparsers.required = True

    reproduce = subparsers.add_parser('reproduce', parents=[common], help='Reproduce an explicit counterexample')
    reproduce.add_argument('which', choices=['example1', 'example2'])
    reproduce.add_argument('--n', type=int, help='Number of atoms for example1 (n >= 5)')

    verify = subparsers.add_parser('verify', parents=[common], help='Run a verification suite')
    verify.add_argument('suite', choices=sorted(SUITES))
    verify.add_argument('--trials', type=int, help='Random instances per check')

    scan = subparsers.add_parser('scan', parents=[common], help='Scan defects over an (n, p) grid')
    scan.add_argument('--n', help='Atom counts: N or A..B (default 1..8)')
    scan.add_argument('--p', help='Comma list of exponents, "inf" accepted (default 1,1.5,2,3)')
    scan.add_argument('--budget', type=int, help='Objective evaluations per cell')
    scan.add_argument('--restarts', type=int, help='Random restarts per search')
    scan.add_argument('--objective', help='Comma list of objectives (default leibniz,strong_leibniz,auxiliary)')

    search = subparsers.add_parser('search', parents=[common], help='Run a single defect search')
    search.add_argument('--objective', choices=OBJECTIVES, default='leibniz')
    search.add_argument('--n', type=int, help='Number of atoms')
    search.add_argument('--p', help='Exponent, "inf" accepted (default 1)')
    search.add_argument('--measure', choices=MEASURE_FAMILIES, help='Measure family')
    search.add_argument('--weights', help='Comma list of weights for the fixed measure family')
    search.add_argument('--budget', type=int, help='Objective evaluations')
    search.add_argument('--restarts', type=int, help='Random restarts')
    search.add_argument('--d', type=int, default=2, help='Matrix dimension for nc_product')
    search.add_argument('--state', default='tracial', help='tracial, nontracial or a comma list spectrum')

    pdf = subparsers.add_parser('pdf', help='Render a saved JSON report as PDF')
    pdf.add_argument('report', help='JSON report file')
    pdf.add_argument('--output-file', help='PDF path (default: next to the report)')
    pdf.add_argument('--verbose', action='store_true', default=None, help='Log progress')

    init_config = subparsers.add_parser('init-config', parents=[common],
                                        help='Write a settings file (--config path, default config.json)')
    init_config.add_argument('--trials', type=int, help='Random instances per check')
    init_config.add_argument('--budget', type=int, help='Objective evaluations')
    init_config.add_argument('--restarts', type=int, help='Random restarts')
    init_config.add_argument('--force', action='store_true', help='Overwrite an existing file')
    return parser


COMMANDS = {
    'reproduce': cmd_reproduce,
    'verify': cmd_verify,
    'scan': cmd_scan,
    'search': cmd_search,
    'pdf': cmd_pdf,
    'init-config': cmd_init_config,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    flags = {"seed": "seed", "tolerance": "tol", "output_format": "out", "exact": "exact", "verbose": "verbose",
             "trials": "trials", "budget": "budget", "restarts": "restarts"}
    overrides = {key: getattr(args, attr, None) for key, attr in flags.items()}
    config = merge_overrides(load_config(getattr(args, "config", None)), overrides)
    if config["verbose"]:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if config["output_format"] not in REPORT_FORMATS:
        parser.error(f"unknown output format {config['output_format']!r}")

    try:
        return COMMANDS[args.command](args, config)
    except LeibnizError as e:
        print(f"Error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
